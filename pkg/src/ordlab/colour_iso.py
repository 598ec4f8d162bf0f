"""Back-and-forth matching of countable coloured linear orders given lazily.

A presented order hands out its points one at a time (``enumerate(n)``),
compares any two of them, and reports colours.  The engine grows a finite
order- and colour-preserving partial map.  Rounds alternate strictly:
even rounds take the least-indexed uncovered point of the left order and
place it on the right, odd rounds go the other way.  A point is placed at
the least-indexed candidate of the same colour lying in the matching gap.

For two finite presentations the candidate must also see the same colour
sequences to its left and right inside the gap.  A finite coloured order
is rigid, so this makes the engine succeed exactly on isomorphic pairs.
"""

import random
from bisect import bisect_left
from dataclasses import dataclass, field
from functools import cmp_to_key
from typing import Optional

from .errors import InputError
from .order_term.points import colour_of, colours_used, compare_points, first_point, last_point, points_of_weight
from .order_term.terms import finite_size, is_finite, normalize

DEFAULT_WINDOW = 1 << 14


class PreconditionFailed(InputError):
    pass


# -- presentations ---------------------------------------------------------------------


class TermPresentation:
    """Points of an order term in the weight enumeration, shuffled within each weight by seed."""

    def __init__(self, term, seed=None):
        self.term = normalize(term)
        self.seed = seed
        self.size = finite_size(self.term) if is_finite(self.term) else None
        self._tokens = []
        self._index = {}
        self._gen = self._generate()

    def _generate(self):
        rng = random.Random(self.seed) if self.seed is not None else None
        w = produced = 0
        key = cmp_to_key(lambda p, q: compare_points(self.term, p, q))
        while self.size is None or produced < self.size:
            w += 1
            batch = sorted(points_of_weight(self.term, w), key=key)
            if rng is not None:
                rng.shuffle(batch)
            for p in batch:
                produced += 1
                yield p

    def enumerate(self, n):
        while len(self._tokens) <= n:
            p = next(self._gen)
            self._index[p] = len(self._tokens)
            self._tokens.append(p)
        return self._tokens[n]

    def index_of(self, token):
        return self._index.get(token)

    def compare(self, x, y):
        return compare_points(self.term, x, y)

    def colour(self, x):
        c = colour_of(self.term, x)
        return 0 if c is None else c

    def level(self, x):
        return self._index[x]

    def first(self):
        return first_point(self.term)

    def last(self):
        return last_point(self.term)

    def colour_set(self):
        return frozenset(0 if c is None else c for c in colours_used(self.term))


class FinitePresentation:
    """A finite coloured order on positions 0..n-1, enumerated in the order perm."""

    def __init__(self, colours, perm=None):
        self.colours = list(colours)
        self.size = len(self.colours)
        self.perm = list(perm) if perm is not None else list(range(self.size))
        if sorted(self.perm) != list(range(self.size)):
            raise InputError("perm must be a permutation of the positions")
        self._index = {p: i for i, p in enumerate(self.perm)}

    def enumerate(self, n):
        return self.perm[n]

    def index_of(self, token):
        return self._index.get(token)

    def compare(self, x, y):
        return (x > y) - (x < y)

    def colour(self, x):
        return self.colours[x]

    def level(self, x):
        return self._index[x]

    def first(self):
        return 0 if self.size else None

    def last(self):
        return self.size - 1 if self.size else None

    def colour_set(self):
        return frozenset(self.colours)


# -- results ------------------------------------------------------------------------------------


@dataclass
class PartialIso:
    pairs: list = field(default_factory=list)
    trace: list = field(default_factory=list)

    def __len__(self):
        return len(self.pairs)


@dataclass
class Obstruction:
    """No point of the needed colour in the gap on the passive side.

    certificate is True when this proves the orders are not isomorphic over
    the current map, and False when only the probe window ran out.
    """
    side: str
    target: object
    colour: int
    interval: tuple
    certificate: bool
    reason: str
    partial: Optional[PartialIso] = None


def verify_partial_iso(A, B, pairs):
    """First pair of pairs that breaks order, colour or injectivity; None if all is well."""
    pairs = list(pairs)
    for i, (x, y) in enumerate(pairs):
        if A.colour(x) != B.colour(y):
            return {"pair": [x, y], "problem": "colour"}
        for x2, y2 in pairs[i + 1:]:
            if A.compare(x, x2) != B.compare(y, y2):
                return {"pairs": [[x, y], [x2, y2]], "problem": "order"}
    return None


# -- engine -------------------------------------------------------------------------------------


class _Side:
    def __init__(self, order, name):
        self.order = order
        self.name = name
        self.finite = getattr(order, "size", None) is not None
        self.used = set()
        self.next_free = 0
        self.sorted = []
        self.key = cmp_to_key(order.compare)

    def count(self):
        return self.order.size if self.finite else None

    def token(self, i):
        return self.order.enumerate(i)

    def least_uncovered(self):
        while not (self.finite and self.next_free >= self.order.size):
            x = self.token(self.next_free)
            if x not in self.used:
                return x
            self.next_free += 1
        return None

    def position(self, x):
        return bisect_left(self.sorted, self.key(x), key=self.key)


class _Matcher:
    def __init__(self, A, B, window):
        self.sides = (_Side(A, "forward"), _Side(B, "backward"))
        self.window = window
        self.pairs = []        # (a, b), sorted by the left order
        self.trace = []

    def _add(self, a, b):
        left, right = self.sides
        pos = left.position(a)
        left.sorted.insert(pos, a)
        right.sorted.insert(pos, b)
        self.pairs.insert(pos, (a, b))
        left.used.add(a)
        right.used.add(b)

    def _gap(self, active, passive, x):
        pos = active.position(x)
        lo = passive.sorted[pos - 1] if pos > 0 else None
        hi = passive.sorted[pos] if pos < len(passive.sorted) else None
        alo = active.sorted[pos - 1] if pos > 0 else None
        ahi = active.sorted[pos] if pos < len(active.sorted) else None
        return (alo, ahi), (lo, hi)

    @staticmethod
    def _inside(order, y, lo, hi):
        return (lo is None or order.compare(lo, y) < 0) and (hi is None or order.compare(y, hi) < 0)

    def _gap_colours(self, side, lo, hi):
        """Colours of a finite side's gap, in order."""
        order = side.order
        pts = [order.enumerate(i) for i in range(order.size)]
        pts = [p for p in pts if self._inside(order, p, lo, hi)]
        pts.sort(key=cmp_to_key(order.compare))
        return pts, [order.colour(p) for p in pts]

    def place(self, active, passive, x):
        """Find the image of x on the passive side, or an Obstruction."""
        (alo, ahi), (lo, hi) = self._gap(active, passive, x)
        col = active.order.colour(x)
        same = active.order is passive.order
        wanted = None
        if active.finite and passive.finite:
            apts, acols = self._gap_colours(active, alo, ahi)
            k = apts.index(x)
            wanted = (acols[:k], acols[k + 1:])
            ppts, pcols = self._gap_colours(passive, lo, hi)
            for j, y in enumerate(ppts):
                if pcols[j] == col and (pcols[:j], pcols[j + 1:]) == wanted:
                    return y
            return Obstruction(passive.name, x, col, (lo, hi), True,
                               "the gap has no point with the same colour pattern")
        if same and x not in passive.used and self._inside(passive.order, x, lo, hi):
            return x
        limit = passive.count() if passive.finite else self.window
        best = None
        for i in range(limit):
            y = passive.token(i)
            if y in passive.used or passive.order.colour(y) != col:
                continue
            if not self._inside(passive.order, y, lo, hi):
                continue
            rank = (passive.order.level(y), i)
            if best is None or rank < best[0]:
                best = (rank, y)
                if rank[0] <= i:
                    break
        if best is not None:
            return best[1]
        cset = getattr(passive.order, "colour_set", None)
        if cset is not None and col not in cset():
            return Obstruction(passive.name, x, col, (lo, hi), True,
                               f"colour {col} does not occur on the other side")
        if passive.finite:
            return Obstruction(passive.name, x, col, (lo, hi), True, "the gap has no free point of this colour")
        return Obstruction(passive.name, x, col, (lo, hi), False, f"nothing found in the first {limit} points")

    def step(self, rnd, active_idx, x):
        active, passive = self.sides[active_idx], self.sides[1 - active_idx]
        y = self.place(active, passive, x)
        if isinstance(y, Obstruction):
            return y
        if active_idx == 0:
            self._add(x, y)
        else:
            self._add(y, x)
        self.trace.append((rnd, active.name, x, y))
        return None

    def anchor(self):
        """Match first points with first points and last with last."""
        A, B = self.sides[0].order, self.sides[1].order
        for name, fa, fb in (("first", A.first(), B.first()), ("last", A.last(), B.last())):
            if (fa is None) != (fb is None):
                side, tgt = ("backward", fa) if fb is None else ("forward", fb)
                return Obstruction(side, tgt, None, (None, None), True, f"only one side has a {name} point")
            if fa is None or fa in self.sides[0].used or fb in self.sides[1].used:
                if fa is not None and (fa in self.sides[0].used) != (fb in self.sides[1].used):
                    return Obstruction("forward", fa, None, (None, None), True, f"{name} points are matched elsewhere")
                continue
            if A.colour(fa) != B.colour(fb):
                return Obstruction("forward", fa, A.colour(fa), (None, None), True, f"{name} points differ in colour")
            self._add(fa, fb)
            self.trace.append(("anchor", name, fa, fb))
        return None

    def result(self):
        return PartialIso(list(self.pairs), list(self.trace))


def back_and_forth(A, B, rounds, window=DEFAULT_WINDOW, initial=()):
    """Grow an order- and colour-preserving partial map from A to B over the given rounds."""
    m = _Matcher(A, B, window)
    for a, b in initial:
        if a in m.sides[0].used or b in m.sides[1].used:
            raise InputError("initial pairs must be injective")
        m._add(a, b)
    bad = verify_partial_iso(A, B, m.pairs)
    if bad is not None:
        raise PreconditionFailed("initial pairs are not a partial isomorphism", witness=bad)
    obs = m.anchor()
    if obs is not None:
        obs.partial = m.result()
        return obs
    for rnd in range(rounds):
        idx = rnd % 2
        x = m.sides[idx].least_uncovered()
        if x is None:
            continue
        obs = m.step(rnd, idx, x)
        if obs is not None:
            obs.partial = m.result()
            return obs
    return m.result()


def automorphism_over(N, J, s, t, rounds, window=DEFAULT_WINDOW):
    """A partial automorphism of N fixing J pointwise and sending s to t."""
    J = list(J)
    if s in J or t in J:
        raise PreconditionFailed("s and t must lie outside J")
    if N.colour(s) != N.colour(t):
        raise PreconditionFailed("s and t have different colours", witness={"s": N.colour(s), "t": N.colour(t)})
    for j in J:
        if N.compare(s, j) != N.compare(t, j):
            raise PreconditionFailed("s and t realize different cuts of J", witness=j)
    initial = [(j, j) for j in J] + [(s, t)]
    return back_and_forth(N, N, rounds, window, initial)


# -- quite closed sets --------------------------------------------------------------------------


@dataclass
class QuiteClosedReport:
    holds: bool
    clause: Optional[str] = None
    witness: object = None
    probe: int = 0
    horizon: int = 0


def _membership(J):
    if callable(J):
        return J
    members = set(J)
    return lambda x: x in members


def quite_closed_check(N, J, probe, horizon=None):
    """Check J for no first or last member and endpoint-free gap classes.

    J is a finite set of tokens or a predicate.  Points are probed among the
    first probe enumerated points; witnesses may come from the first horizon
    points (default 4 * probe).  A finite nonempty set J always has a first
    member, which is reported.
    """
    horizon = horizon if horizon is not None else 4 * probe
    size = getattr(N, "size", None)
    if size is not None:
        probe, horizon = min(probe, size), min(horizon, size)
    in_j = _membership(J)
    pts = [N.enumerate(i) for i in range(horizon)]
    key = cmp_to_key(N.compare)
    order = sorted(pts, key=key)
    pos = {p: i for i, p in enumerate(order)}
    probed = pts[:probe]
    if not callable(J):
        extra = [j for j in J if j not in pos]
        if extra:
            order = sorted(pts + extra, key=key)
            pos = {p: i for i, p in enumerate(order)}
            probed = probed + [j for j in extra if j not in probed]
    report = lambda clause, w: QuiteClosedReport(False, clause, w, probe, horizon)
    jprobed = sorted((p for p in probed if in_j(p)), key=key)
    if jprobed:
        lo, hi = jprobed[0], jprobed[-1]
        if not any(in_j(q) for q in order[:pos[lo]]):
            return report("J has a first member", lo)
        if not any(in_j(q) for q in order[pos[hi] + 1:]):
            return report("J has a last member", hi)
    for x in probed:
        if in_j(x):
            continue
        i = pos[x]
        up = i + 1 < len(order) and not in_j(order[i + 1])
        down = i > 0 and not in_j(order[i - 1])
        if not up:
            return report("the gap class of x has a last element", x)
        if not down:
            return report("the gap class of x has a first element", x)
    return QuiteClosedReport(True, None, None, probe, horizon)
