"""Points, cuts and characters of order terms.

A point descriptor is a nested tuple that walks the term:

    ("one",)                   the point of a One
    ("ord", gamma)             position gamma of an Ord
    ("rev", p)                 point p of the reversed argument
    ("sum", i, p)              point p of the i-th summand
    ("pre", i, p)              point p of the i-th prefix term of an OmegaSum
    ("copy", k, p)             point p of the k-th copy of the repeat
    ("q", x)                   dyadic rational x in (0, 1) of a Shuffle

Cut descriptors follow the same paths and end in a position:

    ("one", 0 | 1)             before or after the point
    ("ord", gamma)             0 <= gamma <= a, leaving gamma on the left
    ("q", x, side)             x in [0, 1]; side is "before"/"after" when x
                               is a point, None otherwise
    ("end",)                   after every copy of an OmegaSum
    ("empty",)                 the only cut of the empty order

Point enumeration.  Every point gets a positive integer weight and there
are finitely many points of each weight; the enumeration lists weight 1,
then weight 2, and so on, each batch in the order of the term.  Weights:
a One point 1; position gamma of an Ord 1 + w(gamma), where w(0) = 0 and
w(sum of omega^e * c) = sum of (c + w(e)); the i-th summand or prefix term
adds i; the k-th copy adds k + 1; a dyadic m / 2^j of a Shuffle has weight
j.  The shuffle points therefore come as 1/2, 1/4, 3/4, 1/8, 3/8, ...
and the n-th dyadic in that list (counting from 0) gets colour number
n mod |C| of the sorted colour set, so every colour is dense.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key, lru_cache

from ..errors import BudgetError, InputError
from ..ordinal import OMEGA, ONE, ZERO, Ordinal, left_subtract
from .terms import (EMPTY, Empty, OmegaSum, One, Ord, Rev, Shuffle, Sum, finite_size, has_max, has_min,
                    is_finite, normalize, strip_colours)


class InvalidPoint(InputError):
    pass


class InvalidCut(InputError):
    pass


class CapExceeded(BudgetError):
    pass


DEFAULT_REALIZE_CAP = 4096

# Characters of a point: what lies immediately to its left and right.
ENDPOINT_MIN, SUCCESSOR, OMEGA_LIMIT = "EndpointMin", "Successor", "OmegaLimit"
ENDPOINT_MAX, PREDECESSOR, OMEGA_COLIMIT = "EndpointMax", "Predecessor", "OmegaColimit"


@dataclass(frozen=True)
class Character:
    left: str
    right: str


# -- ordinal weights ---------------------------------------------------------------------


def ordinal_weight(g):
    return sum(c + ordinal_weight(e) for e, c in g.cnf)


@lru_cache(maxsize=None)
def _ords_of_weight(w, bound):
    """All ordinals of weight w whose CNF exponents are all below bound (None: no bound)."""
    if w == 0:
        return (ZERO,)
    out = []
    for wf in range(w):
        if bound is None:
            exps = _ords_of_weight(wf, None)
        else:
            if bound.is_zero():
                break
            exps = [f for f in _ords_of_weight(wf, bound.leading_exponent() + ONE) if f < bound]
        for f in exps:
            for c in range(1, w - wf + 1):
                for rest in _ords_of_weight(w - wf - c, f):
                    out.append(Ordinal(((f, c),) + rest.cnf))
    return tuple(sorted(out))


def ordinals_below_of_weight(a, w):
    if a.is_zero():
        return []
    bound = a.leading_exponent() + ONE
    return [g for g in _ords_of_weight(w, bound) if g < a]


# -- points --------------------------------------------------------------------------------


def _dyadics_of_level(j):
    return [Fraction(m, 1 << j) for m in range(1, 1 << j, 2)]


def points_of_weight(t, w):
    if w < 1:
        return []
    if isinstance(t, One):
        return [("one",)] if w == 1 else []
    if isinstance(t, Ord):
        return [("ord", g) for g in ordinals_below_of_weight(t.a, w - 1)]
    if isinstance(t, Rev):
        return [("rev", p) for p in points_of_weight(t.arg, w)]
    if isinstance(t, Sum):
        return [("sum", i, p) for i, x in enumerate(t.args) for p in points_of_weight(x, w - i)]
    if isinstance(t, OmegaSum):
        out = [("pre", i, p) for i, x in enumerate(t.prefix) for p in points_of_weight(x, w - i)]
        for k in range(w - 1):
            out.extend(("copy", k, p) for p in points_of_weight(t.repeat, w - k - 1))
        return out
    if isinstance(t, Shuffle):
        return [("q", x) for x in _dyadics_of_level(w)]
    return []


def _max_weight(t):
    """Largest point weight of a finite term."""
    if isinstance(t, Empty):
        return 0
    if isinstance(t, One):
        return 1
    if isinstance(t, Ord):
        return t.a.finite_value()
    if isinstance(t, Rev):
        return _max_weight(t.arg)
    if isinstance(t, Sum):
        return max(_max_weight(x) + i for i, x in enumerate(t.args))
    raise InputError("term is infinite")


def enumerate_points(t):
    """Every point of the term, in the fixed weight-then-order enumeration."""
    t = normalize(t)
    key = cmp_to_key(lambda p, q: compare_points(t, p, q))
    last = _max_weight(t) if is_finite(t) else None
    w = 1
    while last is None or w <= last:
        yield from sorted(points_of_weight(t, w), key=key)
        w += 1


def compare_points(t, p, q):
    if isinstance(t, One):
        return 0
    if isinstance(t, Ord):
        return (p[1] > q[1]) - (p[1] < q[1])
    if isinstance(t, Rev):
        return -compare_points(t.arg, p[1], q[1])
    if isinstance(t, Sum):
        if p[1] != q[1]:
            return -1 if p[1] < q[1] else 1
        return compare_points(t.args[p[1]], p[2], q[2])
    if isinstance(t, OmegaSum):
        kp, kq = (p[0] == "copy", p[1]), (q[0] == "copy", q[1])
        if kp != kq:
            return -1 if kp < kq else 1
        inner = t.repeat if p[0] == "copy" else t.prefix[p[1]]
        return compare_points(inner, p[2], q[2])
    if isinstance(t, Shuffle):
        x, y = p[1], q[1]
        a, b = x.numerator * y.denominator, y.numerator * x.denominator
        return (a > b) - (a < b)
    raise InvalidPoint("the empty order has no points")


def shuffle_colour(colours, x):
    """Colour of dyadic x under the round-robin schedule."""
    j = x.denominator.bit_length() - 1
    idx = (1 << (j - 1)) - 1 + (x.numerator - 1) // 2
    palette = sorted(colours)
    return palette[idx % len(palette)]


def ord_kinds(a, g):
    left = "first" if g.is_zero() else ("successor" if g.is_successor() else "limit")
    right = "last" if g + ONE == a else "inner"
    return left, right


def colour_of(t, p):
    if isinstance(t, One):
        return t.colour
    if isinstance(t, Ord):
        return t.palette_colour(*ord_kinds(t.a, p[1]))
    if isinstance(t, Rev):
        return colour_of(t.arg, p[1])
    if isinstance(t, Sum):
        return colour_of(t.args[p[1]], p[2])
    if isinstance(t, OmegaSum):
        inner = t.repeat if p[0] == "copy" else t.prefix[p[1]]
        return colour_of(inner, p[2])
    if isinstance(t, Shuffle):
        return shuffle_colour(t.colours, p[1])
    raise InvalidPoint("the empty order has no points")


def check_point(t, p):
    """Raise InvalidPoint unless p names a point of t."""
    ok = False
    try:
        if isinstance(t, One):
            ok = p == ("one",)
        elif isinstance(t, Ord):
            ok = p[0] == "ord" and isinstance(p[1], Ordinal) and p[1] < t.a
        elif isinstance(t, Rev):
            ok = p[0] == "rev" and (check_point(t.arg, p[1]) or True)
        elif isinstance(t, Sum):
            ok = p[0] == "sum" and 0 <= p[1] < len(t.args) and (check_point(t.args[p[1]], p[2]) or True)
        elif isinstance(t, OmegaSum):
            if p[0] == "pre":
                ok = 0 <= p[1] < len(t.prefix) and (check_point(t.prefix[p[1]], p[2]) or True)
            elif p[0] == "copy":
                ok = p[1] >= 0 and (check_point(t.repeat, p[2]) or True)
        elif isinstance(t, Shuffle):
            x = p[1]
            ok = p[0] == "q" and isinstance(x, Fraction) and 0 < x < 1 and x.denominator & (x.denominator - 1) == 0
    except (IndexError, TypeError):
        ok = False
    if not ok:
        raise InvalidPoint(f"{p!r} is not a point of the term")


@dataclass
class FiniteOrder:
    points: list
    colours: list

    def __len__(self):
        return len(self.points)


def finite_realize(t, n, cap=DEFAULT_REALIZE_CAP):
    """The first n enumerated points, listed in the order of the term."""
    if n > cap:
        raise CapExceeded(f"{n} points requested, cap is {cap}")
    t = normalize(t)
    chosen = []
    for p in enumerate_points(t):
        if len(chosen) >= n:
            break
        chosen.append(p)
    chosen.sort(key=cmp_to_key(lambda p, q: compare_points(t, p, q)))
    return FiniteOrder(chosen, [colour_of(t, p) for p in chosen])


# -- cuts -------------------------------------------------------------------------------------


def cut_before(t, p):
    return _cut_at(t, p, True)


def cut_after(t, p):
    return _cut_at(t, p, False)


def _cut_at(t, p, before):
    if isinstance(t, One):
        return ("one", 0 if before else 1)
    if isinstance(t, Ord):
        return ("ord", p[1] if before else p[1] + ONE)
    if isinstance(t, Rev):
        return ("rev", _cut_at(t.arg, p[1], not before))
    if isinstance(t, Sum):
        return ("sum", p[1], _cut_at(t.args[p[1]], p[2], before))
    if isinstance(t, OmegaSum):
        inner = t.repeat if p[0] == "copy" else t.prefix[p[1]]
        return (p[0], p[1], _cut_at(inner, p[2], before))
    if isinstance(t, Shuffle):
        return ("q", p[1], "before" if before else "after")
    raise InvalidPoint("the empty order has no points")


def _is_dyadic_point(x):
    return 0 < x < 1 and x.denominator & (x.denominator - 1) == 0


def split(t, c):
    """The two sides (L, R) of a cut of the normalized term, as colour-stripped terms."""
    t = normalize(t)
    left, right = _split(strip_colours(t), c)
    return normalize(left), normalize(right)


def _split(t, c):
    try:
        tag = c[0]
    except (TypeError, IndexError):
        raise InvalidCut(f"malformed cut {c!r}") from None
    if isinstance(t, Empty):
        if tag != "empty":
            raise InvalidCut("the empty order has only the cut ('empty',)")
        return EMPTY, EMPTY
    if isinstance(t, One):
        if tag != "one" or c[1] not in (0, 1):
            raise InvalidCut(f"{c!r} is not a cut of a point")
        return (EMPTY, t) if c[1] == 0 else (t, EMPTY)
    if isinstance(t, Ord):
        g = c[1] if tag == "ord" else None
        if not isinstance(g, Ordinal) or g > t.a:
            raise InvalidCut(f"{c!r} is not a cut of Ord({t.a})")
        return Ord(g), Ord(left_subtract(g, t.a))
    if isinstance(t, Rev):
        if tag != "rev":
            raise InvalidCut(f"{c!r} does not enter a reversal")
        lx, rx = _split(t.arg, c[1])
        return Rev(rx), Rev(lx)
    if isinstance(t, Sum):
        if tag != "sum" or not 0 <= c[1] < len(t.args):
            raise InvalidCut(f"{c!r} does not name a summand")
        lx, rx = _split(t.args[c[1]], c[2])
        return Sum(t.args[:c[1]] + (lx,)), Sum((rx,) + t.args[c[1] + 1:])
    if isinstance(t, OmegaSum):
        if tag == "end":
            return t, EMPTY
        if tag == "pre" and 0 <= c[1] < len(t.prefix):
            lx, rx = _split(t.prefix[c[1]], c[2])
            return Sum(t.prefix[:c[1]] + (lx,)), OmegaSum((rx,) + t.prefix[c[1] + 1:], t.repeat)
        if tag == "copy" and isinstance(c[1], int) and c[1] >= 0:
            lx, rx = _split(t.repeat, c[2])
            return Sum(t.prefix + (t.repeat,) * c[1] + (lx,)), OmegaSum((rx,), t.repeat)
        raise InvalidCut(f"{c!r} is not a cut of an omega-sum")
    if isinstance(t, Shuffle):
        if tag != "q":
            raise InvalidCut(f"{c!r} is not a cut of a shuffle")
        x = Fraction(c[1])
        side = c[2] if len(c) > 2 else None
        if x == 0:
            return EMPTY, t
        if x == 1:
            return t, EMPTY
        if not 0 < x < 1:
            raise InvalidCut(f"shuffle cut position {x} outside [0, 1]")
        if _is_dyadic_point(x):
            pt = One(shuffle_colour(t.colours, x))
            if side == "before":
                return t, Sum((pt, t))
            if side == "after":
                return Sum((t, pt)), t
            raise InvalidCut(f"cut at the point {x} needs a side")
        return t, t
    raise InvalidCut(f"cannot cut {t!r}")


CUT_CASES = ("I0HasLast", "I0Empty", "I1HasFirst", "I1Empty", "BothOmega")


def classify_cut(t, c):
    left, right = split(t, c)
    cases = set()
    if isinstance(left, Empty):
        cases.add("I0Empty")
    elif has_max(left):
        cases.add("I0HasLast")
    if isinstance(right, Empty):
        cases.add("I1Empty")
    elif has_min(right):
        cases.add("I1HasFirst")
    if not isinstance(left, Empty) and not has_max(left) and not isinstance(right, Empty) and not has_min(right):
        cases.add("BothOmega")
    return cases


def character_at(t, p):
    t = normalize(t)
    check_point(t, p)
    left, _ = split(t, cut_before(t, p))
    _, right = split(t, cut_after(t, p))
    lc = ENDPOINT_MIN if isinstance(left, Empty) else (SUCCESSOR if has_max(left) else OMEGA_LIMIT)
    rc = ENDPOINT_MAX if isinstance(right, Empty) else (PREDECESSOR if has_min(right) else OMEGA_COLIMIT)
    return Character(lc, rc)


# -- JSON for cuts and points ----------------------------------------------------------------------


def path_from_json(obj):
    """Decode a point or cut path: nested lists with ordinals as {"cnf": ...} and rationals as "m/n"."""
    if not isinstance(obj, list) or not obj:
        raise InvalidCut(f"malformed path {obj!r}")
    tag = obj[0]
    if tag in ("rev",):
        return (tag, path_from_json(obj[1])) if len(obj) > 1 else (tag,)
    if tag in ("sum", "pre", "copy"):
        return (tag, int(obj[1]), path_from_json(obj[2]))
    if tag == "ord":
        return (tag, Ordinal.from_json(obj[1]))
    if tag == "q":
        x = Fraction(obj[1])
        return (tag, x) + ((obj[2],) if len(obj) > 2 else ())
    if tag == "one":
        return (tag,) + tuple(obj[1:])
    return tuple(obj)


def path_to_json(path):
    out = []
    for item in path:
        if isinstance(item, tuple):
            out.append(path_to_json(item))
        elif isinstance(item, Ordinal):
            out.append(item.to_json())
        elif isinstance(item, Fraction):
            out.append(f"{item.numerator}/{item.denominator}")
        else:
            out.append(item)
    return out


def first_point(t):
    """The least point of a normalized term, or None when there is none."""
    if isinstance(t, One):
        return ("one",)
    if isinstance(t, Ord):
        return ("ord", ZERO)
    if isinstance(t, Rev):
        p = last_point(t.arg)
        return None if p is None else ("rev", p)
    if isinstance(t, Sum):
        p = first_point(t.args[0])
        return None if p is None else ("sum", 0, p)
    if isinstance(t, OmegaSum):
        if t.prefix:
            p = first_point(t.prefix[0])
            return None if p is None else ("pre", 0, p)
        p = first_point(t.repeat)
        return None if p is None else ("copy", 0, p)
    return None


def last_point(t):
    """The greatest point of a normalized term, or None when there is none."""
    if isinstance(t, One):
        return ("one",)
    if isinstance(t, Ord):
        return ("ord", t.a.predecessor()) if t.a.is_successor() else None
    if isinstance(t, Rev):
        p = first_point(t.arg)
        return None if p is None else ("rev", p)
    if isinstance(t, Sum):
        n = len(t.args) - 1
        p = last_point(t.args[n])
        return None if p is None else ("sum", n, p)
    return None


def colours_used(t):
    """The set of colours carried by points of a normalized term (None for uncoloured points)."""
    if isinstance(t, Empty):
        return set()
    if isinstance(t, One):
        return {t.colour}
    if isinstance(t, Ord):
        return {t.palette_colour(lk, rk) for lk, rk in realized_kinds(t.a)}
    if isinstance(t, Rev):
        return colours_used(t.arg)
    if isinstance(t, Sum):
        return set().union(*(colours_used(x) for x in t.args))
    if isinstance(t, OmegaSum):
        return set().union(colours_used(t.repeat), *(colours_used(x) for x in t.prefix))
    if isinstance(t, Shuffle):
        return set(t.colours)
    return set()


def realized_kinds(a):
    """(left kind, right kind) pairs realized by some position below a."""
    kinds = set()
    if a == ONE:
        kinds.add(("first", "last"))
    if a >= 2:
        kinds.add(("first", "inner"))
    if a >= 3:
        kinds.add(("successor", "inner"))
    if a > OMEGA + ONE:
        kinds.add(("limit", "inner"))
    if a.is_successor() and a >= 2:
        kinds.add(("successor" if a.predecessor().is_successor() else "limit", "last"))
    return kinds
