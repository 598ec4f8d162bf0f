"""The doubling rank Dp of scattered order terms.

Dp(M) >= 1 iff M is nonempty, Dp(M) >= b+1 iff some cut leaves both sides
of rank >= b, and Dp(M) >= l for a limit l iff Dp(M) >= b for all b < l.

The engine works with a rank profile (level, count).  The level is 1 or a
limit ordinal; the count is the largest number of disjoint consecutive
pieces of rank >= level.  Two facts make the profile compositional:

* for a limit l, Dp(X + Y) >= l iff Dp(X) >= l or Dp(Y) >= l, so piece
  counts at a limit level add up over finite sums;
* Dp(M) >= level + k iff M splits into 2^k consecutive pieces of rank
  >= level, so Dp = level + floor(log2(count)).

Profiles: a point is (1, 1); omega^e for e >= 1 is (omega*e, 1); sums keep
the higher level and add counts at equal levels; reversal changes nothing;
omega copies of r give (L + omega, 1), where L is the level of r when that
level is a limit and 0 when it is 1.
"""

from dataclasses import dataclass
from functools import lru_cache

from ..errors import BudgetError, InputError
from ..ordinal import OMEGA, ONE, ZERO, Ordinal, left_subtract, omega_times
from .terms import Empty, OmegaSum, One, Ord, Rev, Shuffle, Sum, has_max, has_min, normalize


class NotScattered(InputError):
    pass


class BudgetExceeded(BudgetError):
    pass


@dataclass(frozen=True)
class Profile:
    level: Ordinal
    count: int

    def rank(self):
        return self.level + (self.count.bit_length() - 1)


def combine(p, q):
    if p is None:
        return q
    if q is None:
        return p
    if p.level > q.level:
        return p
    if q.level > p.level:
        return q
    return Profile(p.level, p.count + q.count)


def rank_of(p):
    return ZERO if p is None else p.rank()


def _atom_level(e):
    return ONE if e.is_zero() else omega_times(e)


def ord_profile(a):
    out = None
    for e, c in a.cnf:
        out = combine(out, Profile(_atom_level(e), c))
    return out


def omega_level(p):
    """Level of omega copies of a term with profile p."""
    base = p.level if p.level != ONE else ZERO
    return base + OMEGA


def profile(t):
    if isinstance(t, Empty):
        return None
    if isinstance(t, One):
        return Profile(ONE, 1)
    if isinstance(t, Ord):
        return ord_profile(t.a)
    if isinstance(t, Rev):
        return profile(t.arg)
    if isinstance(t, Sum):
        out = None
        for x in t.args:
            out = combine(out, profile(x))
        return out
    if isinstance(t, OmegaSum):
        out = None
        for x in t.prefix:
            out = combine(out, profile(x))
        return combine(out, Profile(omega_level(profile(t.repeat)), 1))
    if isinstance(t, Shuffle):
        raise NotScattered("a shuffle embeds the rationals")
    raise InputError(f"not an order term: {t!r}")


def dp(t, budget=None):
    """Exact rank of a scattered term; BudgetExceeded if it is above budget."""
    t = normalize(t)
    value = rank_of(profile(t))
    if budget is not None and value > budget:
        raise BudgetExceeded(f"rank {value} exceeds budget {budget}", lower_bound=value)
    return value


# -- finite brute force -----------------------------------------------------------------------


def brute_dp(order):
    """Rank of a finite linear order by recursion over every cut of every interval.

    The rank of an interval of a finite order depends only on its length, so
    intervals are memoized by length.
    """
    n = order if isinstance(order, int) else len(order)
    if n > 256:
        raise InputError("brute_dp is limited to 256 points")
    return _interval_dp(n)


@lru_cache(maxsize=None)
def _interval_dp(length):
    if length == 0:
        return 0
    best = 0
    # a cut after position i leaves pieces of sizes i and length - i
    for i in range(1, length):
        best = max(best, min(_interval_dp(i), _interval_dp(length - i)))
    return best + 1


# -- top-level case analysis --------------------------------------------------------------------


def _max_prefix(t):
    """Largest profile among the initial segments strictly below a point.

    Returns ("max", profile) when the largest is attained and ("sup", D)
    when the ranks of these segments climb to the limit D without reaching it.
    """
    if isinstance(t, One):
        return ("max", None)
    if isinstance(t, Ord):
        a = t.a
        if a.is_successor():
            return ("max", ord_profile(a.predecessor()))
        e, c = a.cnf[-1]
        base = Ordinal(a.cnf[:-1] + (((e, c - 1),) if c > 1 else ()))
        if base.is_zero():
            return ("sup", rank_of(ord_profile(a)))
        return ("max", ord_profile(base))
    if isinstance(t, Rev):
        return _max_suffix(t.arg)
    if isinstance(t, Sum):
        head = None
        for x in t.args[:-1]:
            head = combine(head, profile(x))
        return _extend_left(head, _max_prefix(t.args[-1]))
    if isinstance(t, OmegaSum):
        head = None
        for x in t.prefix:
            head = combine(head, profile(x))
        rp = profile(t.repeat)
        if head is not None and head.level > rp.level:
            return ("max", head)
        return ("sup", omega_level(rp))
    raise NotScattered("case analysis needs a scattered nonempty term")


def _max_suffix(t):
    if isinstance(t, One):
        return ("max", None)
    if isinstance(t, Ord):
        return ("max", ord_profile(left_subtract(ONE, t.a)))
    if isinstance(t, Rev):
        return _max_prefix(t.arg)
    if isinstance(t, Sum):
        tail = None
        for x in t.args[1:]:
            tail = combine(tail, profile(x))
        return _extend_right(_max_suffix(t.args[0]), tail)
    if isinstance(t, OmegaSum):
        omega_part = Profile(omega_level(profile(t.repeat)), 1)
        if not t.prefix:
            return _extend_right(_max_suffix(t.repeat), omega_part)
        tail = None
        for x in t.prefix[1:]:
            tail = combine(tail, profile(x))
        return _extend_right(_max_suffix(t.prefix[0]), combine(tail, omega_part))
    raise NotScattered("case analysis needs a scattered nonempty term")


def _extend_left(head, inner):
    kind, val = inner
    if kind == "max":
        return ("max", combine(head, val))
    if head is not None and head.level >= val:
        return ("max", head)
    return inner


def _extend_right(inner, tail):
    kind, val = inner
    if kind == "max":
        return ("max", combine(val, tail))
    if tail is not None and tail.level >= val:
        return ("max", tail)
    return inner


def _count_at(extreme, level):
    kind, val = extreme
    if kind == "max" and val is not None and val.level == level:
        return val.count
    return 0


def _below(extreme, bound):
    kind, val = extreme
    if kind == "max":
        return rank_of(val) < bound
    return val <= bound


@dataclass
class TopCase:
    rank: Ordinal
    clauses: frozenset
    detail: dict


def top_case(t):
    """Which of the four top-level shapes the rank of a scattered term has.

    a: the term is a single point.
    b: some point leaves both sides of strictly smaller rank.
    c: no last point, and every initial segment below a point has smaller rank.
    d: no first point, and every final segment above a point has smaller rank.
    The returned set may be empty: omega+1 and omega*3 have none of these shapes.
    """
    t = normalize(t)
    if isinstance(t, Empty):
        raise InputError("the empty order has no points")
    p = profile(t)
    rank = p.rank()
    clauses = set()
    if isinstance(t, One):
        clauses.add("a")
    pre, suf = _max_prefix(t), _max_suffix(t)
    k = p.count.bit_length() - 1
    detail = {"level": str(p.level), "count": p.count}
    if p.level == ONE:
        # finite order of n points: a middle point leaves two halves below 2^k
        lo, hi = p.count - (1 << k), (1 << k) - 1
        pivot = lo <= hi
        detail["pivot_left_sizes"] = [max(lo, 0), min(hi, p.count - 1)]
    else:
        # pieces at the top level split exactly between the two sides of a
        # point, and the left count moves by at most one between points
        hi_left = _count_at(pre, p.level)
        lo_left = p.count - _count_at(suf, p.level)
        lo, hi = max(lo_left, p.count - (1 << k) + 1), min(hi_left, (1 << k) - 1)
        pivot = lo <= hi
        detail["left_piece_range"] = [lo_left, hi_left]
    if pivot:
        clauses.add("b")
    if not has_max(t) and _below(pre, rank):
        clauses.add("c")
    if not has_min(t) and _below(suf, rank):
        clauses.add("d")
    detail["max_prefix"] = _show_extreme(pre)
    detail["max_suffix"] = _show_extreme(suf)
    return TopCase(rank, frozenset(clauses), detail)


def _show_extreme(x):
    kind, val = x
    if kind == "max":
        return {"max": str(rank_of(val))}
    return {"sup": str(val)}
