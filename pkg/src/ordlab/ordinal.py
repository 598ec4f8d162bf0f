"""Ordinals below epsilon-zero in Cantor normal form.

A value is a tuple of ``(exponent, coefficient)`` pairs with strictly
decreasing exponents (themselves ordinals) and positive integer
coefficients.  The empty tuple is zero.
"""

from enum import Enum
from functools import total_ordering

from .errors import InputError


class Underflow(InputError):
    """Raised by left_subtract when the subtrahend exceeds the ordinal."""


class Cmp(Enum):
    LT = -1
    EQ = 0
    GT = 1


class Cofinality(Enum):
    Zero = "Zero"
    One = "One"
    Omega = "Omega"


@total_ordering
class Ordinal:
    __slots__ = ("cnf", "_hash")

    def __init__(self, cnf=()):
        terms = tuple((e if isinstance(e, Ordinal) else Ordinal.of(e), int(c)) for e, c in cnf)
        for i, (e, c) in enumerate(terms):
            if c < 1:
                raise InputError(f"coefficient must be positive, got {c}")
            if i and _cmp(terms[i - 1][0], e) <= 0:
                raise InputError("exponents must be strictly decreasing")
        self.cnf = terms
        self._hash = None

    @staticmethod
    def of(n):
        """The finite ordinal n."""
        if isinstance(n, Ordinal):
            return n
        if n < 0:
            raise InputError(f"negative ordinal {n}")
        return ZERO if n == 0 else Ordinal(((ZERO, n),))

    # -- structure ---------------------------------------------------------

    def is_zero(self):
        return not self.cnf

    def is_finite(self):
        return not self.cnf or self.cnf[0][0].is_zero()

    def finite_value(self):
        """The integer value of a finite ordinal, else None."""
        if not self.cnf:
            return 0
        if self.cnf[0][0].is_zero():
            return self.cnf[0][1]
        return None

    def is_successor(self):
        return bool(self.cnf) and self.cnf[-1][0].is_zero()

    def is_limit(self):
        return bool(self.cnf) and not self.cnf[-1][0].is_zero()

    def leading_exponent(self):
        return self.cnf[0][0] if self.cnf else None

    def predecessor(self):
        if not self.is_successor():
            raise InputError(f"{self} has no predecessor")
        e, c = self.cnf[-1]
        return Ordinal(self.cnf[:-1] + (((e, c - 1),) if c > 1 else ()))

    def succ(self):
        return self + ONE

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        return add(self, Ordinal.of(other))

    def __radd__(self, other):
        return add(Ordinal.of(other), self)

    # -- comparison --------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, int):
            other = Ordinal.of(other) if other >= 0 else None
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self.cnf == other.cnf

    def __lt__(self, other):
        if isinstance(other, int):
            other = Ordinal.of(other)
        if not isinstance(other, Ordinal):
            return NotImplemented
        return _cmp(self, other) < 0

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.cnf)
        return self._hash

    # -- presentation ------------------------------------------------------

    def __repr__(self):
        return f"Ordinal({self})"

    def __str__(self):
        if not self.cnf:
            return "0"
        parts = []
        for e, c in self.cnf:
            if e.is_zero():
                parts.append(str(c))
                continue
            if e == ONE:
                base = "ω"
            elif e.is_finite() or len(e.cnf) == 1 and e.cnf[0][0].is_zero():
                base = f"ω^{e}"
            else:
                base = f"ω^({e})"
            parts.append(base if c == 1 else f"{base}·{c}")
        return "+".join(parts)

    def to_json(self):
        return {"cnf": [[e.to_json(), c] for e, c in self.cnf]}

    @staticmethod
    def from_json(obj):
        if isinstance(obj, int) and not isinstance(obj, bool):
            return Ordinal.of(obj)
        if not isinstance(obj, dict) or "cnf" not in obj or not isinstance(obj["cnf"], list):
            raise InputError(f"malformed ordinal {obj!r}")
        terms = []
        for pair in obj["cnf"]:
            if not isinstance(pair, list) or len(pair) != 2 or not isinstance(pair[1], int):
                raise InputError(f"malformed CNF term {pair!r}")
            terms.append((Ordinal.from_json(pair[0]), pair[1]))
        return Ordinal(terms)


def _cmp(a, b):
    if a is b:
        return 0
    for (ea, ca), (eb, cb) in zip(a.cnf, b.cnf):
        d = _cmp(ea, eb)
        if d:
            return d
        if ca != cb:
            return -1 if ca < cb else 1
    return (len(a.cnf) > len(b.cnf)) - (len(a.cnf) < len(b.cnf))


ZERO = Ordinal.__new__(Ordinal)
ZERO.cnf = ()
ZERO._hash = None
ONE = Ordinal(((ZERO, 1),))
OMEGA = Ordinal(((ONE, 1),))


def omega_pow(e, c=1):
    """The ordinal ω^e · c."""
    return Ordinal(((Ordinal.of(e), c),))


def compare(a, b):
    return Cmp(_cmp(a, b))


def add(a, b):
    if not b.cnf:
        return a
    if not a.cnf:
        return b
    lead, lead_c = b.cnf[0]
    kept = []
    for e, c in a.cnf:
        d = _cmp(e, lead)
        if d > 0:
            kept.append((e, c))
        elif d == 0:
            kept.append((e, c + lead_c))
            return Ordinal(tuple(kept) + b.cnf[1:])
        else:
            break
    return Ordinal(tuple(kept) + b.cnf)


def left_subtract(g, a):
    """The unique a2 with g + a2 = a."""
    for i, ((eg, cg), (ea, ca)) in enumerate(zip(g.cnf, a.cnf)):
        d = _cmp(eg, ea)
        if d > 0 or d == 0 and cg > ca:
            raise Underflow(f"{g} > {a}")
        if d < 0:
            return Ordinal(a.cnf[i:])
        if cg < ca:
            return Ordinal(((ea, ca - cg),) + a.cnf[i + 1:])
    if len(g.cnf) > len(a.cnf):
        raise Underflow(f"{g} > {a}")
    return Ordinal(a.cnf[len(g.cnf):])


def cofinality(a):
    if not a.cnf:
        return Cofinality.Zero
    return Cofinality.One if a.is_successor() else Cofinality.Omega


def omega_times(e):
    """The ordinal ω·e (left multiplication by ω)."""
    return Ordinal(tuple((ONE + f, d) for f, d in e.cnf))


def terms_of(a):
    """The atoms of a: ω^e repeated c times for each CNF pair, left to right."""
    for e, c in a.cnf:
        for _ in range(c):
            yield e
