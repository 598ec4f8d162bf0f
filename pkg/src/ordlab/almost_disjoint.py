"""Almost-disjoint families of sets of naturals, inspected up to a bound.

Every set is strictly increasing and presented lazily.  Intersections are
only ever computed below the family's inspection bound, so almost
disjointness is a certified statement about that initial segment.
"""

from dataclasses import dataclass, field
from itertools import count
from typing import Callable, Optional

from .errors import BudgetError, InputError


class HorizonExhausted(BudgetError):
    pass


class UncertifiedIntersection(InputError):
    pass


class MalformedFamily(InputError):
    pass


class LazySet:
    """A strictly increasing set of naturals given by its k-th element."""

    def __init__(self, nth: Optional[Callable[[int], int]] = None, values=None, name=""):
        if (nth is None) == (values is None):
            raise ValueError("give exactly one of nth and values")
        self.name = name
        self._nth = nth
        self._cache = list(values) if values is not None else []
        self.explicit = values is not None
        for a, b in zip(self._cache, self._cache[1:]):
            if a >= b:
                raise MalformedFamily(f"set {name!r} is not strictly increasing at {b}", witness=b)

    def enumerate(self, k):
        while len(self._cache) <= k:
            if self.explicit:
                raise HorizonExhausted(f"explicit set {self.name!r} has only {len(self._cache)} listed elements")
            x = self._nth(len(self._cache))
            if self._cache and x <= self._cache[-1]:
                raise MalformedFamily(f"set {self.name!r} is not strictly increasing at {x}", witness=x)
            self._cache.append(x)
        return self._cache[k]

    def below(self, bound):
        out = []
        for k in count():
            if self.explicit and k >= len(self._cache):
                break
            x = self.enumerate(k)
            if x >= bound:
                break
            out.append(x)
        return out


@dataclass
class ADFamily:
    sets: list
    inspection_bound: int
    _below: dict = field(default_factory=dict, repr=False)

    def __len__(self):
        return len(self.sets)

    def below(self, j):
        """Elements of set j under the inspection bound, as a frozenset."""
        if j not in self._below:
            self._below[j] = frozenset(self.sets[j].below(self.inspection_bound))
        return self._below[j]

    def overlaps(self):
        """Nonempty pairwise intersections under the bound, keyed by index pair."""
        out = {}
        for i in range(len(self.sets)):
            for j in range(i + 1, len(self.sets)):
                common = self.below(i) & self.below(j)
                if common:
                    out[(i, j)] = sorted(common)
        return out


# -- generators ---------------------------------------------------------------------------


def node_code(bits):
    """Index of a binary string in the length-then-lexicographic order: 2^len - 1 + value."""
    value = 0
    for b in bits:
        value = 2 * value + b
    return (1 << len(bits)) - 1 + value


def branch_set(sigma):
    """Codes of all initial segments of sigma followed by zeros forever."""
    sigma = tuple(sigma)
    return LazySet(lambda n: node_code(sigma[:n] + (0,) * max(0, n - len(sigma))),
                   name="".join(map(str, sigma)))


def branches(depth, bound=10_000):
    sigmas = [tuple((i >> (depth - 1 - k)) & 1 for k in range(depth)) for i in range(1 << depth)]
    return ADFamily([branch_set(s) for s in sigmas], bound)


def apmod(modulus, bound=10_000):
    return ADFamily([LazySet(lambda k, r=r: r + modulus * k, name=f"{r} mod {modulus}") for r in range(modulus)],
                    bound)


def explicit(sets, bound):
    out = []
    for i, values in enumerate(sets):
        if any(not isinstance(v, int) or v < 0 for v in values):
            raise MalformedFamily(f"set {i} must list non-negative integers", witness=f"/sets/{i}")
        if any(v >= bound for v in values):
            raise MalformedFamily(f"set {i} lists a value at or above the bound {bound}", witness=f"/sets/{i}")
        if any(a >= b for a, b in zip(values, values[1:])):
            raise MalformedFamily(f"set {i} is not strictly increasing", witness=f"/sets/{i}")
        out.append(LazySet(values=values, name=str(i)))
    return ADFamily(out, bound)


def family_from_json(obj):
    if not isinstance(obj, dict):
        raise MalformedFamily("family JSON must be an object", witness="/")
    bound = obj.get("bound", 10_000)
    if not isinstance(bound, int) or bound <= 0:
        raise MalformedFamily("bound must be a positive integer", witness="/bound")
    gen = obj.get("gen")
    if gen == "branches":
        return branches(int(obj["depth"]), bound)
    if gen == "apmod":
        return apmod(int(obj["modulus"]), bound)
    if gen is not None:
        raise MalformedFamily(f"unknown generator {gen!r}", witness="/gen")
    sets = obj.get("sets")
    if not isinstance(sets, list) or not all(isinstance(s, list) for s in sets):
        raise MalformedFamily("expected 'sets' as an array of arrays", witness="/sets")
    return explicit(sets, bound)


# -- diagonal extension -------------------------------------------------------------------------


@dataclass
class Extension:
    elements: list          # gamma_beta in the order beta = 0, 1, ...
    order: list
    overlap: dict           # order position beta -> earlier gammas lying in A_{j_beta}

    def sorted(self):
        return sorted(self.elements)


def ad_extend(F, order, emit):
    """Diagonal choice: gamma_beta is the least element of A_{j_beta} outside the earlier sets.

    Once order is used up, further elements must avoid every set of the
    family; a family that covers the naturals below the bound has none.
    """
    order = list(order)
    if sorted(set(order)) != sorted(order) or any(not 0 <= j < len(F) for j in order):
        raise InputError("order must list distinct family indices")
    covered = set()
    elements, overlap = [], {}
    for beta in range(emit):
        if beta < len(order):
            j = order[beta]
            pool = sorted(F.below(j))
            gamma = next((x for x in pool if x not in covered), None)
            if gamma is None:
                raise HorizonExhausted(
                    f"set {j} lies inside the earlier sets below {F.inspection_bound}",
                    lower_bound=beta,
                )
            overlap[beta] = sorted(x for x in elements if x in F.below(j))
            covered |= F.below(j)
        else:
            everything = covered | set().union(*(F.below(j) for j in range(len(F))))
            start = max(elements) + 1 if elements else 0
            gamma = next((x for x in range(start, F.inspection_bound) if x not in everything), None)
            if gamma is None:
                raise HorizonExhausted(
                    f"the family covers every number from {start} up to {F.inspection_bound}",
                    lower_bound=beta,
                )
        elements.append(gamma)
    return Extension(elements, order, overlap)


def verify_extension(F, ext):
    """Recount every intersection of the new set with each A_{j_beta}; first problem or None."""
    new = set(ext.elements)
    for beta, j in enumerate(ext.order[:len(ext.elements)]):
        meet = {x for x in F.below(j) if x in new}
        allowed = {ext.elements[beta]} | set(ext.overlap.get(beta, []))
        if not meet <= allowed:
            return {"beta": beta, "set": j, "extra": sorted(meet - allowed)}
        if ext.elements[beta] not in meet:
            return {"beta": beta, "set": j, "missing": ext.elements[beta]}
    return None


# -- disjointifying cuts -----------------------------------------------------------------------------


def disjointify(F):
    """g(j) = 1 + the largest number A_j shares with another set, or 0.

    Intersections are computed below the inspection bound.  A shared number in
    the upper half of the inspected range might not be the last one, so it is
    refused as uncertified.
    """
    bound = F.inspection_bound
    g = {}
    for j in range(len(F)):
        top = -1
        for k in range(len(F)):
            if k == j:
                continue
            common = F.below(j) & F.below(k)
            if common:
                m = max(common)
                if 2 * m >= bound:
                    raise UncertifiedIntersection(
                        f"sets {j} and {k} share {m}, too close to the bound {bound}",
                        witness={"sets": [j, k], "value": m},
                    )
                top = max(top, m)
        g[j] = top + 1
    return g


def tails_disjoint(F, g):
    """First pair of tails {x in A_j : x >= g(j)} that meet below the bound, or None."""
    tails = [{x for x in F.below(j) if x >= g[j]} for j in range(len(F))]
    for i in range(len(F)):
        for j in range(i + 1, len(F)):
            common = tails[i] & tails[j]
            if common:
                return {"sets": [i, j], "common": min(common)}
    return None


def cut_is_tight(F, g, j):
    """Lowering g(j) by one lets the tail of A_j meet some other set."""
    if g[j] == 0:
        return True
    x = g[j] - 1
    return x in F.below(j) and any(x in F.below(k) for k in range(len(F)) if k != j)
