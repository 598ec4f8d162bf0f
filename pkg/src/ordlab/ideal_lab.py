"""Finite smallness families: downward-closed proper families of subsets.

Sets are handled internally as bitmasks over the sorted domain; the public
API speaks frozensets of integer atoms.
"""

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Any

import networkx as nx

from .errors import BudgetError, InputError


class NotDownwardClosed(InputError):
    pass


class NotProper(InputError):
    pass


class MalformedFamily(InputError):
    pass


class RestrictedToSmallSet(InputError):
    pass


class SearchBudgetExceeded(BudgetError):
    pass


INFINITE = "Infinite"

DEFAULT_DOMAIN_CAP = 8
DEFAULT_LAM_CAP = 6
DEFAULT_SEARCH_CAP = 2_000_000
DEFAULT_PRODUCT_CAP = 4096


@dataclass(frozen=True)
class SmallnessFamily:
    domain: frozenset
    members: frozenset

    def __post_init__(self):
        dom = frozenset(self.domain)
        mem = frozenset(frozenset(m) for m in self.members)
        object.__setattr__(self, "domain", dom)
        object.__setattr__(self, "members", mem)
        _validate(dom, mem)

    def __contains__(self, subset):
        return frozenset(subset) in self.members

    def atoms(self):
        return sorted(self.domain)

    def maximal_members(self):
        return sorted(
            (m for m in self.members if not any(m < n for n in self.members)),
            key=lambda s: (len(s), sorted(s)),
        )

    def to_json(self):
        return {
            "domain": self.atoms(),
            "members": [sorted(m) for m in sorted(self.members, key=lambda s: (len(s), sorted(s)))],
        }


def _validate(domain, members):
    if not domain:
        raise MalformedFamily("domain must be non-empty")
    for m in members:
        if not m <= domain:
            raise MalformedFamily(f"member {sorted(m)} is not a subset of the domain", witness=sorted(m))
    if frozenset() not in members:
        raise NotDownwardClosed("the empty set is not a member", witness=[])
    if domain in members:
        raise NotProper("the domain itself is a member", witness=sorted(domain))
    for m in members:
        for x in m:
            if m - {x} not in members:
                raise NotDownwardClosed(
                    f"{sorted(m - {x})} is a subset of member {sorted(m)} but not a member",
                    witness={"member": sorted(m), "missing": sorted(m - {x})},
                )


def family_from_generators(domain, generators):
    """Close a list of generator sets downward."""
    members = {frozenset()}
    for g in generators:
        g = sorted(g)
        for r in range(len(g) + 1):
            members.update(frozenset(c) for c in combinations(g, r))
    return SmallnessFamily(frozenset(domain), frozenset(members))


def size_at_most(domain, k):
    """All subsets of the domain with at most k atoms."""
    dom = sorted(domain)
    return SmallnessFamily(
        frozenset(dom),
        frozenset(frozenset(c) for r in range(k + 1) for c in combinations(dom, r)),
    )


def trivial_family(domain):
    """The family whose only member is the empty set."""
    return SmallnessFamily(frozenset(domain), frozenset({frozenset()}))


def family_from_json(obj):
    if not isinstance(obj, dict) or "domain" not in obj:
        raise MalformedFamily("family JSON needs a 'domain' array")
    domain = obj["domain"]
    if "generators" in obj:
        return family_from_generators(domain, obj["generators"])
    if "members" not in obj:
        raise MalformedFamily("family JSON needs 'members' or 'generators'")
    return SmallnessFamily(frozenset(domain), frozenset(frozenset(m) for m in obj["members"]))


# -- bitmask plumbing ------------------------------------------------------


class _Masks:
    def __init__(self, fam):
        self.atoms = fam.atoms()
        self.bit = {a: 1 << i for i, a in enumerate(self.atoms)}
        self.full = (1 << len(self.atoms)) - 1
        self.members = {self.mask(m) for m in fam.members}
        self.maximal = [self.mask(m) for m in fam.maximal_members()]

    def mask(self, s):
        out = 0
        for a in s:
            out |= self.bit[a]
        return out

    def unmask(self, m):
        return frozenset(a for a in self.atoms if m & self.bit[a])


def _bits(m):
    out = []
    while m:
        low = m & -m
        out.append(low)
        m ^= low
    return out


# -- reports -----------------------------------------------------------------


@dataclass
class IdealReport:
    is_union_closed: bool
    contains_all_singletons: bool
    completeness: Any
    covering_number: Any

    def to_json(self):
        return dict(self.__dict__)


def check_family(raw):
    """Validate a family (raw JSON dict or SmallnessFamily) and report its flags."""
    fam = raw if isinstance(raw, SmallnessFamily) else family_from_json(raw)
    mk = _Masks(fam)
    union_closed = all((a | b) in mk.members for a in mk.maximal for b in mk.maximal)
    singletons = all(mk.bit[a] in mk.members for a in mk.atoms)
    return IdealReport(
        is_union_closed=union_closed,
        contains_all_singletons=singletons,
        completeness=completeness(fam),
        covering_number=covering_number(fam),
    )


def completeness(fam):
    """Largest k such that every union of fewer than k members is a member.

    Unions of at most one member are always members, so the answer is at
    least 2.  If every pairwise union is a member then, by induction, so is
    every finite union, and the family is closed under all unions.
    """
    mk = _Masks(fam)
    members = sorted(mk.members)
    for i, a in enumerate(members):
        for b in members[i + 1:]:
            if (a | b) not in mk.members:
                return 2
    return INFINITE


def covering_number(fam):
    """Least number of members whose union is the domain."""
    mk = _Masks(fam)
    frontier = {0}
    seen = {0}
    steps = 0
    while frontier:
        steps += 1
        nxt = set()
        for s in frontier:
            for m in mk.maximal:
                u = s | m
                if u == mk.full:
                    return steps
                if u not in seen:
                    seen.add(u)
                    nxt.add(u)
        frontier = nxt
    return INFINITE


def restrict(fam, subset):
    subset = frozenset(subset)
    if not subset <= fam.domain:
        raise MalformedFamily("restriction set must lie inside the domain", witness=sorted(subset - fam.domain))
    if subset in fam.members:
        raise RestrictedToSmallSet(f"{sorted(subset)} is a member", witness=sorted(subset))
    return SmallnessFamily(subset, frozenset(m for m in fam.members if m <= subset))


# -- indecomposability -------------------------------------------------------


@dataclass
class Check:
    holds: bool
    witness: Any = None

    def __bool__(self):
        return self.holds


def _partitions_into(items, k):
    """Set partitions of a list of bit masks into exactly k nonempty blocks."""
    n = len(items)
    if k > n or k < 1:
        return

    def rec(i, blocks):
        remaining = n - i
        if len(blocks) + remaining < k:
            return
        if i == n:
            if len(blocks) == k:
                yield list(blocks)
            return
        x = items[i]
        for j in range(len(blocks)):
            blocks[j] |= x
            yield from rec(i + 1, blocks)
            blocks[j] ^= x
        if len(blocks) < k:
            blocks.append(x)
            yield from rec(i + 1, blocks)
            blocks.pop()

    yield from rec(0, [])


def _check_caps(fam, lam, domain_cap, lam_cap):
    if lam < 1:
        raise InputError(f"lam must be positive, got {lam}")
    if len(fam.domain) > domain_cap:
        raise SearchBudgetExceeded(f"domain size {len(fam.domain)} exceeds cap {domain_cap}")
    if lam > lam_cap and lam <= len(fam.domain):
        raise SearchBudgetExceeded(f"lam {lam} exceeds cap {lam_cap}")


def is_indecomposable(fam, lam, domain_cap=DEFAULT_DOMAIN_CAP, lam_cap=DEFAULT_LAM_CAP):
    """Every positive set, cut into lam labelled pieces, has a small-index union outside the family.

    A failing labelling h must be onto (an empty fibre leaves the whole
    positive set as a union of fewer than lam fibres), and by downward
    closure it is enough to test the unions that omit exactly one fibre.
    """
    _check_caps(fam, lam, domain_cap, lam_cap)
    mk = _Masks(fam)
    for a in range(mk.full + 1):
        if a in mk.members:
            continue
        for blocks in _partitions_into(_bits(a), lam):
            if all((a & ~b) in mk.members for b in blocks):
                h = {}
                for v, b in enumerate(blocks):
                    for x in mk.unmask(b):
                        h[x] = v
                return Check(False, {"A": sorted(mk.unmask(a)), "h": dict(sorted(h.items()))})
    return Check(True)


def is_strongly_indecomposable(fam, lam, domain_cap=DEFAULT_DOMAIN_CAP, lam_cap=DEFAULT_LAM_CAP,
                               search_cap=DEFAULT_SEARCH_CAP):
    """No lam members can jointly cover every small subset of a positive set.

    Only subsets of size exactly lam - 1 need checking once the positive set
    has at least lam atoms; a smaller positive set is its own uncovered subset.
    """
    _check_caps(fam, lam, domain_cap, lam_cap)
    mk = _Masks(fam)
    budget = search_cap
    for a in range(mk.full + 1):
        if a in mk.members:
            continue
        atoms = _bits(a)
        if len(atoms) < lam:
            continue
        targets = [sum(c) for c in combinations(atoms, lam - 1)]
        traces = {m & a for m in mk.maximal}
        traces = [t for t in traces if not any(t != u and t & u == t for u in traces)]
        for r in range(1, min(lam, len(traces)) + 1):
            for chosen in combinations(sorted(traces), r):
                budget -= 1
                if budget < 0:
                    raise SearchBudgetExceeded("strong indecomposability search exceeded its cap")
                if all(any(t & c == t for c in chosen) for t in targets):
                    pieces = [sorted(mk.unmask(c)) for c in chosen]
                    pieces += [pieces[-1]] * (lam - len(pieces))
                    return Check(False, {"A": sorted(mk.unmask(a)), "members": pieces})
    return Check(True)


# -- the T invariant -------------------------------------------------------------


class TBudgetExceeded(BudgetError):
    pass


def t_invariant(fam, f, variant="AsWritten", cap=DEFAULT_PRODUCT_CAP):
    """Largest family of choice functions in the product of f, pairwise compatible.

    AsWritten: every two distinct functions differ on a member of the family.
    DifferModI: every two distinct functions agree on a member of the family.
    """
    if variant not in ("AsWritten", "DifferModI"):
        raise InputError(f"unknown variant {variant!r}")
    atoms = fam.atoms()
    sizes = []
    for a in atoms:
        v = f.get(a)
        if not isinstance(v, int) or v < 1:
            raise InputError(f"f must map every atom to a positive integer; atom {a} has {v!r}")
        sizes.append(v)
    total = 1
    for s in sizes:
        total *= s
    if total > cap:
        raise TBudgetExceeded(f"product of f-values {total} exceeds cap {cap}")
    mk = _Masks(fam)
    funcs = list(product(*[range(s) for s in sizes]))
    graph = nx.Graph()
    graph.add_nodes_from(range(len(funcs)))
    for i, h in enumerate(funcs):
        for j in range(i + 1, len(funcs)):
            g = funcs[j]
            differ = 0
            for k, (x, y) in enumerate(zip(h, g)):
                if x != y:
                    differ |= 1 << k
            key = differ if variant == "AsWritten" else mk.full & ~differ
            if key in mk.members:
                graph.add_edge(i, j)
    clique, size = nx.max_weight_clique(graph, weight=None)
    return size
