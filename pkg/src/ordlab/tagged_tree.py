"""Finite trees of integer sequences with smallness tags on their nodes.

Nodes are tuples of non-negative integers.  A tag at a node is a
SmallnessFamily whose domain contains the node's successor indices; the
node splits when its full successor-index set is not a member of the tag.
"""

from dataclasses import dataclass, field
from enum import IntEnum
from itertools import product

from .errors import InputError
from .ideal_lab import SmallnessFamily, family_from_json, size_at_most, trivial_family
from .ordinal import Ordinal


class InvalidTree(InputError):
    pass


class InvalidTags(InputError):
    pass


class NotAFront(InputError):
    pass


class NotAntichain(InputError):
    pass


class RefinementViolation(InputError):
    pass


class Tree:
    """A finite prefix-closed set of integer tuples containing the root ()."""

    def __init__(self, nodes):
        nodes = frozenset(tuple(n) for n in nodes)
        if () not in nodes:
            raise InvalidTree("the empty sequence must be a node", witness=[])
        children = {n: [] for n in nodes}
        for n in nodes:
            if any(not isinstance(i, int) or i < 0 for i in n):
                raise InvalidTree(f"node {list(n)} has a non-natural entry", witness=list(n))
            if n:
                parent = n[:-1]
                if parent not in nodes:
                    raise InvalidTree(f"node {list(n)} lacks its parent", witness=list(n))
                children[parent].append(n[-1])
        self.nodes = nodes
        self._succ = {n: tuple(sorted(c)) for n, c in children.items()}

    def __contains__(self, node):
        return tuple(node) in self.nodes

    def __eq__(self, other):
        return isinstance(other, Tree) and self.nodes == other.nodes

    def __hash__(self):
        return hash(self.nodes)

    def __len__(self):
        return len(self.nodes)

    def succ_indices(self, node):
        return self._succ[tuple(node)]

    def successors(self, node):
        node = tuple(node)
        return [node + (i,) for i in self._succ[node]]

    def is_leaf(self, node):
        return not self._succ[tuple(node)]

    def leaves(self):
        return sorted(n for n in self.nodes if not self._succ[n])

    def sorted_nodes(self):
        return sorted(self.nodes, key=lambda n: (len(n), n))

    def subtree_at(self, node):
        """Nodes comparable with node: its prefixes and its extensions."""
        node = tuple(node)
        k = len(node)
        return frozenset(n for n in self.nodes if n[:k] == node or node[:len(n)] == n)

    def to_json(self):
        return {"nodes": [list(n) for n in self.sorted_nodes()]}


def is_prefix(a, b):
    """a is an initial segment of b (possibly equal)."""
    return len(a) <= len(b) and b[:len(a)] == a


def complete_tree(branching, depth):
    nodes = [()]
    layer = [()]
    for _ in range(depth):
        layer = [n + (i,) for n in layer for i in range(branching)]
        nodes.extend(layer)
    return Tree(nodes)


@dataclass
class TaggedTree:
    tree: Tree
    tags: dict = field(default_factory=dict)

    def __post_init__(self):
        self.tags = {tuple(k): v for k, v in self.tags.items()}
        for node, fam in self.tags.items():
            if node not in self.tree.nodes:
                raise InvalidTags(f"tag on missing node {list(node)}", witness=list(node))
            if not isinstance(fam, SmallnessFamily):
                raise InvalidTags(f"tag at {list(node)} is not a smallness family", witness=list(node))
            missing = set(self.tree.succ_indices(node)) - fam.domain
            if missing:
                raise InvalidTags(
                    f"tag at {list(node)} does not cover successor indices {sorted(missing)}",
                    witness=list(node),
                )
        self._split = frozenset(
            n for n, fam in self.tags.items() if frozenset(self.tree.succ_indices(n)) not in fam.members
        )

    @property
    def nodes(self):
        return self.tree.nodes

    def tag(self, node):
        return self.tags.get(tuple(node))

    def is_splitting(self, node):
        return tuple(node) in self._split

    def splitting(self):
        return self._split

    def normal_form(self):
        """Tags restricted to exact successor sets; tags on non-splitting nodes dropped.

        A tag whose successor set is small cannot be restricted to that set
        and stay proper, and dropping it changes no splitting point.
        """
        tags = {}
        for n in self._split:
            fam = self.tags[n]
            succ = frozenset(self.tree.succ_indices(n))
            tags[n] = SmallnessFamily(succ, frozenset(m for m in fam.members if m <= succ))
        return TaggedTree(self.tree, tags)

    def prune_to(self, nodes):
        """The subtree on the given prefix-closed node set, tags restricted to it.

        Tags are kept where the kept successor set is still positive, in
        normal form over the kept successor indices.
        """
        sub = Tree(nodes)
        tags = {}
        for n in sub.nodes:
            fam = self.tags.get(n)
            if fam is None:
                continue
            succ = frozenset(sub.succ_indices(n))
            members = frozenset(m for m in fam.members if m <= succ)
            if succ and succ not in members:
                tags[n] = SmallnessFamily(succ, members)
        return TaggedTree(sub, tags)

    def to_json(self):
        out = self.tree.to_json()
        out["tags"] = [{"node": list(n), "family": self.tags[n].to_json()} for n in sorted(self.tags)]
        return out


def tagged_tree_from_json(obj):
    if not isinstance(obj, dict) or not isinstance(obj.get("nodes"), list):
        raise InvalidTree("tree JSON needs a 'nodes' array")
    tree = Tree(tuple(n) for n in obj["nodes"])
    tags = {}
    for entry in obj.get("tags", []):
        tags[tuple(entry["node"])] = family_from_json(entry["family"])
    return TaggedTree(tree, tags)


def uniform_tags(tree, make_family):
    """Tag every internal node with make_family(successor indices)."""
    return TaggedTree(tree, {n: make_family(tree.succ_indices(n)) for n in tree.nodes if not tree.is_leaf(n)})


def tag_all_trivial(tree):
    return uniform_tags(tree, trivial_family)


def tag_all_size_at_most(tree, k):
    return uniform_tags(tree, lambda succ: size_at_most(succ, k))


def splitting_points(tt):
    return set(tt.splitting())


# -- tree orders -----------------------------------------------------------------


class Relation(IntEnum):
    NotLE = 0
    LE = 1
    LEStar = 2
    LEOtimes = 3


@dataclass
class Comparison:
    relation: Relation
    le_mu: bool = None
    reason: str = ""


def _restricted(fam, succ):
    return frozenset(m for m in fam.members if m <= succ)


def compare_trees(t1, t2, mu=None):
    """Strongest order with t1 below t2 (t2 is the smaller, pruned tree)."""
    if not t2.nodes <= t1.nodes:
        return Comparison(Relation.NotLE, False if mu is not None else None, "nodes of the second tree are not all in the first")
    split1, split2 = t1.splitting(), t2.splitting()
    if not split2 <= split1:
        bad = sorted(split2 - split1)[0]
        return Comparison(Relation.NotLE, False if mu is not None else None, f"{list(bad)} splits only in the second tree")
    for n in split2:
        succ = frozenset(t2.tree.succ_indices(n))
        if _restricted(t2.tags[n], succ) != _restricted(t1.tags[n], succ):
            return Comparison(Relation.NotLE, False if mu is not None else None, f"tags disagree at {list(n)}")
    star = split2 == split1 & t2.nodes
    le_mu = None
    if mu is not None:
        le_mu = star and all(
            t2.tree.succ_indices(n) == t1.tree.succ_indices(n)
            for n in t2.nodes
            if len(t1.tree.succ_indices(n)) < mu
        )
    if not star:
        return Comparison(Relation.LE, le_mu, "a splitting point of the first tree is not splitting in the second")
    full = all(t2.tree.succ_indices(n) == t1.tree.succ_indices(n) for n in t2.nodes - split1)
    if not full:
        return Comparison(Relation.LEStar, le_mu, "a non-splitting node lost successors")
    return Comparison(Relation.LEOtimes, le_mu)


# -- fronts ------------------------------------------------------------------------


@dataclass
class FrontWitness:
    front: frozenset
    depth_fn: dict


def _covered(node, aset):
    return any(node[:k] in aset for k in range(len(node) + 1))


def contains_front(tree, aset):
    aset = frozenset(tuple(a) for a in aset)
    return all(_covered(leaf, aset) for leaf in tree.leaves())


def front_witness(tree, aset):
    aset = frozenset(tuple(a) for a in aset)
    ordered = sorted(aset)
    for i, a in enumerate(ordered):
        for b in ordered[i + 1:]:
            if is_prefix(a, b) or is_prefix(b, a):
                raise NotAntichain(f"{list(a)} and {list(b)} are comparable", witness=[list(a), list(b)])
    for leaf in tree.leaves():
        if not _covered(leaf, aset):
            raise NotAFront(f"maximal node {list(leaf)} misses the set", witness=list(leaf))
    depth = {}
    for n in sorted(tree.nodes, key=len, reverse=True):
        if _covered(n, aset):
            depth[n] = 0
        else:
            depth[n] = 1 + max(depth[c] for c in tree.successors(n))
    return FrontWitness(aset, depth)


def check_depth_fn(tree, aset, depth):
    """First violation of the descent inequality, or None."""
    aset = frozenset(tuple(a) for a in aset)
    for eta in tree.nodes:
        if _covered(eta, aset):
            continue
        for nu in tree.nodes:
            if len(nu) > len(eta) and nu[:len(eta)] == eta and not depth[eta] > depth[nu]:
                return (eta, nu)
    return None


# -- depth rank --------------------------------------------------------------------


def dp_rank(tt, P=None, mode="Strict"):
    """Largest alpha with Dp_alpha at every node, as Ordinals.

    Dp_0 holds everywhere.  Dp_{k+1}(eta) holds when Dp_k(eta) holds and
    every set A in P[eta] contains a splitting node nu, a proper extension of
    eta (Strict) or eta itself (Reflexive), whose successors satisfying
    Dp_k form a positive set for nu's tag.
    """
    if mode not in ("Strict", "Reflexive"):
        raise InputError(f"unknown mode {mode!r}")
    tree = tt.tree
    if P is None:
        P = {n: [tree.subtree_at(n)] for n in tree.nodes}
    else:
        P = {tuple(k): [frozenset(tuple(x) for x in a) for a in v] for k, v in P.items()}
        for n in tree.nodes:
            if not P.get(n):
                raise InputError(f"P has no sets at node {list(n)}", witness=list(n))
        _check_refinement(tree, P)
    split = tt.splitting()
    candidates = {}
    for n in tree.nodes:
        per_set = []
        for a in P[n]:
            if mode == "Strict":
                nus = [v for v in a if v in split and len(v) > len(n) and v[:len(n)] == n]
            else:
                nus = [n] if n in a and n in split else []
            per_set.append(nus)
        candidates[n] = per_set

    alive = set(tree.nodes)
    rank = {n: 0 for n in tree.nodes}
    k = 0
    while alive:
        nxt = set()
        for n in alive:
            ok = True
            for nus in candidates[n]:
                if not any(_positive_alive(tt, v, alive) for v in nus):
                    ok = False
                    break
            if ok:
                nxt.add(n)
        k += 1
        for n in nxt:
            rank[n] = k
        if nxt == alive:
            raise InputError("depth rank does not stabilise; a node has unbounded depth")
        alive = nxt
    return {n: Ordinal.of(r) for n, r in rank.items()}


def _positive_alive(tt, nu, alive):
    kept = frozenset(i for i in tt.tree.succ_indices(nu) if nu + (i,) in alive)
    return kept not in tt.tags[nu].members


def _check_refinement(tree, P):
    for eta in tree.nodes:
        for nu in tree.nodes:
            if len(nu) > len(eta) and nu[:len(eta)] == eta:
                for a in P[eta]:
                    if not any(b <= a for b in P[nu]):
                        raise RefinementViolation(
                            f"no set of P at {list(nu)} lies inside a set of P at {list(eta)}",
                            witness={"eta": list(eta), "nu": list(nu), "A": sorted(map(list, a))},
                        )
