import random
from itertools import chain, combinations, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ordlab.ideal_lab import covering_number, family_from_json, size_at_most, trivial_family
from ordlab.tagged_tree import (Relation, TaggedTree, Tree, compare_trees, complete_tree, tag_all_size_at_most,
                                tag_all_trivial)
from ordlab.tree_games import (PLAYER_I, PLAYER_II, Counterexample, Homogeneous, LevelResult, NoBoundAchievable,
                               NoIndexWins, Rules, bound_homogenize, check_strategy, colouring_from_json,
                               cover_homogenize, homogenize, level_homogenize, minimax, solve_game, verify_bound,
                               verify_counterexample, verify_cover, verify_homogeneous, verify_level)


def subsets(xs):
    xs = sorted(xs)
    return [frozenset(c) for c in chain.from_iterable(combinations(xs, r) for r in range(len(xs) + 1))]


def game_value(tt, wins, node=()):
    """Player I's value by enumerating every small set of II and every reply of I."""
    succ = tt.tree.succ_indices(node)
    if not succ:
        return wins(node)
    tag = tt.tags.get(node)
    moves = [m for m in tag.members if m <= frozenset(succ)] if tag is not None else [frozenset()]
    splitting = tt.is_splitting(node)
    for small in moves:
        replies = [s for s in succ if not (splitting and s in small)]
        if not any(game_value(tt, wins, node + (s,)) for s in replies):
            return False
    return True


def random_tagged(rng, max_branch=3, depth=3):
    nodes = {()}
    layer = [()]
    for _ in range(depth):
        nxt = []
        for n in layer:
            for i in range(rng.randint(1, max_branch)):
                nodes.add(n + (i,))
                nxt.append(n + (i,))
        layer = nxt
    tree = Tree(nodes)
    tags = {}
    for n in tree.nodes:
        succ = tree.succ_indices(n)
        if succ and rng.random() < 0.85:
            tags[n] = size_at_most(succ, rng.randint(0, len(succ) - 1))
    return TaggedTree(tree, tags)


def random_colouring(rng, tt, colours):
    return {leaf: rng.randrange(colours) for leaf in tt.tree.leaves()}


# -- solve_game ----------------------------------------------------------------------------------------


def test_solve_game_trivial_targets():
    tt = tag_all_size_at_most(complete_tree(3, 2), 1)
    assert solve_game(tt, tt.tree.leaves()).winner == PLAYER_I
    assert solve_game(tt, []).winner == PLAYER_II


def test_solve_game_small_binary():
    tree = complete_tree(2, 2)
    half0 = family_from_json({"domain": [0, 1], "members": [[], [0]]})
    half1 = family_from_json({"domain": [0, 1], "members": [[], [1]]})
    tt = TaggedTree(tree, {(): half0, (0,): half1, (1,): half1})
    for leaf in tree.leaves():
        res = solve_game(tt, [leaf])
        expected = game_value(tt, lambda n: n == leaf)
        assert (res.winner == PLAYER_I) == expected
        assert check_strategy(tt, Rules(leaf_wins=lambda n: n == leaf), res.strategy) is None


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_determinacy_and_strategy_replay(seed):
    rng = random.Random(seed)
    tt = random_tagged(rng)
    target = [leaf for leaf in tt.tree.leaves() if rng.random() < 0.5]
    res = solve_game(tt, target)
    tset = set(target)
    rules = Rules(leaf_wins=tset.__contains__)
    expected = game_value(tt, tset.__contains__)
    assert (res.winner == PLAYER_I) == expected == minimax(tt, rules)
    assert check_strategy(tt, rules, res.strategy) is None


# -- homogenize -----------------------------------------------------------------------------------------------


def test_trivial_tags_give_a_single_branch():
    rng = random.Random(7)
    tt = tag_all_trivial(complete_tree(3, 3))
    col = random_colouring(rng, tt, 3)
    res = homogenize(tt, col, 3)
    assert isinstance(res, Homogeneous)
    assert len(res.subtree.tree.leaves()) == 1
    assert res.colour == min(col.values())
    assert verify_homogeneous(tt, col, res) is None


def test_branching_four_sample_is_homogeneous():
    tt = tag_all_size_at_most(complete_tree(4, 2), 1)
    rng = random.Random(3)
    for _ in range(200):
        col = random_colouring(rng, tt, 2)
        res = homogenize(tt, col, 2)
        assert isinstance(res, Homogeneous)
        assert verify_homogeneous(tt, col, res) is None
        for n in res.subtree.tree.nodes:
            if res.subtree.tree.succ_indices(n):
                assert len(res.subtree.tree.succ_indices(n)) >= 2


def test_parity_colouring_gives_a_counterexample():
    tt = tag_all_size_at_most(complete_tree(2, 2), 1)
    col = {leaf: sum(leaf) % 2 for leaf in tt.tree.leaves()}
    assert not any(game_value(tt, lambda n, c=c: col[n] == c) for c in (0, 1))
    res = homogenize(tt, col, 2)
    assert isinstance(res, Counterexample)
    assert res.failure_report["covering_number"] == 2 <= 2
    assert verify_counterexample(tt, col, res) is None


def test_colouring_json():
    col, count = colouring_from_json({"leaves": [{"node": [0, 1], "colour": 2}], "colour_count": 3})
    assert col == {(0, 1): 2} and count == 3


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_homogenize_is_sound(seed, colours):
    rng = random.Random(seed)
    tt = random_tagged(rng)
    col = random_colouring(rng, tt, colours)
    res = homogenize(tt, col, colours)
    some_colour_wins = any(game_value(tt, lambda n, c=c: col[n] == c) for c in range(colours))
    assert isinstance(res, Homogeneous) == some_colour_wins
    if isinstance(res, Homogeneous):
        assert verify_homogeneous(tt, col, res) is None
    else:
        assert verify_counterexample(tt, col, res) is None


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_large_covering_numbers_force_homogeneity(seed, colours):
    rng = random.Random(seed)
    branch = rng.randint(1, 4)
    depth = rng.randint(1, 3)
    tree = complete_tree(branch, depth)
    tags = {}
    for n in tree.nodes:
        succ = tree.succ_indices(n)
        if succ:
            k = max(0, (len(succ) - 1) // colours) if rng.random() < 0.5 else 0
            tags[n] = size_at_most(succ, k)
    tt = TaggedTree(tree, tags)
    if not all(covering_number(tt.tags[n]) == "Infinite" or covering_number(tt.tags[n]) > colours
               for n in tt.splitting()):
        return
    col = random_colouring(rng, tt, colours)
    res = homogenize(tt, col, colours)
    assert isinstance(res, Homogeneous)
    assert verify_homogeneous(tt, col, res) is None


# -- level homogenization ------------------------------------------------------------------------------------


def test_level_examples():
    trivial = tag_all_trivial(complete_tree(3, 2))
    assert level_homogenize(trivial, {n: 0 for n in trivial.nodes}).subtree.nodes == trivial.nodes
    tt = tag_all_size_at_most(complete_tree(3, 2), 1)
    const = {n: 5 for n in tt.nodes}
    res = level_homogenize(tt, const)
    assert isinstance(res, LevelResult) and set(res.level_colours) == {5}
    assert res.subtree.nodes == tt.nodes
    assert verify_level(tt, const, res) is None
    depth = {n: len(n) for n in tt.nodes}
    res = level_homogenize(tt, depth)
    assert res.level_colours == [0, 1, 2]
    assert res.subtree.nodes == tt.nodes
    assert verify_level(tt, depth, res) is None


def test_level_branching_four_sample():
    tt = tag_all_size_at_most(complete_tree(4, 2), 1)
    rng = random.Random(11)
    for _ in range(100):
        g = {n: rng.randrange(2) for n in tt.nodes}
        res = level_homogenize(tt, g)
        seqs = {tuple(g[leaf[:k]] for k in range(3)) for leaf in tt.tree.leaves()}
        palette = sorted(seqs)
        exists = any(game_value(tt, lambda n, s=s: tuple(g[n[:k]] for k in range(3)) == s) for s in palette)
        assert isinstance(res, LevelResult) == exists
        if isinstance(res, LevelResult):
            assert verify_level(tt, g, res) is None


# -- bounded labels -----------------------------------------------------------------------------------------


def brute_least_bound(tt, labels, mu):
    """Least alpha admitting a full subtree, found by trying every kept successor set at every node."""
    def feasible(n, alpha):
        if labels[n] >= alpha:
            return False
        succ = tt.tree.succ_indices(n)
        if not succ:
            return True
        for kept in subsets(succ):
            if not kept:
                continue
            if len(succ) < mu and kept != frozenset(succ):
                continue
            if tt.is_splitting(n) and kept in tt.tags[n].members:
                continue
            if all(feasible(n + (i,), alpha) for i in kept):
                return True
        return False

    for alpha in range(labels[()] + 1, max(labels.values()) + 2):
        if feasible((), alpha):
            return alpha
    return None


def test_bound_examples():
    tt = tag_all_size_at_most(complete_tree(3, 2), 1)
    zero = {n: 0 for n in tt.nodes}
    res = bound_homogenize(tt, zero, 3)
    assert res.bound == 1 and verify_bound(tt, zero, 3, res) is None
    assert res.subtree.nodes == tt.nodes
    depth = {n: len(n) for n in tt.nodes}
    res = bound_homogenize(tt, depth, 3)
    assert res.bound == 3 and verify_bound(tt, depth, 3, res) is None


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_bound_matches_exhaustive_search(seed):
    rng = random.Random(seed)
    tt = random_tagged(rng, max_branch=3, depth=2 + rng.randint(0, 1))
    if len(tt.nodes) > 40:
        return
    labels = {n: rng.randint(0, 5) for n in tt.nodes}
    expected = brute_least_bound(tt, labels, 3)
    try:
        res = bound_homogenize(tt, labels, 3)
    except NoBoundAchievable:
        assert expected is None
        return
    assert res.bound == expected
    assert verify_bound(tt, labels, 3, res) is None


# -- covers ------------------------------------------------------------------------------------------------------


def brute_cover_ok(tt, leaves):
    def ok(n):
        succ = tt.tree.succ_indices(n)
        if not succ:
            return n in leaves
        for kept in subsets(succ):
            if not kept:
                continue
            if not tt.is_splitting(n) and kept != frozenset(succ):
                continue
            if tt.is_splitting(n) and kept in tt.tags[n].members:
                continue
            if all(ok(n + (i,)) for i in kept):
                return True
        return False
    return ok(())


def test_cover_everything():
    tt = tag_all_size_at_most(complete_tree(3, 2), 1)
    res = cover_homogenize(tt, [[tt.tree.leaves()]])
    assert (res.i, res.eps) == (0, 0)
    assert res.subtree.nodes == tt.nodes
    assert verify_cover(tt, [[tt.tree.leaves()]], res) is None


def test_cover_two_colour_classes_agree_with_homogenize():
    tt = tag_all_size_at_most(complete_tree(3, 2), 1)
    rng = random.Random(5)
    for _ in range(100):
        col = random_colouring(rng, tt, 2)
        cover = [[[l for l in tt.tree.leaves() if col[l] == c]] for c in (0, 1)]
        hom = homogenize(tt, col, 2)
        try:
            res = cover_homogenize(tt, cover)
        except NoIndexWins:
            assert isinstance(hom, Counterexample)
            continue
        assert isinstance(hom, Homogeneous) and res.i == hom.colour
        assert verify_cover(tt, cover, res) is None


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_cover_chain_least_eps(seed):
    rng = random.Random(seed)
    tt = random_tagged(rng, max_branch=3, depth=2)
    leaves = tt.tree.leaves()
    top = max(sum(l) for l in leaves)
    row = [[l for l in leaves if sum(l) <= e] for e in range(top + 1)]
    res = cover_homogenize(tt, [row])
    expected = next(e for e in range(top + 1) if brute_cover_ok(tt, set(map(tuple, row[e]))))
    assert res.eps == expected
    assert verify_cover(tt, [row], res) is None
    assert compare_trees(tt, res.subtree).relation is Relation.LEOtimes
