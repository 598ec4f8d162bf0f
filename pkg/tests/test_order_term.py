import random
from fractions import Fraction
from itertools import islice

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ordlab.ordinal import OMEGA, ONE, ZERO, Ordinal, add
from ordlab.order_term import (CHARACTER_PAIRS, EMPTY, CapExceeded, Character, InvalidCut, InvalidPoint,
                               NotScattered, OmegaSum, One, Ord, Rev, Shuffle, Sum, brute_dp, canonical_colouring,
                               character_at, character_index, classify_cut, colour_of, compare_points,
                               enumerate_points, finite_realize, finite_size, is_finite, is_scattered, normalize,
                               reversed_colouring, rev, split, strip_colours, sum_of, swap_index, term_from_json,
                               term_to_json, top_case, dp)
from ordlab.order_term.rank import BudgetExceeded
from strategies import random_scattered_term, scattered_terms, shuffle_terms

W = Ord(OMEGA)
W1 = add(OMEGA, ONE)


def nat(n):
    return Ordinal.of(n)


def idx(left, right):
    return character_index((left, right))


def interval_rank(n):
    """Rank of an n-point order straight from the splitting definition."""
    memo = {0: 0}

    def r(m):
        if m not in memo:
            best = 1
            for k in range(1, m):
                best = max(best, 1 + min(r(k), r(m - k)))
            memo[m] = best
        return memo[m]
    return r(n)


CORPUS = [random_scattered_term(random.Random(s)) for s in range(200)]


# -- rank -----------------------------------------------------------------------------------------------


def test_dp_examples():
    assert dp(One()) == ONE
    assert dp(W) == OMEGA
    assert dp(Sum((Rev(W), W))) == W1
    assert dp(Ord(add(OMEGA, OMEGA))) == W1
    assert dp(sum_of(W, W)) == W1


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 7, 8, 31, 32, 63, 64])
def test_dp_finite_matches_splitting_definition(n):
    assert dp(Ord(nat(n))) == nat(interval_rank(n)) == nat(n.bit_length())
    assert brute_dp(n) == interval_rank(n)


def test_brute_dp_examples():
    assert [brute_dp(n) for n in (1, 2, 3, 4, 64)] == [1, 2, 2, 3, 7]


def test_dp_errors():
    with pytest.raises(NotScattered):
        dp(Sum((W, Shuffle(frozenset({0})))))
    with pytest.raises(BudgetExceeded) as e:
        dp(W, budget=nat(5))
    assert e.value.lower_bound is not None


@settings(max_examples=200, deadline=None)
@given(scattered_terms())
def test_dp_reversal_invariant(t):
    assert dp(rev(t)) == dp(t)


def test_dp_reversal_corpus():
    for t in CORPUS:
        assert dp(Rev(t)) == dp(t)


@settings(max_examples=200, deadline=None)
@given(scattered_terms())
def test_dp_monotone_on_interval_subterms(t):
    t = normalize(t)
    parts = []
    if isinstance(t, Sum):
        parts = list(t.args) + [Sum(t.args[:k]) for k in range(1, len(t.args))]
    elif isinstance(t, OmegaSum):
        parts = list(t.prefix) + [t.repeat]
    elif isinstance(t, Rev):
        parts = [t.arg]
    for s in parts:
        assert dp(s) <= dp(t)


@settings(max_examples=100, deadline=None)
@given(scattered_terms(), st.integers(1, 64))
def test_realized_rank_bounded_by_dp(t, n):
    order = finite_realize(t, n)
    assert nat(brute_dp(len(order))) <= dp(t)


def test_realized_rank_converges_on_finite_terms():
    for t in CORPUS:
        if is_finite(t) and 0 < finite_size(t) <= 64:
            assert nat(brute_dp(len(finite_realize(t, finite_size(t))))) == dp(t)


def test_brute_dp_monotone_under_suborder():
    for n in range(1, 65):
        assert brute_dp(n - 1) <= brute_dp(n)


# -- top-level shapes ------------------------------------------------------------------------------------


def test_top_case_hand_examples():
    assert top_case(One()).clauses == {"a", "b"}
    assert top_case(W).clauses == {"c"}
    assert top_case(Rev(W)).clauses == {"d"}
    assert top_case(Sum((Rev(W), W))).clauses == {"b", "c", "d"}
    assert top_case(Ord(add(OMEGA, OMEGA))).clauses == {"b", "c"}
    assert top_case(Ord(W1)).clauses == set()


def test_top_case_finite_terms_against_realized_orders():
    for n in range(1, 65):
        r = brute_dp(n)
        pivot = any(brute_dp(k) < r and brute_dp(n - 1 - k) < r for k in range(n))
        expected = {"b"} if pivot else set()
        if n == 1:
            expected.add("a")
        assert top_case(Ord(nat(n))).clauses == expected


def test_every_term_has_a_top_level_shape():
    missing = [t for t in CORPUS if not top_case(t).clauses]
    assert not missing, f"{len(missing)} corpus terms have none of the four shapes, e.g. {missing[0]!r}"


# -- scatteredness and term algebra ---------------------------------------------------------------------------


def test_is_scattered_examples():
    assert is_scattered(Ord(Ordinal(((OMEGA, 1),))))
    assert not is_scattered(Shuffle(frozenset({0})))
    assert not is_scattered(Sum((W, Shuffle(frozenset({0, 1})))))
    assert is_scattered(Sum((W, EMPTY)))


@settings(max_examples=200, deadline=None)
@given(st.one_of(scattered_terms(), shuffle_terms()))
def test_normalize_idempotent_and_rev_involution(t):
    n = normalize(t)
    assert normalize(n) == n
    assert rev(rev(t)) == n
    assert term_from_json(term_to_json(n)) == n


def test_rev_of_sum():
    a, b = Ord(nat(2)), W
    assert rev(Sum((a, b))) == normalize(Sum((Rev(b), Rev(a))))


# -- cuts and characters -----------------------------------------------------------------------------------------


def test_classify_cut_examples():
    assert classify_cut(Ord(nat(5)), ("ord", nat(2))) == {"I0HasLast", "I1HasFirst"}
    t = Sum((W, Rev(W)))
    assert classify_cut(t, ("sum", 1, ("rev", ("ord", OMEGA)))) == {"BothOmega"}
    assert classify_cut(W, ("ord", ZERO)) == {"I0Empty", "I1HasFirst"}
    assert classify_cut(t, ("sum", 0, ("ord", ZERO))) == {"I0Empty", "I1HasFirst"}


def test_shuffle_cuts_are_singletons():
    t = Shuffle(frozenset({0, 1}))
    for x in (Fraction(1, 3), Fraction(2, 7), Fraction(5, 9)):
        assert classify_cut(t, ("q", x)) == {"BothOmega"}
    assert classify_cut(t, ("q", Fraction(1, 2), "before")) == {"I1HasFirst"}
    assert classify_cut(t, ("q", Fraction(1, 2), "after")) == {"I0HasLast"}


def test_invalid_cut():
    with pytest.raises(InvalidCut):
        split(Ord(nat(3)), ("ord", nat(4)))
    with pytest.raises(InvalidCut):
        split(One(), ("sum", 0, ("one", 0)))


def test_character_examples():
    assert character_at(Ord(W1), ("ord", OMEGA)) == Character("OmegaLimit", "EndpointMax")
    assert character_at(W, ("ord", nat(3))) == Character("Successor", "Predecessor")
    sh = Shuffle(frozenset({0, 1}))
    for p in islice(enumerate_points(sh), 20):
        assert character_at(sh, p) == Character("OmegaLimit", "OmegaColimit")
    with pytest.raises(InvalidPoint):
        character_at(W, ("ord", OMEGA))


def test_character_on_finite_terms_against_realization():
    for t in CORPUS:
        if not is_finite(t) or finite_size(t) == 0:
            continue
        order = finite_realize(t, finite_size(t))
        n = len(order)
        for i, p in enumerate(order.points):
            left = "EndpointMin" if i == 0 else "Successor"
            right = "EndpointMax" if i == n - 1 else "Predecessor"
            assert character_at(t, p) == Character(left, right)


# -- canonical colouring ------------------------------------------------------------------------------------------


def test_character_enumeration_is_complete():
    pairs = {(l, r) for l in ("EndpointMin", "Successor", "OmegaLimit")
             for r in ("EndpointMax", "Predecessor", "OmegaColimit")}
    assert set(CHARACTER_PAIRS) == pairs and len(CHARACTER_PAIRS) == 9
    for i in range(9):
        assert swap_index(swap_index(i)) == i


def test_canonical_colouring_examples():
    sh = canonical_colouring(Shuffle(frozenset({0, 3})))
    assert sh == Shuffle(frozenset({idx("OmegaLimit", "OmegaColimit")}))
    two = canonical_colouring(Ord(nat(2)))
    assert colour_of(two, ("ord", ZERO)) == idx("EndpointMin", "Predecessor")
    assert colour_of(two, ("ord", ONE)) == idx("Successor", "EndpointMax")
    mid = canonical_colouring(Sum((W, One(), Rev(W))))
    # normalization merges omega + 1 into a single ordinal
    p = ("sum", 0, ("ord", OMEGA))
    assert character_at(mid, p) == Character("OmegaLimit", "OmegaColimit")
    assert colour_of(mid, p) == idx("OmegaLimit", "OmegaColimit")


def agrees_with_characters(c, k=40):
    for p in islice(enumerate_points(c), k):
        assert colour_of(c, p) == character_index(character_at(c, p))


@settings(max_examples=150, deadline=None)
@given(st.one_of(scattered_terms(), shuffle_terms(),
                 st.tuples(scattered_terms(), shuffle_terms()).map(lambda p: Sum(p))))
def test_canonical_colouring_laws(t):
    c = canonical_colouring(t)
    assert canonical_colouring(c) == c
    assert reversed_colouring(c) == canonical_colouring(rev(t))
    assert strip_colours(c) == normalize(strip_colours(normalize(t)))
    agrees_with_characters(c)


def test_canonical_colouring_corpus():
    for t in CORPUS:
        agrees_with_characters(canonical_colouring(t), 25)


# -- finite realization ------------------------------------------------------------------------------------------------


def test_finite_realize_examples():
    o = finite_realize(One(), 1)
    assert o.points == [("one",)]
    o = finite_realize(W, 5)
    assert o.points == [("ord", nat(k)) for k in range(5)]
    o = finite_realize(Shuffle(frozenset({0, 1})), 4)
    assert [p[1] for p in o.points] == [Fraction(1, 8), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)]
    assert o.colours == [1, 1, 0, 0]
    with pytest.raises(CapExceeded):
        finite_realize(W, 10, cap=5)


@settings(max_examples=100, deadline=None)
@given(st.one_of(scattered_terms(), shuffle_terms()), st.integers(1, 30))
def test_finite_realize_sorted_and_deterministic(t, n):
    o = finite_realize(t, n)
    assert o.points == finite_realize(t, n).points
    assert len(set(o.points)) == len(o.points)
    t = normalize(t)
    for a, b in zip(o.points, o.points[1:]):
        assert compare_points(t, a, b) < 0
