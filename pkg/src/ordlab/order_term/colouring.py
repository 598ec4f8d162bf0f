"""Canonical colouring: every point is coloured by the index of its character.

Character pairs are numbered as follows:

    0  (EndpointMin, EndpointMax)
    1  (EndpointMin, Predecessor)
    2  (Successor, EndpointMax)
    3  (Successor, Predecessor)
    4  (OmegaLimit, OmegaColimit)
    5  (EndpointMin, OmegaColimit)
    6  (Successor, OmegaColimit)
    7  (OmegaLimit, EndpointMax)
    8  (OmegaLimit, Predecessor)

The colouring is computed structurally.  Each subterm is coloured knowing
what sits immediately outside it on either side, and a flag records whether
it is read backwards inside an odd number of reversals.
"""

from .points import (ENDPOINT_MAX, ENDPOINT_MIN, OMEGA_COLIMIT, OMEGA_LIMIT, PREDECESSOR, SUCCESSOR,
                     Character, realized_kinds)
from .terms import (EMPTY, Empty, OmegaSum, One, Ord, Rev, Shuffle, Sum, has_max, has_min, make_palette,
                    map_colours, normalize, strip_colours)

CHARACTER_PAIRS = (
    (ENDPOINT_MIN, ENDPOINT_MAX),
    (ENDPOINT_MIN, PREDECESSOR),
    (SUCCESSOR, ENDPOINT_MAX),
    (SUCCESSOR, PREDECESSOR),
    (OMEGA_LIMIT, OMEGA_COLIMIT),
    (ENDPOINT_MIN, OMEGA_COLIMIT),
    (SUCCESSOR, OMEGA_COLIMIT),
    (OMEGA_LIMIT, ENDPOINT_MAX),
    (OMEGA_LIMIT, PREDECESSOR),
)
_INDEX = {pair: i for i, pair in enumerate(CHARACTER_PAIRS)}

_TO_LEFT = {ENDPOINT_MAX: ENDPOINT_MIN, PREDECESSOR: SUCCESSOR, OMEGA_COLIMIT: OMEGA_LIMIT}
_TO_RIGHT = {v: k for k, v in _TO_LEFT.items()}


def character_index(ch):
    if isinstance(ch, Character):
        ch = (ch.left, ch.right)
    return _INDEX[tuple(ch)]


def swap_pair(pair):
    """Character of a point after reversing the whole order."""
    left, right = pair
    return (_TO_LEFT[right], _TO_RIGHT[left])


def swap_index(i):
    """The character-pair swap on indices."""
    return _INDEX[swap_pair(CHARACTER_PAIRS[i])]


def _colour(left, right, flip):
    pair = (left, right)
    return _INDEX[swap_pair(pair) if flip else pair]


def _colour_term(t, lctx, rctx, flip):
    if isinstance(t, Empty):
        return EMPTY
    if isinstance(t, One):
        return One(_colour(lctx, rctx, flip))
    if isinstance(t, Ord):
        lefts = {"first": lctx, "successor": SUCCESSOR, "limit": OMEGA_LIMIT}
        rights = {"inner": PREDECESSOR, "last": rctx}
        mapping = {(lk, rk): _colour(lefts[lk], rights[rk], flip) for lk, rk in realized_kinds(t.a)}
        return Ord(t.a, make_palette(mapping))
    if isinstance(t, Rev):
        return Rev(_colour_term(t.arg, _TO_LEFT[rctx], _TO_RIGHT[lctx], not flip))
    if isinstance(t, Sum):
        return Sum(_colour_seq(t.args, lctx, rctx, flip))
    if isinstance(t, OmegaSum):
        r = t.repeat
        inner_right = PREDECESSOR if has_min(r) else OMEGA_COLIMIT
        inner_left = SUCCESSOR if has_max(r) else OMEGA_LIMIT
        pre = _colour_seq(t.prefix + (r,), lctx, inner_right, flip)
        return OmegaSum(pre, _colour_term(r, inner_left, inner_right, flip))
    if isinstance(t, Shuffle):
        return Shuffle(frozenset({_colour(OMEGA_LIMIT, OMEGA_COLIMIT, flip)}))
    raise TypeError(f"not an order term: {t!r}")


def _colour_seq(items, lctx, rctx, flip):
    out = []
    for i, x in enumerate(items):
        left = lctx if i == 0 else (SUCCESSOR if has_max(items[i - 1]) else OMEGA_LIMIT)
        right = rctx if i == len(items) - 1 else (PREDECESSOR if has_min(items[i + 1]) else OMEGA_COLIMIT)
        out.append(_colour_term(x, left, right, flip))
    return tuple(out)


def canonical_colouring(t):
    """Recolour every point of t by the index of its character pair."""
    base = normalize(strip_colours(normalize(t)))
    return normalize(_colour_term(base, ENDPOINT_MIN, ENDPOINT_MAX, False))


def reversed_colouring(t):
    """Reverse a canonically coloured term and swap its character indices to match."""
    return normalize(map_colours(Rev(t), swap_index))
