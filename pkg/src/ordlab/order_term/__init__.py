"""Countable coloured linear orders as terms: rank, cuts, characters, colourings."""

from .colouring import CHARACTER_PAIRS, canonical_colouring, character_index, reversed_colouring, swap_index
from .points import (CUT_CASES, CapExceeded, Character, FiniteOrder, InvalidCut, InvalidPoint, character_at,
                     check_point, classify_cut, colour_of, compare_points, cut_after, cut_before,
                     enumerate_points, finite_realize, path_from_json, path_to_json, split)
from .rank import BudgetExceeded, NotScattered, TopCase, brute_dp, dp, top_case
from .terms import (EMPTY, Empty, MalformedTerm, OmegaSum, One, Ord, Rev, Shuffle, Sum, has_max, has_min,
                    finite_size, is_finite, is_scattered, normalize, omega_sum, one, ord_term, rev, show, shuffle,
                    strip_colours, sum_of, term_from_json, term_to_json)
