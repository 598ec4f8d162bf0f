"""Term grammar for countable coloured linear orders, with normalization.

Constructors: One (a point, optionally coloured), Ord (an ordinal, with an
optional palette colouring its points by position kind), Rev (reversed
order), Sum (finite ordered sum), OmegaSum (a finite prefix followed by
omega copies of a repeated term), Shuffle (the dense countable order
without endpoints in which each listed colour is dense) and Empty.
"""

from dataclasses import dataclass
from typing import Optional

from ..errors import InputError
from ..ordinal import ONE, ZERO, Ordinal, omega_pow

# Position kinds used by Ord palettes: how a point of an ordinal looks from
# inside the ordinal.  Left: the first point, a successor position, or a
# limit position.  Right: the last point, or any other point.
LEFT_KINDS = ("first", "successor", "limit")
RIGHT_KINDS = ("inner", "last")


class MalformedTerm(InputError):
    pass


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class One:
    colour: Optional[int] = None


@dataclass(frozen=True)
class Ord:
    a: Ordinal
    palette: Optional[tuple] = None

    def palette_colour(self, left, right):
        if self.palette is None:
            return None
        for key, colour in self.palette:
            if key == (left, right):
                return colour
        return None


@dataclass(frozen=True)
class Rev:
    arg: object


@dataclass(frozen=True)
class Sum:
    args: tuple


@dataclass(frozen=True)
class OmegaSum:
    prefix: tuple
    repeat: object


@dataclass(frozen=True)
class Shuffle:
    colours: frozenset


EMPTY = Empty()


def make_palette(mapping):
    """Freeze a {(left_kind, right_kind): colour} mapping into the stored form."""
    items = []
    for (left, right), colour in mapping.items():
        if left not in LEFT_KINDS or right not in RIGHT_KINDS:
            raise MalformedTerm(f"unknown position kind {(left, right)!r}")
        items.append(((left, right), colour))
    return tuple(sorted(items))


# -- builders ---------------------------------------------------------------------


def one(colour=None):
    return One(colour)


def ord_term(a):
    return normalize(Ord(Ordinal.of(a)))


def rev(t):
    return normalize(Rev(t))


def sum_of(*ts):
    if len(ts) == 1 and isinstance(ts[0], (list, tuple)):
        ts = tuple(ts[0])
    return normalize(Sum(tuple(ts)))


def omega_sum(prefix, repeat):
    return normalize(OmegaSum(tuple(prefix), repeat))


def shuffle(colours):
    return Shuffle(frozenset(colours))


# -- normalization ------------------------------------------------------------------


def _forward(t):
    """Ordinal a if t is an uncoloured well-ordered block of type a."""
    if isinstance(t, One) and t.colour is None:
        return ONE
    if isinstance(t, Ord) and t.palette is None:
        return t.a
    return None


def _backward(t):
    """Ordinal a if t is an uncoloured reversed block of type a."""
    if isinstance(t, One) and t.colour is None:
        return ONE
    if isinstance(t, Rev) and isinstance(t.arg, Ord) and t.arg.palette is None:
        return t.arg.a
    return None


def _merge_seq(items):
    """Flatten, drop empties and merge adjacent uncoloured ordinal blocks."""
    flat = []
    for x in items:
        if isinstance(x, Sum):
            flat.extend(x.args)
        elif not isinstance(x, Empty):
            flat.append(x)
    out = []
    for x in flat:
        if out:
            fa, fb = _forward(out[-1]), _forward(x)
            if fa is not None and fb is not None:
                out[-1] = _ord_block(fa + fb)
                continue
            ba, bb = _backward(out[-1]), _backward(x)
            if ba is not None and bb is not None:
                out[-1] = Rev(_ord_block(bb + ba))
                continue
        out.append(x)
    return out


def _ord_block(a):
    return One() if a == ONE else Ord(a)


def _seq_to_term(seq):
    if not seq:
        return EMPTY
    if len(seq) == 1:
        return seq[0]
    return Sum(tuple(seq))


def normalize(t):
    if isinstance(t, (Empty, One)):
        return t
    if isinstance(t, Shuffle):
        if not t.colours:
            raise MalformedTerm("shuffle needs at least one colour")
        return t
    if isinstance(t, Ord):
        if not isinstance(t.a, Ordinal):
            raise MalformedTerm("ord term needs an Ordinal")
        if t.a.is_zero():
            return EMPTY
        if t.a == ONE:
            return One(t.palette_colour("first", "last"))
        return t
    if isinstance(t, Rev):
        x = normalize(t.arg)
        if isinstance(x, (Empty, One, Shuffle)):
            return x
        if isinstance(x, Rev):
            return x.arg
        if isinstance(x, Sum):
            return normalize(Sum(tuple(Rev(y) for y in reversed(x.args))))
        return Rev(x)
    if isinstance(t, Sum):
        seq = _merge_seq([normalize(x) for x in t.args])
        if seq and isinstance(seq[-1], OmegaSum):
            last = seq[-1]
            return normalize(OmegaSum(tuple(seq[:-1]) + last.prefix, last.repeat))
        return _seq_to_term(seq)
    if isinstance(t, OmegaSum):
        r = normalize(t.repeat)
        if isinstance(r, Empty):
            raise MalformedTerm("omega-sum repeat must be nonempty")
        p = _merge_seq([normalize(x) for x in t.prefix])
        a = _forward(r)
        if a is not None:
            # a * omega for a nonzero ordinal a with leading exponent e is omega^(e+1)
            return normalize(Sum(tuple(p) + (Ord(omega_pow(a.leading_exponent() + ONE)),)))
        unit = list(r.args) if isinstance(r, Sum) else [r]
        while len(p) >= len(unit) and p[len(p) - len(unit):] == unit:
            del p[len(p) - len(unit):]
        return OmegaSum(tuple(p), r)
    raise MalformedTerm(f"not an order term: {t!r}")


# -- structure -----------------------------------------------------------------------


def is_empty(t):
    return isinstance(normalize(t), Empty)


def has_min(t):
    if isinstance(t, One):
        return True
    if isinstance(t, Ord):
        return not t.a.is_zero()
    if isinstance(t, Rev):
        return has_max(t.arg)
    if isinstance(t, Sum):
        return has_min(t.args[0])
    if isinstance(t, OmegaSum):
        return has_min(t.prefix[0] if t.prefix else t.repeat)
    return False


def has_max(t):
    if isinstance(t, One):
        return True
    if isinstance(t, Ord):
        return t.a.is_successor()
    if isinstance(t, Rev):
        return has_min(t.arg)
    if isinstance(t, Sum):
        return has_max(t.args[-1])
    return False


def is_scattered(t):
    t = normalize(t)
    if isinstance(t, Shuffle):
        return False
    if isinstance(t, Rev):
        return is_scattered(t.arg)
    if isinstance(t, Sum):
        return all(is_scattered(x) for x in t.args)
    if isinstance(t, OmegaSum):
        return all(is_scattered(x) for x in t.prefix) and is_scattered(t.repeat)
    return True


def is_finite(t):
    if isinstance(t, (Empty, One)):
        return True
    if isinstance(t, Ord):
        return t.a.is_finite()
    if isinstance(t, Rev):
        return is_finite(t.arg)
    if isinstance(t, Sum):
        return all(is_finite(x) for x in t.args)
    return False


def finite_size(t):
    if isinstance(t, Empty):
        return 0
    if isinstance(t, One):
        return 1
    if isinstance(t, Ord):
        return t.a.finite_value()
    if isinstance(t, Rev):
        return finite_size(t.arg)
    if isinstance(t, Sum):
        return sum(finite_size(x) for x in t.args)
    raise InputError("term is infinite")


def strip_colours(t):
    """Forget all colours (shuffles keep a single colour 0)."""
    if isinstance(t, One):
        return One()
    if isinstance(t, Ord):
        return Ord(t.a)
    if isinstance(t, Rev):
        return Rev(strip_colours(t.arg))
    if isinstance(t, Sum):
        return Sum(tuple(strip_colours(x) for x in t.args))
    if isinstance(t, OmegaSum):
        return OmegaSum(tuple(strip_colours(x) for x in t.prefix), strip_colours(t.repeat))
    if isinstance(t, Shuffle):
        return Shuffle(frozenset({0}))
    return t


def map_colours(t, f):
    """Apply f to every colour in the term."""
    if isinstance(t, One):
        return One(None if t.colour is None else f(t.colour))
    if isinstance(t, Ord):
        if t.palette is None:
            return t
        return Ord(t.a, tuple(sorted((k, f(c)) for k, c in t.palette)))
    if isinstance(t, Rev):
        return Rev(map_colours(t.arg, f))
    if isinstance(t, Sum):
        return Sum(tuple(map_colours(x, f) for x in t.args))
    if isinstance(t, OmegaSum):
        return OmegaSum(tuple(map_colours(x, f) for x in t.prefix), map_colours(t.repeat, f))
    if isinstance(t, Shuffle):
        return Shuffle(frozenset(f(c) for c in t.colours))
    return t


# -- JSON ---------------------------------------------------------------------------------


def term_to_json(t):
    if isinstance(t, Empty):
        return {"kind": "empty"}
    if isinstance(t, One):
        out = {"kind": "one"}
        if t.colour is not None:
            out["colour"] = t.colour
        return out
    if isinstance(t, Ord):
        out = {"kind": "ord", "cnf": t.a.to_json()["cnf"]}
        if t.palette is not None:
            out["palette"] = [[l, r, c] for (l, r), c in t.palette]
        return out
    if isinstance(t, Rev):
        return {"kind": "rev", "arg": term_to_json(t.arg)}
    if isinstance(t, Sum):
        return {"kind": "sum", "args": [term_to_json(x) for x in t.args]}
    if isinstance(t, OmegaSum):
        return {"kind": "omega_sum", "prefix": [term_to_json(x) for x in t.prefix],
                "repeat": term_to_json(t.repeat)}
    if isinstance(t, Shuffle):
        return {"kind": "shuffle", "colours": sorted(t.colours)}
    raise MalformedTerm(f"not an order term: {t!r}")


def term_from_json(obj, pointer=""):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise MalformedTerm(f"expected a term object at {pointer or '/'}", witness=pointer or "/")
    kind = obj["kind"]
    try:
        if kind == "empty":
            return EMPTY
        if kind == "one":
            c = obj.get("colour")
            if c is not None and (not isinstance(c, int) or c < 0):
                raise MalformedTerm(f"bad colour at {pointer}/colour", witness=f"{pointer}/colour")
            return One(c)
        if kind == "ord":
            a = Ordinal.from_json({"cnf": obj["cnf"]})
            pal = obj.get("palette")
            if pal is not None:
                pal = make_palette({(l, r): c for l, r, c in pal})
            return Ord(a, pal)
        if kind == "rev":
            return Rev(term_from_json(obj["arg"], pointer + "/arg"))
        if kind == "sum":
            args = obj["args"]
            if not isinstance(args, list) or not args:
                raise MalformedTerm(f"sum needs a nonempty args array at {pointer}/args", witness=f"{pointer}/args")
            return Sum(tuple(term_from_json(x, f"{pointer}/args/{i}") for i, x in enumerate(args)))
        if kind == "omega_sum":
            prefix = obj.get("prefix", [])
            return OmegaSum(tuple(term_from_json(x, f"{pointer}/prefix/{i}") for i, x in enumerate(prefix)),
                            term_from_json(obj["repeat"], pointer + "/repeat"))
        if kind == "shuffle":
            cols = obj["colours"]
            if not isinstance(cols, list) or not cols:
                raise MalformedTerm(f"shuffle needs colours at {pointer}/colours", witness=f"{pointer}/colours")
            return Shuffle(frozenset(cols))
    except KeyError as exc:
        raise MalformedTerm(f"missing field {exc} at {pointer or '/'}", witness=pointer or "/") from None
    raise MalformedTerm(f"unknown term kind {kind!r} at {pointer or '/'}", witness=pointer or "/")


def show(t):
    """Compact human-readable rendering."""
    if isinstance(t, Empty):
        return "∅"
    if isinstance(t, One):
        return "1" if t.colour is None else f"1[{t.colour}]"
    if isinstance(t, Ord):
        return f"Ord({t.a})" if t.palette is None else f"Ord({t.a})[pal]"
    if isinstance(t, Rev):
        return f"({show(t.arg)})*"
    if isinstance(t, Sum):
        return "(" + " + ".join(show(x) for x in t.args) + ")"
    if isinstance(t, OmegaSum):
        head = " + ".join(show(x) for x in t.prefix)
        return f"({head + ' + ' if head else ''}{show(t.repeat)}·ω)"
    if isinstance(t, Shuffle):
        return f"η{sorted(t.colours)}"
    return repr(t)
