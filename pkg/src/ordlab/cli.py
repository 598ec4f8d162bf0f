"""Command-line entry point: ``ordlab <command> ...``.

Every run prints one JSON report on standard output:

    {"command": [...], "verdict": {...}, "verification": {"status": ...},
     "timing_ms": null}

Exit codes: 0 when a verdict was produced, 2 for bad input (including an
unknown command), 3 when a search budget or cap ran out.  ``--verify``
re-checks the verdict with an independent oracle and only ever changes the
verification field.  Timing is omitted unless ``--timing`` is given, so
identical inputs give byte-identical reports.
"""

import argparse
import json
import sys
import time
from fractions import Fraction

from . import almost_disjoint as ad
from . import colour_iso as ci
from . import ideal_lab as il
from . import tagged_tree as tt_mod
from . import tree_games as tg
from .errors import BudgetError, InputError
from .order_term import (brute_dp, canonical_colouring, character_at, character_index, classify_cut, colour_of,
                         dp, enumerate_points, finite_size, is_finite, is_scattered, normalize, path_from_json,
                         path_to_json, term_from_json, term_to_json)
from .ordinal import Ordinal


class UnknownCommand(InputError):
    pass


class MalformedInput(InputError):
    pass


PASSED = {"status": "Passed"}
SKIPPED = {"status": "Skipped"}


def _failed(witness):
    return {"status": "Failed", "witness": witness}


def _skipped(reason):
    return {"status": "Skipped", "reason": reason}


def _encode(obj):
    if isinstance(obj, Ordinal):
        return obj.to_json()
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (set, frozenset)):
        return sorted(obj, key=repr)
    if hasattr(obj, "to_json"):
        return obj.to_json()
    return repr(obj)


def _load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc.strerror}", witness=path) from None
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path} is not JSON: {exc.msg} at line {exc.lineno}", witness=path) from None


def _term(path):
    return normalize(term_from_json(_load(path)))


def _token(x):
    return path_to_json(x) if isinstance(x, tuple) else x


# -- order terms ---------------------------------------------------------------------------


def cmd_rank(args):
    t = _term(args.term)
    budget = Ordinal.from_json(json.loads(args.budget)) if args.budget else None
    value = dp(t, budget)
    verdict = {"dp": value.to_json()}
    if not args.verify:
        return verdict, SKIPPED
    if not is_finite(t):
        return verdict, _skipped("the brute-force oracle needs a finite order")
    n = finite_size(t)
    if n > 256:
        return verdict, _skipped("the brute-force oracle is limited to 256 points")
    oracle = brute_dp(n)
    return verdict, PASSED if Ordinal.of(oracle) == value else _failed({"brute_dp": oracle})


def cmd_scattered(args):
    return {"scattered": is_scattered(_term(args.term))}, SKIPPED


def cmd_canon_colour(args):
    t = _term(args.term)
    coloured = canonical_colouring(t)
    verdict = {"term": term_to_json(coloured)}
    if not args.verify:
        return verdict, SKIPPED
    cap = args.cap or 64
    for k, (p, q) in enumerate(zip(enumerate_points(coloured), enumerate_points(t))):
        if k >= cap:
            break
        want = character_index(character_at(t, q))
        if colour_of(coloured, p) != want:
            return verdict, _failed({"point": path_to_json(p), "colour": colour_of(coloured, p), "character": want})
    return verdict, PASSED


def cmd_cut_classify(args):
    t = _term(args.term)
    cut = path_from_json(_load(args.cut))
    return {"cases": sorted(classify_cut(t, cut))}, SKIPPED


# -- back and forth ---------------------------------------------------------------------------


def cmd_iso(args):
    seed = args.seed
    A = ci.TermPresentation(_term(args.a), seed)
    B = ci.TermPresentation(_term(args.b), None if seed is None else seed + 1)
    res = ci.back_and_forth(A, B, args.rounds)
    partial = res if isinstance(res, ci.PartialIso) else res.partial
    if isinstance(res, ci.PartialIso):
        verdict = {"verdict": "PartialIso", "size": len(res.pairs)}
    else:
        verdict = {"verdict": "Obstruction", "side": res.side, "target": _token(res.target), "colour": res.colour,
                   "interval": [_token(x) for x in res.interval], "certificate": res.certificate,
                   "reason": res.reason, "size": len(partial.pairs)}
    verdict["pairs"] = [[_token(x), _token(y)] for x, y in partial.pairs]
    if args.trace:
        verdict["trace"] = [f"{r} {side} {json.dumps(_token(x))} {json.dumps(_token(y))}"
                            for r, side, x, y in partial.trace]
    if not args.verify:
        return verdict, SKIPPED
    bad = ci.verify_partial_iso(A, B, partial.pairs)
    return verdict, PASSED if bad is None else _failed(bad)


# -- trees -------------------------------------------------------------------------------------


def _tree(path):
    return tt_mod.tagged_tree_from_json(_load(path))


def _node_list(obj, key):
    if isinstance(obj, dict):
        obj = obj.get(key)
    if not isinstance(obj, list):
        raise MalformedInput(f"expected a list of nodes under {key!r}", witness=f"/{key}")
    return [tuple(n) for n in obj]


def cmd_front(args):
    tree = _tree(args.tree).tree
    aset = _node_list(_load(args.set), "nodes")
    contains = tt_mod.contains_front(tree, aset)
    verdict = {"contains_front": contains}
    try:
        w = tt_mod.front_witness(tree, aset)
        verdict["depth_fn"] = [{"node": list(n), "depth": d} for n, d in sorted(w.depth_fn.items())]
    except (tt_mod.NotAFront, tt_mod.NotAntichain) as exc:
        verdict["front_witness"] = {"error": type(exc).__name__, "witness": exc.witness}
        w = None
    if not args.verify:
        return verdict, SKIPPED
    if w is None:
        return verdict, _skipped("no depth function to re-check")
    bad = tt_mod.check_depth_fn(tree, aset, w.depth_fn)
    return verdict, PASSED if bad is None else _failed([list(bad[0]), list(bad[1])])


def cmd_tree_rank(args):
    tt = _tree(args.tree)
    P = None
    if args.P:
        P = {tuple(e["node"]): e["sets"] for e in _load(args.P)}
    ranks = tt_mod.dp_rank(tt, P, args.mode)
    return {"ranks": [{"node": list(n), "rank": r.to_json()} for n, r in sorted(ranks.items())]}, SKIPPED


def cmd_tree_compare(args):
    cmp = tt_mod.compare_trees(_tree(args.first), _tree(args.second), args.mu)
    return {"relation": cmp.relation.name, "le_mu": cmp.le_mu, "reason": cmp.reason}, SKIPPED


def cmd_game(args):
    tt = _tree(args.tree)
    target = _node_list(_load(args.target), "target")
    res = tg.solve_game(tt, target)
    verdict = {"winner": res.winner, "strategy": res.strategy.to_json()}
    if not args.verify:
        return verdict, SKIPPED
    tset = frozenset(target)
    rules = tg.Rules(leaf_wins=tset.__contains__)
    value = tg.minimax(tt, rules)
    if value != (res.winner == tg.PLAYER_I):
        return verdict, _failed({"minimax": value})
    bad = tg.check_strategy(tt, rules, res.strategy)
    return verdict, PASSED if bad is None else _failed(repr(bad))


def cmd_homogenize(args):
    tt = _tree(args.tree)
    colouring, count = tg.colouring_from_json(_load(args.colouring))
    res = tg.homogenize(tt, colouring, count)
    if not args.verify:
        return res.to_json(), SKIPPED
    if isinstance(res, tg.Homogeneous):
        bad = tg.verify_homogeneous(tt, colouring, res)
    else:
        bad = tg.verify_counterexample(tt, colouring, res)
    return res.to_json(), PASSED if bad is None else _failed(bad)


def cmd_level_homogenize(args):
    tt = _tree(args.tree)
    labels = tg.node_map_from_json(_load(args.labels))
    res = tg.level_homogenize(tt, labels)
    if not args.verify or not isinstance(res, tg.LevelResult):
        return res.to_json(), SKIPPED
    bad = tg.verify_level(tt, labels, res)
    return res.to_json(), PASSED if bad is None else _failed(bad)


def cmd_bound_homogenize(args):
    tt = _tree(args.tree)
    labels = tg.node_map_from_json(_load(args.labels))
    res = tg.bound_homogenize(tt, labels, args.mu)
    if not args.verify:
        return res.to_json(), SKIPPED
    bad = tg.verify_bound(tt, labels, args.mu, res)
    return res.to_json(), PASSED if bad is None else _failed(bad)


def cmd_cover_homogenize(args):
    tt = _tree(args.tree)
    obj = _load(args.cover)
    cover = obj.get("cover") if isinstance(obj, dict) else obj
    if not isinstance(cover, list):
        raise MalformedInput("cover JSON needs a 'cover' array of rows", witness="/cover")
    res = tg.cover_homogenize(tt, cover)
    if not args.verify:
        return res.to_json(), SKIPPED
    bad = tg.verify_cover(tt, cover, res)
    return res.to_json(), PASSED if bad is None else _failed(bad)


# -- ideals ---------------------------------------------------------------------------------------


def cmd_ideal_check(args):
    fam = il.family_from_json(_load(args.family))
    verdict = il.check_family(fam).to_json()
    if args.lam is not None:
        ind = il.is_indecomposable(fam, args.lam)
        strong = il.is_strongly_indecomposable(fam, args.lam)
        verdict["indecomposable"] = {"holds": ind.holds, "witness": ind.witness}
        verdict["strongly_indecomposable"] = {"holds": strong.holds, "witness": strong.witness}
    return verdict, SKIPPED


def cmd_t_invariant(args):
    fam = il.family_from_json(_load(args.family))
    raw = _load(args.f)
    if isinstance(raw, dict):
        f = {int(k): v for k, v in raw.items()}
    elif isinstance(raw, list):
        f = dict(zip(fam.atoms(), raw))
    else:
        raise MalformedInput("f must be an object atom -> size or a list of sizes", witness="/")
    kwargs = {"cap": args.cap} if args.cap else {}
    return {"t": il.t_invariant(fam, f, args.variant, **kwargs), "variant": args.variant}, SKIPPED


# -- almost disjoint families ------------------------------------------------------------------------


def cmd_ad(args):
    F = ad.family_from_json(_load(args.family))
    if args.action == "extend":
        order = json.loads(args.order) if args.order else list(range(len(F)))
        ext = ad.ad_extend(F, order, args.emit)
        verdict = {"elements": ext.elements, "sorted": ext.sorted(),
                   "overlap": {str(b): v for b, v in sorted(ext.overlap.items())}}
        if not args.verify:
            return verdict, SKIPPED
        bad = ad.verify_extension(F, ext)
        return verdict, PASSED if bad is None else _failed(bad)
    g = ad.disjointify(F)
    verdict = {"cuts": [g[j] for j in range(len(F))]}
    if not args.verify:
        return verdict, SKIPPED
    bad = ad.tails_disjoint(F, g)
    if bad is None:
        loose = [j for j in range(len(F)) if not ad.cut_is_tight(F, g, j)]
        bad = {"not_tight": loose} if loose else None
    return verdict, PASSED if bad is None else _failed(bad)


# -- parser ---------------------------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        if "invalid choice" in message:
            raise UnknownCommand(message)
        raise MalformedInput(message)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verify", action="store_true", help="re-check the verdict with an independent oracle")
    common.add_argument("--pretty", action="store_true", help="indented output")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized presentations")
    common.add_argument("--cap", type=int, default=None, help="size cap for searches and checks")
    common.add_argument("--timing", action="store_true", help="record wall-clock time in the report")

    p = _Parser(prog="ordlab", description="Ordinals, tagged trees, tree games and countable order types.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, *positional, **kw):
        sp = sub.add_parser(name, parents=[common], **kw)
        for arg in positional:
            sp.add_argument(arg)
        sp.set_defaults(func=func)
        return sp

    add("rank", cmd_rank, "term").add_argument("--budget", help="CNF JSON cap on the rank")
    add("scattered", cmd_scattered, "term")
    add("canon-colour", cmd_canon_colour, "term")
    add("cut-classify", cmd_cut_classify, "term", "cut")
    sp = add("iso", cmd_iso, "a", "b")
    sp.add_argument("--rounds", type=int, default=100)
    sp.add_argument("--trace", action="store_true")
    add("front", cmd_front, "tree", "set")
    sp = add("tree-rank", cmd_tree_rank, "tree")
    sp.add_argument("--mode", choices=["Strict", "Reflexive"], default="Strict")
    sp.add_argument("--P", help="JSON list of {node, sets}")
    add("tree-compare", cmd_tree_compare, "first", "second").add_argument("--mu", type=int, default=None)
    add("game", cmd_game, "tree", "target")
    add("homogenize", cmd_homogenize, "tree", "colouring")
    add("level-homogenize", cmd_level_homogenize, "tree", "labels")
    add("bound-homogenize", cmd_bound_homogenize, "tree", "labels").add_argument("--mu", type=int, required=True)
    add("cover-homogenize", cmd_cover_homogenize, "tree", "cover")
    add("ideal-check", cmd_ideal_check, "family").add_argument("--lam", type=int, default=None)
    sp = add("t-invariant", cmd_t_invariant, "family", "f")
    sp.add_argument("--variant", choices=["AsWritten", "DifferModI"], default="AsWritten")
    sp = add("ad", cmd_ad, "action", "family")
    sp.add_argument("--emit", type=int, default=16)
    sp.add_argument("--order", help="JSON list of family indices")
    return p


def dispatch(argv):
    """Run one command; returns (report dict, exit code)."""
    argv = list(argv)
    report = {"command": argv, "verdict": None, "verification": SKIPPED, "timing_ms": None}
    pretty = "--pretty" in argv
    try:
        args = build_parser().parse_args(argv)
        if args.command == "ad" and args.action not in ("extend", "disjointify"):
            raise UnknownCommand(f"unknown ad action {args.action!r}")
        start = time.perf_counter()
        verdict, verification = args.func(args)
        if args.timing:
            report["timing_ms"] = round((time.perf_counter() - start) * 1000, 3)
        report["verdict"] = verdict
        report["verification"] = verification
        code = 0
    except InputError as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc), "witness": exc.witness}
        code = 2
    except BudgetError as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc), "lower_bound": exc.lower_bound}
        code = 3
    report["_pretty"] = pretty
    return report, code


def render(report):
    pretty = report.pop("_pretty", False)
    text = json.dumps(report, default=_encode, indent=2 if pretty else None, sort_keys=True)
    return text + "\n"


def main(argv=None):
    report, code = dispatch(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(render(report))
    sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
