"""Finite games on tagged trees, solved by backward induction.

A play walks from the root to a maximal node.  At each node player II
first names a small set (a member of the node's tag, or the empty set at
untagged nodes); player I then picks a successor, avoiding II's set when
the node splits.  Variants add nodes where II may point at any single
successor ("keep-all" nodes, where I must be ready for every successor) and
a per-node safety condition that ends the play as a loss for I.
"""

from dataclasses import dataclass, field
from itertools import product
from typing import Any, Callable, Optional

from .errors import InputError
from .ideal_lab import SmallnessFamily, covering_number
from .tagged_tree import Relation, TaggedTree, compare_trees

PLAYER_I = "PlayerI"
PLAYER_II = "PlayerII"


class NoBoundAchievable(InputError):
    pass


class NoIndexWins(InputError):
    pass


@dataclass
class Strategy:
    owner: str
    moves: dict

    def to_json(self):
        if self.owner == PLAYER_I:
            rows = [{"node": list(n), "small": sorted(a), "move": s} for (n, a), s in sorted(
                self.moves.items(), key=lambda kv: (kv[0][0], sorted(kv[0][1])))]
        else:
            rows = [{"node": list(n), "move": sorted(a)} for n, a in sorted(self.moves.items())]
        return {"owner": self.owner, "moves": rows}


@dataclass
class Rules:
    """One game on a fixed tagged tree."""
    leaf_wins: Callable[[tuple], bool]
    node_ok: Callable[[tuple], bool] = lambda node: True
    keep_all: Callable[[tuple], bool] = lambda node: False


class Board:
    """Per-tree data shared by every game on that tree."""

    def __init__(self, tt):
        self.tt = tt
        tree = tt.tree
        self.succ = {n: tree.succ_indices(n) for n in tree.nodes}
        self.split = tt.splitting()
        self.bottom_up = sorted(tree.nodes, key=len, reverse=True)
        self.members = {}
        self.small_moves = {}
        for n in tree.nodes:
            fam = tt.tags.get(n)
            if fam is None:
                self.small_moves[n] = [frozenset()]
                continue
            succ = frozenset(self.succ[n])
            moves = sorted((m for m in fam.members if m <= succ), key=lambda s: (len(s), sorted(s)))
            self.small_moves[n] = moves
            self.members[n] = fam.members


def board_of(tt):
    b = getattr(tt, "_board", None)
    if b is None:
        b = Board(tt)
        tt._board = b
    return b


def ii_moves(board, rules, node):
    """Player II's legal moves at a node, as sets of successor indices."""
    succ = board.succ[node]
    if rules.keep_all(node):
        full = frozenset(succ)
        return [full - {s} for s in succ]
    return board.small_moves[node]


def i_must_avoid(board, rules, node):
    return node in board.split or rules.keep_all(node)


def winning_region(board, rules):
    """Map node -> True when player I wins the game started at that node."""
    win = {}
    for n in board.bottom_up:
        if not rules.node_ok(n):
            win[n] = False
            continue
        succ = board.succ[n]
        if not succ:
            win[n] = bool(rules.leaf_wins(n))
        elif rules.keep_all(n):
            win[n] = all(win[n + (s,)] for s in succ)
        elif n in board.split:
            good = frozenset(s for s in succ if win[n + (s,)])
            win[n] = good not in board.members[n]
        else:
            win[n] = any(win[n + (s,)] for s in succ)
    return win


def _i_choice(board, rules, win, node, small):
    succ = board.succ[node]
    if i_must_avoid(board, rules, node):
        for s in succ:
            if s not in small and win[node + (s,)]:
                return s
        return None
    for s in succ:
        if win[node + (s,)]:
            return s
    return None


def strategy_for_i(board, rules, win, start=()):
    moves = {}
    stack = [start]
    while stack:
        n = stack.pop()
        if not board.succ[n]:
            continue
        for small in ii_moves(board, rules, n):
            s = _i_choice(board, rules, win, n, small)
            moves[(n, small)] = s
            stack.append(n + (s,))
    return Strategy(PLAYER_I, moves)


def strategy_for_ii(board, rules, win, start=()):
    moves = {}
    stack = [start]
    while stack:
        n = stack.pop()
        if not rules.node_ok(n) or not board.succ[n]:
            continue
        succ = board.succ[n]
        if rules.keep_all(n):
            losing = next(s for s in succ if not win[n + (s,)])
            small = frozenset(succ) - {losing}
        elif n in board.split:
            small = frozenset(s for s in succ if win[n + (s,)])
        else:
            small = frozenset()
        moves[n] = small
        for s in succ:
            if i_must_avoid(board, rules, n) and s in small:
                continue
            stack.append(n + (s,))
    return Strategy(PLAYER_II, moves)


def reachable_nodes(board, strategy_i):
    """Prefix-closed set of nodes visited by plays that follow I's strategy."""
    nodes = {()}
    for (n, _), s in strategy_i.moves.items():
        nodes.add(n)
        nodes.add(n + (s,))
    return nodes


def winning_nodes(board, win):
    """Nodes reached from the root through positions player I wins.

    This is the largest subtree any winning strategy of player I can stay
    inside: at a splitting node the winning successors form a positive set,
    otherwise player II could name them all.
    """
    nodes = set()
    stack = [()] if win[()] else []
    while stack:
        n = stack.pop()
        nodes.add(n)
        stack.extend(n + (s,) for s in board.succ[n] if win[n + (s,)])
    return nodes


@dataclass
class GameResult:
    winner: str
    strategy: Strategy
    region: dict


def _solve(tt, rules):
    board = board_of(tt)
    win = winning_region(board, rules)
    if win[()]:
        return GameResult(PLAYER_I, strategy_for_i(board, rules, win), win)
    return GameResult(PLAYER_II, strategy_for_ii(board, rules, win), win)


def solve_game(tt, target):
    """Who can force the play into the target set of maximal nodes, and how."""
    target = frozenset(tuple(t) for t in target)
    return _solve(tt, Rules(leaf_wins=target.__contains__))


# -- independent checks --------------------------------------------------------------


def minimax(tt, rules, node=()):
    """Game value by enumerating every move of both players."""
    board = board_of(tt)
    if not rules.node_ok(node):
        return False
    succ = board.succ[node]
    if not succ:
        return bool(rules.leaf_wins(node))
    avoid = i_must_avoid(board, rules, node)
    for small in ii_moves(board, rules, node):
        options = [s for s in succ if not (avoid and s in small)]
        if not any(minimax(tt, rules, node + (s,)) for s in options):
            return False
    return True


def count_positions(tt, rules, node=()):
    board = board_of(tt)
    succ = board.succ[node]
    if not succ or not rules.node_ok(node):
        return 1
    total = 1
    for small in ii_moves(board, rules, node):
        total += 1
        for s in succ:
            if not (i_must_avoid(board, rules, node) and s in small):
                total += count_positions(tt, rules, node + (s,))
    return total


def check_strategy(tt, rules, strategy, node=()):
    """Play the strategy against every opponent move; return a losing play or None."""
    board = board_of(tt)
    path = []

    def walk(n):
        if not rules.node_ok(n):
            return None if strategy.owner == PLAYER_II else list(path) + [("end", n)]
        succ = board.succ[n]
        if not succ:
            won = bool(rules.leaf_wins(n))
            if won == (strategy.owner == PLAYER_I):
                return None
            return list(path) + [("end", n)]
        avoid = i_must_avoid(board, rules, n)
        legal_small = ii_moves(board, rules, n)
        if strategy.owner == PLAYER_I:
            for small in legal_small:
                s = strategy.moves.get((n, small))
                if s is None or s not in succ or (avoid and s in small):
                    return list(path) + [("illegal", n, small, s)]
                path.append((n, small, s))
                bad = walk(n + (s,))
                path.pop()
                if bad:
                    return bad
            return None
        small = strategy.moves.get(n)
        if small is None or small not in legal_small:
            return list(path) + [("illegal", n, small)]
        for s in succ:
            if avoid and s in small:
                continue
            path.append((n, small, s))
            bad = walk(n + (s,))
            path.pop()
            if bad:
                return bad
        return None

    return walk(node)


# -- homogenization --------------------------------------------------------------------


@dataclass
class Homogeneous:
    colour: int
    subtree: TaggedTree
    strategy: Strategy
    verdict: str = "Homogeneous"

    def to_json(self):
        return {"verdict": self.verdict, "colour": self.colour, "subtree": self.subtree.to_json()}


@dataclass
class Counterexample:
    branch: list
    failure_report: dict
    strategies: dict
    verdict: str = "Counterexample"

    def to_json(self):
        return {"verdict": self.verdict, "branch": [list(n) for n in self.branch],
                "failure_report": self.failure_report}


def _colour_map(tt, colouring, colour_count):
    leaves = tt.tree.leaves()
    colouring = {tuple(k): v for k, v in colouring.items()}
    for leaf in leaves:
        c = colouring.get(leaf)
        if not isinstance(c, int) or not 0 <= c < colour_count:
            raise InputError(f"maximal node {list(leaf)} needs a colour below {colour_count}, got {c!r}",
                             witness=list(leaf))
    return colouring


def homogenize(tt, colouring, colour_count=None):
    """A tag-positive subtree whose maximal nodes all share one colour, or why none exists.

    Colours are tried in increasing order; the first colour for which
    player I wins yields the tree of plays that follow I's strategy.  If
    every colour loses, player II's strategies are run against each other
    along one branch until their small sets together cover a successor set.
    """
    if colour_count is None:
        colour_count = max(colouring.values()) + 1 if colouring else 1
    colouring = _colour_map(tt, colouring, colour_count)
    board = board_of(tt)
    regions = {}
    for colour in range(colour_count):
        rules = Rules(leaf_wins=lambda n, c=colour: colouring[n] == c)
        win = winning_region(board, rules)
        if win[()]:
            strat = strategy_for_i(board, rules, win)
            sub = tt.prune_to(reachable_nodes(board, strat))
            return Homogeneous(colour, sub, strat)
        regions[colour] = (rules, win)
    strategies = {c: strategy_for_ii(board, rules, win) for c, (rules, win) in regions.items()}
    return _diagonal(tt, board, strategies, colour_count)


def _diagonal(tt, board, strategies, colour_count):
    node = ()
    branch = [node]
    while True:
        succ = board.succ[node]
        if not succ:
            raise AssertionError("diagonal play reached a maximal node; colouring is not total")
        sets = {c: strategies[c].moves[node] for c in range(colour_count)}
        if node in board.split:
            union = frozenset().union(*sets.values())
            free = [s for s in succ if s not in union]
            if not free:
                fam = tt.tags[node]
                succ_set = frozenset(succ)
                local = SmallnessFamily(succ_set, frozenset(m for m in fam.members if m <= succ_set))
                report = {
                    "node": list(node),
                    "colour_sets": {str(c): sorted(v) for c, v in sets.items()},
                    "covering_number": covering_number(local),
                    "colour_count": colour_count,
                }
                return Counterexample(branch, report, strategies)
            node = node + (free[0],)
        else:
            node = node + (succ[0],)
        branch.append(node)


def verify_homogeneous(tt, colouring, result):
    """Independent re-check of a Homogeneous result; returns a failure string or None."""
    sub = result.subtree
    colouring = {tuple(k): v for k, v in colouring.items()}
    for leaf in sub.tree.leaves():
        if not tt.tree.is_leaf(leaf):
            return f"{list(leaf)} is maximal in the subtree but not in the tree"
        if colouring[leaf] != result.colour:
            return f"maximal node {list(leaf)} has colour {colouring[leaf]}"
    for n in sub.nodes:
        if tt.is_splitting(n):
            kept = frozenset(sub.tree.succ_indices(n))
            if kept in tt.tags[n].members:
                return f"kept successors of {list(n)} form a small set"
    cmp = compare_trees(tt, sub)
    if cmp.relation < Relation.LEStar:
        return f"subtree is only {cmp.relation.name}: {cmp.reason}"
    return None


def verify_counterexample(tt, colouring, result):
    """Replay each per-colour strategy of player II along the diagonal branch."""
    board = board_of(tt)
    colouring = {tuple(k): v for k, v in colouring.items()}
    count = result.failure_report["colour_count"]
    for c in range(count):
        rules = Rules(leaf_wins=lambda n, c=c: colouring[n] == c)
        strat = result.strategies[c]
        bad = check_strategy(tt, rules, strat)
        if bad:
            return f"strategy for colour {c} is not winning for player II: {bad}"
        for here, nxt in zip(result.branch, result.branch[1:]):
            small = strat.moves.get(here)
            if small is None:
                return f"strategy for colour {c} has no move at {list(here)}"
            if here in board.split and nxt[-1] in small:
                return f"branch step {list(nxt)} is illegal against colour {c}"
    stuck = result.branch[-1]
    if stuck not in board.split:
        return "final node of the branch is not splitting"
    union = frozenset().union(*(result.strategies[c].moves[stuck] for c in range(count)))
    if not frozenset(board.succ[stuck]) <= union:
        return "player II sets do not cover the final successor set"
    if result.failure_report["covering_number"] > count:
        return "reported covering number exceeds the colour count"
    return None


# -- level homogenization ---------------------------------------------------------------


@dataclass
class LevelResult:
    subtree: TaggedTree
    level_colours: list
    colour: int
    verdict: str = "LevelHomogeneous"

    def to_json(self):
        return {"verdict": self.verdict, "level_colours": self.level_colours,
                "subtree": self.subtree.to_json()}


def level_homogenize(tt, labels):
    """A positive subtree on which the node labels depend only on depth.

    Each maximal node is coloured by the sequence of labels along its path;
    homogenizing that colouring leaves one sequence on every branch.  The
    subtree returned is every position from which player I still wins.
    """
    labels = {tuple(k): v for k, v in labels.items()}
    missing = [n for n in tt.nodes if n not in labels]
    if missing:
        raise InputError(f"label missing at {list(min(missing))}", witness=list(min(missing)))
    seqs = {leaf: tuple(labels[leaf[:k]] for k in range(len(leaf) + 1)) for leaf in tt.tree.leaves()}
    palette = sorted(set(seqs.values()))
    index = {s: i for i, s in enumerate(palette)}
    colouring = {leaf: index[s] for leaf, s in seqs.items()}
    res = homogenize(tt, colouring, len(palette))
    if isinstance(res, Counterexample):
        return res
    # keep every winning position, not only those one strategy visits
    board = board_of(tt)
    win = winning_region(board, Rules(leaf_wins=lambda n: colouring[n] == res.colour))
    return LevelResult(tt.prune_to(winning_nodes(board, win)), list(palette[res.colour]), res.colour)


def verify_level(tt, labels, result):
    labels = {tuple(k): v for k, v in labels.items()}
    for n in result.subtree.nodes:
        if len(n) >= len(result.level_colours) or labels[n] != result.level_colours[len(n)]:
            return f"node {list(n)} breaks the level colouring"
    for leaf in result.subtree.tree.leaves():
        if not tt.tree.is_leaf(leaf):
            return f"{list(leaf)} is maximal in the subtree but not in the tree"
    for n in result.subtree.nodes:
        if tt.is_splitting(n) and frozenset(result.subtree.tree.succ_indices(n)) in tt.tags[n].members:
            return f"kept successors of {list(n)} form a small set"
    if compare_trees(tt, result.subtree).relation < Relation.LEStar:
        return "subtree is not below the tree in the starred order"
    return None


# -- bounded labels ---------------------------------------------------------------------


@dataclass
class BoundResult:
    bound: int
    subtree: TaggedTree
    strategy: Strategy

    def to_json(self):
        return {"verdict": "Bounded", "bound": self.bound, "subtree": self.subtree.to_json()}


def bound_homogenize(tt, labels, mu, max_bound=None):
    """Least alpha with a full positive subtree whose labels all lie below alpha.

    Nodes with fewer than mu successors keep every successor.  The subtree
    is the winning region of player I in the game where I loses on reaching
    a label at or above alpha and II may point at any single successor of a
    node with fewer than mu successors.
    """
    labels = {tuple(k): v for k, v in labels.items()}
    for n in tt.nodes:
        v = labels.get(n)
        if not isinstance(v, int) or v < 0:
            raise InputError(f"label at {list(n)} must be a non-negative integer", witness=list(n))
    board = board_of(tt)
    small = lambda n: 0 < len(board.succ[n]) < mu
    top = max(labels.values()) + 1
    limit = top if max_bound is None else min(top, max_bound)
    rules = None
    for alpha in range(labels[()] + 1, limit + 1):
        rules = Rules(leaf_wins=lambda n: True, node_ok=lambda n, a=alpha: labels[n] < a, keep_all=small)
        win = winning_region(board, rules)
        if win[()]:
            strat = strategy_for_i(board, rules, win)
            return BoundResult(alpha, tt.prune_to(winning_nodes(board, win)), strat)
    alpha = max(limit, labels[()] + 1)
    rules = Rules(leaf_wins=lambda n: True, node_ok=lambda n: labels[n] < alpha, keep_all=small)
    win = winning_region(board, rules)
    strat = strategy_for_ii(board, rules, win)
    diag = sorted({n for n in strat.moves} | {()})
    raise NoBoundAchievable(
        f"no full positive subtree has every label below {alpha}",
        witness={"bound": alpha, "opponent_nodes": [list(n) for n in diag]},
    )


def verify_bound(tt, labels, mu, result):
    labels = {tuple(k): v for k, v in labels.items()}
    sub = result.subtree
    for n in sub.nodes:
        if labels[n] >= result.bound:
            return f"node {list(n)} has label {labels[n]} >= {result.bound}"
        if 0 < len(tt.tree.succ_indices(n)) < mu and sub.tree.succ_indices(n) != tt.tree.succ_indices(n):
            return f"small node {list(n)} lost successors"
        if tt.is_splitting(n) and frozenset(sub.tree.succ_indices(n)) in tt.tags[n].members:
            return f"kept successors of {list(n)} form a small set"
    for leaf in sub.tree.leaves():
        if not tt.tree.is_leaf(leaf):
            return f"{list(leaf)} is maximal in the subtree but not in the tree"
    cmp = compare_trees(tt, sub, mu=mu)
    if cmp.relation < Relation.LEStar or not cmp.le_mu:
        return "subtree fails the starred order with full small nodes"
    return None


# -- covers -------------------------------------------------------------------------------


@dataclass
class CoverResult:
    i: int
    eps: int
    subtree: TaggedTree
    strategy: Strategy

    def to_json(self):
        return {"verdict": "Covered", "i": self.i, "eps": self.eps, "subtree": self.subtree.to_json()}


def cover_homogenize(tt, cover):
    """First (i, eps) in lexicographic order whose set holds a full subtree in the otimes order.

    cover[i][eps] is a set of maximal nodes, increasing in eps, and together
    the sets cover every maximal node.  Non-splitting nodes must keep all of
    their successors, so at those nodes player II chooses the successor.
    """
    board = board_of(tt)
    leaves = set(tt.tree.leaves())
    sets = [[frozenset(tuple(x) for x in b) for b in row] for row in cover]
    union = set().union(*(b for row in sets for b in row)) if sets else set()
    if not leaves <= union:
        raise InputError("the cover misses a maximal node", witness=list(min(leaves - union)))
    for i, row in enumerate(sets):
        for e in range(len(row) - 1):
            if not row[e] <= row[e + 1]:
                raise InputError(f"row {i} is not increasing at {e}", witness=[i, e])
    full = lambda n: bool(board.succ[n]) and n not in board.split
    reports = []
    for i, row in enumerate(sets):
        for e, b in enumerate(row):
            rules = Rules(leaf_wins=b.__contains__, keep_all=full)
            win = winning_region(board, rules)
            if win[()]:
                strat = strategy_for_i(board, rules, win)
                return CoverResult(i, e, tt.prune_to(winning_nodes(board, win)), strat)
            opp = strategy_for_ii(board, rules, win)
            reports.append({"i": i, "eps": e, "branch": [list(n) for n in _least_play(board, rules, opp)]})
    raise NoIndexWins("player I wins for no index", witness=reports)


def _least_play(board, rules, strat_ii):
    node = ()
    out = [node]
    while board.succ[node] and rules.node_ok(node):
        small = strat_ii.moves[node]
        avoid = i_must_avoid(board, rules, node)
        node = node + (next(s for s in board.succ[node] if not (avoid and s in small)),)
        out.append(node)
    return out


def verify_cover(tt, cover, result):
    b = frozenset(tuple(x) for x in cover[result.i][result.eps])
    sub = result.subtree
    for leaf in sub.tree.leaves():
        if not tt.tree.is_leaf(leaf) or leaf not in b:
            return f"maximal node {list(leaf)} is outside the chosen set"
    cmp = compare_trees(tt, sub)
    if cmp.relation < Relation.LEOtimes:
        return f"subtree is only {cmp.relation.name}: {cmp.reason}"
    return None


# -- JSON helpers ---------------------------------------------------------------------------


def colouring_from_json(obj):
    if not isinstance(obj, dict) or not isinstance(obj.get("leaves"), list):
        raise InputError("colouring JSON needs a 'leaves' array")
    assignment = {tuple(e["node"]): e["colour"] for e in obj["leaves"]}
    count = obj.get("colour_count")
    if count is None:
        count = max(assignment.values()) + 1 if assignment else 1
    return assignment, count


def node_map_from_json(obj, key="value"):
    if isinstance(obj, dict) and "nodes" in obj:
        obj = obj["nodes"]
    if not isinstance(obj, list):
        raise InputError("node map JSON must be a list of {node, value} entries")
    return {tuple(e["node"]): e[key] for e in obj}
