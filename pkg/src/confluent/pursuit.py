"""Cops and robbers on strict outerconfluent diagrams.

The two-cop strategy keeps the robber locked to a node interval N[a, b] of
the outer order and shrinks it.  Phases:

* ``block``: one cop sits on ``a``, an edge ``ab`` closes the interval and the
  other cop walks to ``b``.  The single cop already locks the robber.
* ``pair``: cops on ``u`` and ``v`` with ``uv`` an edge.  The extremal
  neighbours ``w`` (of u) and ``x`` (of v) decide the move: swap the cops onto
  a shorter side, or step both onto ``w`` and ``x``.
* ``catch``: cops on non-adjacent ``w`` and ``x``; the cop next to the
  robber's side steps to its extremal neighbour inside the interval.
* ``escape``: the cops just stepped onto ``w`` and ``x`` while the robber can
  still reach an outer side; the next turn picks the lock it ends up in.

Every claimed lock is checked with :func:`is_locked` on the derived graph.
A move outside the case analysis, or a lock that does not hold, falls back
to a small search over all cop moves for a verified shorter lock.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass, field

from confluent.diagram import ConfluentDiagram, DiagramError, derive_graph
from confluent.graph import Graph, GraphError, SizeCapExceeded

SOLVER_CAP = 12


class StrategyError(RuntimeError):
    """The strategy lost its lock on the robber; signals an engine bug."""


# --- intervals and locks ------------------------------------------------------

def _order(d: ConfluentDiagram) -> list[str]:
    if d.outer_order is None:
        raise DiagramError("diagram has no outer order")
    return list(d.outer_order.order)


def _between(order: list[str], u: str, v: str) -> list[str]:
    i, j = order.index(u), order.index(v)
    n = len(order)
    out = []
    k = (i + 1) % n
    while k != j:
        out.append(order[k])
        k = (k + 1) % n
    return out


def node_interval(d: ConfluentDiagram, u: str, v: str) -> list[str]:
    """Nodes strictly between u and v, clockwise."""
    order = _order(d)
    if u == v:
        raise DiagramError("interval needs two distinct nodes")
    for x in (u, v):
        if x not in order:
            raise DiagramError(f"unknown node {x!r}")
    return _between(order, u, v)


def _graph(d) -> Graph:
    return d if isinstance(d, Graph) else derive_graph(d)


def _locked(g: Graph, cops, r: str, interval) -> bool:
    inside = set(interval)
    blocked = set(cops)
    for c in cops:
        blocked |= g.neighbors(c)
    seen = {r}
    queue = deque([r])
    while queue:
        x = queue.popleft()
        if x not in inside:
            return False
        for y in g.neighbors(x):
            if y not in seen and y not in blocked:
                seen.add(y)
                queue.append(y)
    return True


def is_locked(d, cops, r: str, interval) -> bool:
    """True when, with the cops' closed neighbourhoods removed, the robber's
    component stays inside ``interval``."""
    if r not in interval:
        raise GraphError(f"robber {r!r} is outside the interval")
    return _locked(_graph(d), cops, r, interval)


@dataclass(frozen=True)
class Extremal:
    w: str | None   # last neighbour of u clockwise in N[u, v]
    x: str | None   # last neighbour of v counterclockwise in N[u, v]
    pair: tuple[str, str] | None

    @property
    def is_extremal_pair(self) -> bool:
        return self.pair is not None


def _extremal(g: Graph, order, u: str, v: str) -> Extremal:
    inner = _between(order, u, v)
    nu = [y for y in inner if g.has_edge(u, y)]
    nv = [y for y in inner if g.has_edge(v, y)]
    w = nu[-1] if nu else None
    x = nv[0] if nv else None
    pair = None
    if w is not None and x is not None:
        if inner.index(w) < inner.index(x):
            pair = (w, x)
    elif w is not None:
        pair = (w, v)
    elif x is not None:
        pair = (u, x)
    return Extremal(w, x, pair)


def extremal(d: ConfluentDiagram, u: str, v: str) -> Extremal:
    return _extremal(_graph(d), _order(d), u, v)


# --- game state and phases ----------------------------------------------------

@dataclass(frozen=True)
class GameState:
    cops: tuple[str, str]
    robber: str | None
    to_move: str  # "cops" or "robber"


@dataclass(frozen=True)
class StrategyPhase:
    locked_interval: tuple[str, ...]
    anchors: tuple[str, str]
    case: str  # "block", "pair", "catch", "escape", "endgame"

    def to_json(self) -> dict:
        return {"locked_interval": list(self.locked_interval), "anchors": list(self.anchors), "case": self.case}


class _Board:
    def __init__(self, g: Graph, order: list[str]):
        self.g = g
        self.order = order
        self._dist: dict[str, dict[str, int]] = {}

    def between(self, a, b):
        return _between(self.order, a, b)

    def dist(self, a: str) -> dict[str, int]:
        if a not in self._dist:
            out = {a: 0}
            queue = deque([a])
            while queue:
                x = queue.popleft()
                for y in sorted(self.g.neighbors(x)):
                    if y not in out:
                        out[y] = out[x] + 1
                        queue.append(y)
            self._dist[a] = out
        return self._dist[a]

    def step(self, src: str, dst: str) -> str:
        """Next node on a shortest path (smallest id among ties)."""
        if src == dst:
            return src
        dd = self.dist(dst)
        if src not in dd:
            raise StrategyError(f"{dst} unreachable from {src}")
        return min(y for y in self.g.neighbors(src) if dd.get(y) == dd[src] - 1)

    def phase(self, a: str, b: str, case: str, anchors=None) -> StrategyPhase:
        return StrategyPhase(tuple(self.between(a, b)), anchors or (a, b), case)


def _pair_phase(board: _Board, a: str, b: str) -> StrategyPhase:
    case = "pair" if board.g.has_edge(a, b) else "catch"
    return board.phase(a, b, case)


def _side(board: _Board, a: str, b: str, r: str) -> tuple[str, str]:
    """Orientation (a, b) or (b, a) whose interval holds r."""
    return (a, b) if r in board.between(a, b) else (b, a)


def _candidate_locks(board: _Board, cops, r: str):
    """Every lock the current cops certify: (interval length, phase)."""
    out = []
    cset = sorted(set(cops))
    if len(cset) == 2:
        a, b = _side(board, *cset, r)
        iv = board.between(a, b)
        if r in iv and _locked(board.g, cops, r, iv):
            out.append((len(iv), 0, _pair_phase(board, a, b)))
    for c in cset:
        for q in sorted(board.g.neighbors(c)):
            if q == r:
                continue
            for a, b in ((c, q), (q, c)):
                iv = board.between(a, b)
                if r in iv and _locked(board.g, (c,), r, iv):
                    out.append((len(iv), 1, StrategyPhase(tuple(iv), (c, q), "block")))
    out.sort(key=lambda t: (t[0], t[1], t[2].anchors))
    return out


def _anchor(phase: StrategyPhase) -> str:
    """The cop node that holds a block lock on its own (block anchors are (cop, partner))."""
    return phase.anchors[0]


class TwoCopStrategy:
    """Stateful cop player; one instance per game."""

    def __init__(self, d: ConfluentDiagram):
        self.d = d
        self.g = derive_graph(d)
        if not self.g.is_connected():
            raise DiagramError("the strategy needs a connected graph")
        self.board = _Board(self.g, _order(d))
        self.phase: StrategyPhase | None = None
        self.block_anchor: str | None = None
        self.fallbacks = 0

    def place(self) -> tuple[str, str]:
        edges = self.g.sorted_edges()
        if not edges:
            v = self.g.vertices[0]
            return (v, v)
        return edges[0]

    # -- one cop turn ------------------------------------------------------

    def step(self, cops: tuple[str, str], r: str) -> tuple[tuple[str, str], StrategyPhase]:
        g = self.g
        for k, c in enumerate(cops):
            if c == r or g.has_edge(c, r):
                moved = list(cops)
                moved[k] = r
                self.phase = StrategyPhase((r,), (r, r), "endgame")
                return tuple(moved), self.phase
        self._refresh(cops, r)
        target = self._planned(cops, r)
        if target is None:
            self.fallbacks += 1
            target = self._search(cops, r)
        return target

    def _refresh(self, cops, r):
        """Keep the current lock unless the robber left it or a shorter one exists."""
        cands = _candidate_locks(self.board, cops, r)
        if not cands:
            raise StrategyError(f"robber {r} is not locked by cops {cops}")
        best = cands[0][2]
        cur = self.phase
        keep = False
        if cur is not None and cur.case in ("block", "pair", "catch") and r in cur.locked_interval:
            if cur.case == "block":
                keep = _locked(self.g, (_anchor(cur),), r, cur.locked_interval) and _anchor(cur) in cops
            else:
                keep = _locked(self.g, cops, r, cur.locked_interval) and set(cur.anchors) == set(cops)
            keep = keep and len(cur.locked_interval) <= len(best.locked_interval)
        if not keep:
            self.phase = best

    def _planned(self, cops, r):
        ph = self.phase
        b = self.board
        if ph.case == "block":
            a, other = ph.anchors
            k = 0 if cops[0] == a else 1
            walker = cops[1 - k]
            if walker == other:
                # both cops in place: the block became a pair
                self.phase = _pair_phase(b, *_side(b, a, other, r))
                return self._planned(cops, r)
            nxt = list(cops)
            nxt[1 - k] = b.step(walker, other)
            return self._verify(cops, tuple(nxt), r, ph)
        u, v = ph.anchors
        if {u, v} != set(cops):
            return None
        if ph.case == "pair":
            return self._pair_move(cops, r, u, v)
        return self._catch_move(cops, r, u, v)

    def _move(self, cops, to_u, to_v, u, v):
        """Cops standing on u and v move to to_u and to_v respectively."""
        if cops[0] == u:
            return (to_u, to_v)
        return (to_v, to_u)

    def _pair_move(self, cops, r, u, v):
        b = self.board
        ex = _extremal(self.g, b.order, u, v)
        w, x = ex.w, ex.x
        inner = b.between(u, v)
        pos = inner.index(r)

        def before(node):  # robber strictly before node inside N[u, v]
            return node is not None and pos < inner.index(node)

        def after(node):
            return node is not None and pos > inner.index(node)

        if w is not None and before(w):
            # swap: the cop on v goes to u, the cop on u goes to w
            return self._verify(cops, self._move(cops, w, u, u, v), r, b.phase(u, w, "pair"))
        if x is not None and after(x):
            return self._verify(cops, self._move(cops, v, x, u, v), r, b.phase(x, v, "pair"))
        a2 = w if w is not None else u
        b2 = x if x is not None else v
        if a2 == u and b2 == v:
            return None
        nxt = self._move(cops, a2, b2, u, v)
        done = self._verify(cops, nxt, r, _pair_phase(b, a2, b2))
        if done is None:
            # the robber may still slip to the outer sides, where a single
            # cop on w or x catches it; next turn re-derives the lock
            done = self._verify(cops, nxt, r, StrategyPhase(tuple(inner), (u, v), "escape"))
        return done

    def _catch_move(self, cops, r, w, x):
        b = self.board
        inner = b.between(w, x)
        pos = inner.index(r)
        nx = [y for y in inner if self.g.has_edge(x, y)]
        nw = [y for y in inner if self.g.has_edge(w, y)]
        if nx:
            y = nx[0]
            if pos > inner.index(y):
                # the cop on x alone holds N[y, x]; the other cop walks to y
                return self._verify(cops, self._move(cops, b.step(w, y), x, w, x), r,
                                    StrategyPhase(tuple(b.between(y, x)), (x, y), "block"))
            return self._verify(cops, self._move(cops, w, y, w, x), r, _pair_phase(b, w, y))
        if nw:
            y = nw[-1]
            if pos < inner.index(y):
                return self._verify(cops, self._move(cops, w, b.step(x, y), w, x), r,
                                    StrategyPhase(tuple(b.between(w, y)), (w, y), "block"))
            return self._verify(cops, self._move(cops, y, x, w, x), r, _pair_phase(b, y, x))
        return None

    def _verify(self, cops, nxt, r, phase: StrategyPhase):
        """Accept a planned move if the promised lock holds after it."""
        g = self.g
        if any(not (a == c or g.has_edge(a, c)) for a, c in zip(cops, nxt)):
            return None
        if r not in phase.locked_interval:
            return None
        if phase.case == "block":
            a = _anchor(phase)
            if a not in nxt or not _locked(g, (a,), r, phase.locked_interval):
                return None
        elif not _locked(g, nxt, r, phase.locked_interval):
            return None
        if self.phase is not None and len(phase.locked_interval) > len(self.phase.locked_interval):
            return None
        self.phase = phase
        return nxt, phase

    def _search(self, cops, r):
        """Any legal move whose certified lock is shortest (ties: closest to the robber)."""
        g = self.g
        opts = [sorted({c, *g.neighbors(c)}) for c in cops]
        best = None
        for nxt in itertools.product(*opts):
            cands = _candidate_locks(self.board, nxt, r)
            if not cands:
                continue
            size = cands[0][0]
            near = sum(self.board.dist(r).get(c, 99) for c in nxt)
            key = (size, near, nxt)
            if best is None or key < best[0]:
                best = (key, tuple(nxt), cands[0][2])
        if best is None:
            raise StrategyError(f"no move keeps the robber at {r} locked")
        self.phase = best[2]
        return best[1], best[2]


def cop_strategy_step(d: ConfluentDiagram, phase: StrategyPhase | None, state: GameState,
                      strategy: TwoCopStrategy | None = None):
    """One cop move of the two-cop strategy from ``state`` in ``phase``."""
    s = strategy or TwoCopStrategy(d)
    s.phase = phase
    if state.robber is None:
        raise StrategyError("robber not placed")
    if phase is not None and phase.case != "endgame" and state.robber not in phase.locked_interval:
        if not any(state.robber == c or s.g.has_edge(state.robber, c) for c in state.cops):
            raise StrategyError("robber is not inside the locked interval")
    return s.step(tuple(state.cops), state.robber)


# --- exact solver ---------------------------------------------------------------

class GameSolver:
    """Capture times under optimal play for k cops (retrograde analysis).

    ``cop_time[(cops, r)]``: cop moves still needed when the cops are to move;
    ``robber_time[(cops, r)]``: the same when the robber is to move.
    Missing entries are robber wins.
    """

    def __init__(self, g: Graph, k: int, cap: int = SOLVER_CAP):
        if k not in (1, 2):
            raise ValueError("k must be 1 or 2")
        if len(g) > cap:
            raise SizeCapExceeded(f"solver limited to {cap} vertices")
        self.g, self.k = g, k
        vs = sorted(g.vertices)
        self.positions = [tuple(p) for p in itertools.combinations_with_replacement(vs, k)]
        self.closed = {v: sorted({v, *g.neighbors(v)}) for v in vs}
        self.cop_time: dict = {}
        self.robber_time: dict = {}
        self._solve(vs)

    def cop_moves(self, cops):
        return sorted({tuple(sorted(p)) for p in itertools.product(*(self.closed[c] for c in cops))})

    def _solve(self, vs):
        ct, rt = self.cop_time, self.robber_time
        for cops in self.positions:
            for r in vs:
                if r in cops:
                    rt[(cops, r)] = 0
        changed = True
        while changed:
            changed = False
            for cops in self.positions:
                moves = self.cop_moves(cops)
                for r in vs:
                    key = (cops, r)
                    best = min((rt[(m, r)] + 1 for m in moves if (m, r) in rt), default=None)
                    if best is not None and ct.get(key, 1 << 30) > best:
                        ct[key] = best
                        changed = True
                    if r in cops:
                        continue
                    vals = [ct.get((cops, y)) for y in self.closed[r]]
                    if all(t is not None for t in vals):
                        worst = max(vals)
                        if rt.get(key, 1 << 30) > worst:
                            rt[key] = worst
                            changed = True

    def placement_value(self, cops) -> int | None:
        """Moves to capture once the robber picks its best start against ``cops``."""
        vals = [0 if r in cops else self.cop_time.get((tuple(sorted(cops)), r)) for r in sorted(self.g.vertices)]
        return None if any(v is None for v in vals) else max(vals)

    def cops_win(self) -> bool:
        return any(self.placement_value(c) is not None for c in self.positions)


def solve_cop_number_at_most(g: Graph, k: int, cap: int = SOLVER_CAP) -> bool:
    if len(g) == 0:
        return True
    return GameSolver(g, k, cap).cops_win()


# --- robber policies -------------------------------------------------------------

class RobberPolicy:
    def place(self, g: Graph, cops) -> str:
        raise NotImplementedError

    def move(self, g: Graph, cops, r: str) -> str:
        raise NotImplementedError


class OptimalRobber(RobberPolicy):
    """Maximises the optimal cops' remaining capture time."""

    def __init__(self, g: Graph):
        self.solver = GameSolver(g, 2, cap=max(SOLVER_CAP, len(g)))

    def _value(self, cops, r):
        if r in cops:
            return -1
        t = self.solver.cop_time.get((tuple(sorted(cops)), r))
        return 1 << 20 if t is None else t

    def place(self, g, cops):
        return max(sorted(g.vertices), key=lambda r: (self._value(cops, r), r))

    def move(self, g, cops, r):
        return max(sorted({r, *g.neighbors(r)}), key=lambda y: (self._value(cops, y), y))


class GreedyRobber(RobberPolicy):
    """Moves to the node farthest from the nearest cop."""

    @staticmethod
    def _gap(g, cops, y):
        best = None
        for c in cops:
            seen = {c: 0}
            queue = deque([c])
            while queue:
                x = queue.popleft()
                for z in g.neighbors(x):
                    if z not in seen:
                        seen[z] = seen[x] + 1
                        queue.append(z)
            dist = seen.get(y, 1 << 20)
            best = dist if best is None else min(best, dist)
        return best

    def place(self, g, cops):
        return max(sorted(g.vertices), key=lambda y: (self._gap(g, cops, y), y))

    def move(self, g, cops, r):
        return max(sorted({r, *g.neighbors(r)}), key=lambda y: (self._gap(g, cops, y), y))


class RandomRobber(RobberPolicy):
    def __init__(self, seed: int = 0):
        self.rng = random.Random(seed)

    def place(self, g, cops):
        return self.rng.choice(sorted(g.vertices))

    def move(self, g, cops, r):
        return self.rng.choice(sorted({r, *g.neighbors(r)}))


class InteractiveRobber(RobberPolicy):
    """Reads moves from a prompt function (``input`` by default)."""

    def __init__(self, ask=input, say=print):
        self.ask, self.say = ask, say

    def _read(self, options, prompt):
        while True:
            got = self.ask(f"{prompt} {options}: ").strip()
            if got in options:
                return got
            self.say(f"not a legal choice: {got!r}")

    def place(self, g, cops):
        self.say(f"cops on {list(cops)}")
        return self._read(sorted(g.vertices), "place robber on")

    def move(self, g, cops, r):
        self.say(f"cops on {list(cops)}, robber on {r}")
        return self._read(sorted({r, *g.neighbors(r)}), "move robber to")


def robber_policy(spec: str, g: Graph, **kw) -> RobberPolicy:
    """Policy from a name: optimal, greedy, random:SEED or interactive."""
    if spec == "optimal":
        return OptimalRobber(g)
    if spec == "greedy":
        return GreedyRobber()
    if spec.startswith("random"):
        _, _, seed = spec.partition(":")
        return RandomRobber(int(seed or kw.get("seed", 0)))
    if spec == "interactive":
        return InteractiveRobber(**kw)
    raise ValueError(f"unknown robber policy {spec!r}")


# --- game loop -------------------------------------------------------------------

@dataclass
class Outcome:
    captured: bool
    moves: int
    transcript: list = field(default_factory=list)
    phases: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"captured": self.captured, "moves": self.moves, "transcript": self.transcript,
                "phases": [p.to_json() if p else None for p in self.phases]}


def play(d: ConfluentDiagram, robber: RobberPolicy, max_moves: int | None = None) -> Outcome:
    """Full game: cops place, robber places, then alternate until capture.

    ``moves`` counts cop moves after the placement.
    """
    strat = TwoCopStrategy(d)
    g = strat.g
    limit = max_moves if max_moves is not None else 4 * len(d.nodes)
    cops = strat.place()
    r = robber.place(g, cops)
    out = Outcome(False, 0)
    out.transcript.append({"cops": list(cops), "robber": r})
    if r in cops:
        out.captured = True
        return out
    a, b = cops
    if a != b:
        a, b = _side(strat.board, a, b, r)
        strat.phase = _pair_phase(strat.board, a, b)
    while out.moves < limit:
        cops, phase = strat.step(cops, r)
        out.moves += 1
        out.phases.append(phase)
        out.transcript.append({"cops": list(cops)})
        if r in cops:
            out.captured = True
            return out
        r = robber.move(g, cops, r)
        out.transcript.append({"robber": r})
        if r in cops:
            out.captured = True
            return out
    return out
