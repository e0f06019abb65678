"""Confluent diagrams: data model, smooth paths and the derived graph.

Smoothness is combinatorial.  A binary junction has ports ``trunk``,
``branch_left`` and ``branch_right``; a smooth passage pairs the trunk with
either branch.  A delta junction has ports ``p1``, ``p2``, ``p3`` and every
pair of distinct ports is smooth.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import defaultdict, deque
from dataclasses import dataclass, replace
from typing import Iterable, Iterator

from confluent import geometry as geo
from confluent.graph import CyclicOrder, Graph, induced_subgraph

BINARY = "binary"
DELTA = "delta"
BINARY_PORTS = ("trunk", "branch_left", "branch_right")
DELTA_PORTS = ("p1", "p2", "p3")
PORTS = {BINARY: BINARY_PORTS, DELTA: DELTA_PORTS}
SMOOTH = {
    BINARY: {"trunk": ("branch_left", "branch_right"),
             "branch_left": ("trunk",), "branch_right": ("trunk",)},
    DELTA: {"p1": ("p2", "p3"), "p2": ("p1", "p3"), "p3": ("p1", "p2")},
}


class DiagramError(ValueError):
    pass


class DegeneratePolyline(DiagramError):
    pass


class NotStrict(DiagramError):
    pass


class NotTreeLike(DiagramError):
    pass


@dataclass(frozen=True, order=True)
class Endpoint:
    """Either a node, or a port of a junction."""

    node: str | None = None
    junction: str | None = None
    port: str | None = None

    @property
    def is_node(self) -> bool:
        return self.node is not None

    def to_json(self) -> dict:
        if self.is_node:
            return {"node": self.node}
        return {"junction": self.junction, "port": self.port}

    @classmethod
    def from_json(cls, doc) -> "Endpoint":
        if "node" in doc:
            return cls(node=str(doc["node"]))
        return cls(junction=str(doc["junction"]), port=str(doc["port"]))

    def __str__(self) -> str:
        return self.node if self.is_node else f"{self.junction}.{self.port}"


def N(node: str) -> Endpoint:
    return Endpoint(node=node)


def J(junction: str, port: str) -> Endpoint:
    return Endpoint(junction=junction, port=port)


@dataclass(frozen=True)
class Junction:
    id: str
    kind: str
    point: tuple[float, float]


@dataclass(frozen=True)
class Arc:
    id: str
    a: Endpoint
    b: Endpoint
    polyline: tuple[tuple[float, float], ...]

    def end(self, side: str) -> Endpoint:
        return self.a if side == "a" else self.b


@dataclass(frozen=True)
class SmoothPath:
    """A smooth walk: ``steps`` are (arc id, forward) traversals."""

    steps: tuple[tuple[str, bool], ...]
    endpoints: tuple[str, str]

    def arcs(self) -> list[str]:
        return [a for a, _ in self.steps]

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class EdgePartition:
    simple_edges: frozenset
    confluent_edges: frozenset


@dataclass(frozen=True)
class Verdict:
    """Outcome of a check: ``ok`` plus a kind tag and an optional witness."""

    ok: bool
    kind: str
    witness: object = None

    def __bool__(self) -> bool:
        return self.ok


class ConfluentDiagram:
    """Nodes, junctions and arcs with their geometry.

    ``outer_order`` is present for outerconfluent diagrams.  ``node_rotation``
    lists, for each node, incident arc ends as ``"<arc>:<side>"`` strings in
    counterclockwise order; it is derived from geometry when omitted.
    """

    def __init__(self, nodes, junctions=(), arcs=(), outer_order=None, node_rotation=None,
                 meta=None, partial: bool = False):
        self.nodes: dict[str, tuple[float, float]] = {}
        for item in nodes:
            nid, x, y = item
            nid = str(nid)
            if nid in self.nodes:
                raise DiagramError(f"duplicate node {nid!r}")
            self.nodes[nid] = (float(x), float(y))
        self.junctions: dict[str, Junction] = {}
        for item in junctions:
            if isinstance(item, Junction):
                j = item
            else:
                jid, kind, x, y = item
                j = Junction(str(jid), kind, (float(x), float(y)))
            if j.kind not in PORTS:
                raise DiagramError(f"unknown junction kind {j.kind!r}")
            if j.id in self.junctions or j.id in self.nodes:
                raise DiagramError(f"duplicate id {j.id!r}")
            self.junctions[j.id] = j
        self.arcs: dict[str, Arc] = {}
        for item in arcs:
            if isinstance(item, Arc):
                arc = item
            else:
                aid, a, b, poly = item
                arc = Arc(str(aid), a, b, tuple((float(x), float(y)) for x, y in poly))
            if arc.id in self.arcs:
                raise DiagramError(f"duplicate arc {arc.id!r}")
            self.arcs[arc.id] = arc
        self.outer_order = CyclicOrder(outer_order) if outer_order is not None else None
        self.meta = dict(meta or {})
        self._port_arc: dict[tuple[str, str], tuple[str, str]] = {}
        self._node_arcs: dict[str, list[tuple[str, str]]] = {n: [] for n in self.nodes}
        for arc in self.arcs.values():
            for side in ("a", "b"):
                e = arc.end(side)
                if e.is_node:
                    if e.node not in self.nodes:
                        raise DiagramError(f"arc {arc.id} uses unknown node {e.node!r}")
                    self._node_arcs[e.node].append((arc.id, side))
                else:
                    j = self.junctions.get(e.junction)
                    if j is None:
                        raise DiagramError(f"arc {arc.id} uses unknown junction {e.junction!r}")
                    if e.port not in PORTS[j.kind]:
                        raise DiagramError(f"junction {j.id} ({j.kind}) has no port {e.port!r}")
                    key = (e.junction, e.port)
                    if key in self._port_arc:
                        raise DiagramError(f"port {e.junction}.{e.port} bound twice")
                    self._port_arc[key] = (arc.id, side)
            if len(arc.polyline) < 2:
                raise DegeneratePolyline(f"arc {arc.id} needs at least two points")
        if not partial:
            for j in self.junctions.values():
                for p in PORTS[j.kind]:
                    if (j.id, p) not in self._port_arc:
                        raise DiagramError(f"port {j.id}.{p} is unbound")
        if self.outer_order is not None and not self.outer_order.is_permutation_of(self.nodes):
            raise DiagramError("outer_order is not a permutation of the nodes")
        self.node_rotation = (dict((k, list(v)) for k, v in node_rotation.items())
                              if node_rotation else self._rotation_from_geometry())

    # -- structure ---------------------------------------------------------

    def point(self, e: Endpoint) -> tuple[float, float]:
        return self.nodes[e.node] if e.is_node else self.junctions[e.junction].point

    def arc_at_port(self, junction: str, port: str) -> tuple[str, str] | None:
        return self._port_arc.get((junction, port))

    def node_arcs(self, node: str) -> list[tuple[str, str]]:
        return list(self._node_arcs[node])

    def junction_arcs(self, junction: str) -> list[tuple[str, str, str]]:
        """(port, arc id, side) for each bound port of the junction."""
        kind = self.junctions[junction].kind
        out = []
        for p in PORTS[kind]:
            hit = self._port_arc.get((junction, p))
            if hit:
                out.append((p, hit[0], hit[1]))
        return out

    def node_ids(self) -> list[str]:
        return list(self.nodes)

    def _rotation_from_geometry(self) -> dict[str, list[str]]:
        rot = {}
        for n, ends in self._node_arcs.items():
            px, py = self.nodes[n]

            def ang(end):
                arc = self.arcs[end[0]]
                pts = arc.polyline if end[1] == "a" else arc.polyline[::-1]
                qx, qy = pts[1]
                return math.atan2(qy - py, qx - px)

            rot[n] = [f"{a}:{s}" for a, s in sorted(ends, key=lambda e: (ang(e), e))]
        return rot

    def copy(self, **changes) -> "ConfluentDiagram":
        kw = dict(nodes=[(n, *p) for n, p in self.nodes.items()],
                  junctions=list(self.junctions.values()),
                  arcs=list(self.arcs.values()),
                  outer_order=self.outer_order.order if self.outer_order else None,
                  meta=self.meta)
        kw.update(changes)
        return ConfluentDiagram(**kw)

    def transformed(self, fn) -> "ConfluentDiagram":
        """Apply a point map to all coordinates."""
        return ConfluentDiagram(
            nodes=[(n, *fn(p)) for n, p in self.nodes.items()],
            junctions=[replace(j, point=tuple(fn(j.point))) for j in self.junctions.values()],
            arcs=[replace(a, polyline=tuple(tuple(fn(p)) for p in a.polyline)) for a in self.arcs.values()],
            outer_order=self.outer_order.order if self.outer_order else None,
            meta=self.meta)

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        doc = {
            "nodes": [{"id": n, "x": _r(p[0]), "y": _r(p[1])} for n, p in self.nodes.items()],
            "junctions": [{"id": j.id, "kind": j.kind, "x": _r(j.point[0]), "y": _r(j.point[1])}
                          for j in self.junctions.values()],
            "arcs": [{"id": a.id, "a": a.a.to_json(), "b": a.b.to_json(),
                      "polyline": [[_r(x), _r(y)] for x, y in a.polyline]}
                     for a in self.arcs.values()],
            "node_rotation": self.node_rotation,
        }
        if self.outer_order is not None:
            doc["outer_order"] = list(self.outer_order.order)
        if self.meta:
            doc["meta"] = self.meta
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "ConfluentDiagram":
        try:
            return cls(
                nodes=[(n["id"], n["x"], n["y"]) for n in doc["nodes"]],
                junctions=[(j["id"], j["kind"], j["x"], j["y"]) for j in doc.get("junctions", [])],
                arcs=[(a["id"], Endpoint.from_json(a["a"]), Endpoint.from_json(a["b"]), a["polyline"])
                      for a in doc.get("arcs", [])],
                outer_order=doc.get("outer_order"),
                node_rotation=doc.get("node_rotation"),
                meta=doc.get("meta"),
            )
        except (KeyError, TypeError) as exc:
            raise DiagramError(f"malformed diagram document: {exc}") from exc

    @classmethod
    def load(cls, path) -> "ConfluentDiagram":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def __repr__(self) -> str:
        kind = "outer" if self.outer_order else "plain"
        return (f"ConfluentDiagram({kind}, nodes={len(self.nodes)}, junctions={len(self.junctions)}, "
                f"arcs={len(self.arcs)})")


def _r(v: float) -> float:
    return round(float(v), 9)


# -- smooth paths -----------------------------------------------------------

def _start_states(d: ConfluentDiagram, u: str) -> list[tuple[str, bool]]:
    return [(aid, side == "a") for aid, side in d.node_arcs(u)]


def _arrive(d: ConfluentDiagram, state: tuple[str, bool]) -> Endpoint:
    arc = d.arcs[state[0]]
    return arc.b if state[1] else arc.a


def _successors(d: ConfluentDiagram, state: tuple[str, bool]) -> list[tuple[str, bool]]:
    end = _arrive(d, state)
    if end.is_node:
        return []
    kind = d.junctions[end.junction].kind
    out = []
    for q in SMOOTH[kind][end.port]:
        hit = d.arc_at_port(end.junction, q)
        if hit is not None:
            out.append((hit[0], hit[1] == "a"))
    return out


def iter_smooth_walks(d: ConfluentDiagram, u: str, limit: int | None = None) -> Iterator[SmoothPath]:
    """All smooth walks from node ``u`` that never repeat a directed arc."""
    if u not in d.nodes:
        raise DiagramError(f"unknown node {u!r}")
    count = 0
    for s in _start_states(d, u):
        stack = [(s, (s,), frozenset([s]))]
        while stack:
            state, steps, used = stack.pop()
            end = _arrive(d, state)
            if end.is_node:
                yield SmoothPath(steps, (u, end.node))
                count += 1
                if limit is not None and count >= limit:
                    return
                continue
            for nxt in reversed(_successors(d, state)):
                if nxt not in used:
                    stack.append((nxt, steps + (nxt,), used | {nxt}))


def enumerate_smooth_paths(d: ConfluentDiagram, u: str, v: str) -> list[SmoothPath]:
    if v not in d.nodes:
        raise DiagramError(f"unknown node {v!r}")
    return [p for p in iter_smooth_walks(d, u) if p.endpoints[1] == v]


def path_junctions(d: ConfluentDiagram, p: SmoothPath) -> list[str]:
    out = []
    for state in p.steps[:-1]:
        out.append(_arrive(d, state).junction)
    return out


def reachable_nodes(d: ConfluentDiagram, u: str) -> set[str]:
    """Nodes reachable from ``u`` by some smooth walk (BFS on directed arcs).

    A walk repeating a directed arc can be shortcut, so plain reachability in
    the state graph decides existence of a non-repeating walk.
    """
    seen = set(_start_states(d, u))
    queue = deque(seen)
    out = set()
    while queue:
        st = queue.popleft()
        end = _arrive(d, st)
        if end.is_node:
            out.add(end.node)
            continue
        for nxt in _successors(d, st):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return out


def derive_graph(d: ConfluentDiagram) -> Graph:
    edges = set()
    for u in d.nodes:
        for v in reachable_nodes(d, u):
            if v != u:
                edges.add((u, v) if u < v else (v, u))
    return Graph(list(d.nodes), edges)


def _state_bfs(d: ConfluentDiagram, starts, goal) -> list | None:
    """Shortest state sequence from one of ``starts`` to a state satisfying ``goal``."""
    prev = {s: None for s in starts}
    queue = deque(starts)
    while queue:
        st = queue.popleft()
        if goal(st):
            out = [st]
            while prev[out[-1]] is not None:
                out.append(prev[out[-1]])
            return out[::-1]
        for nxt in _successors(d, st):
            if nxt not in prev:
                prev[nxt] = st
                queue.append(nxt)
    return None


def find_smooth_cycle(d: ConfluentDiagram) -> tuple[SmoothPath, SmoothPath] | None:
    """Two node-to-node walks that differ by one turn around a smooth cycle.

    A smooth closed loop of directed arcs that some node can enter and from
    which some node can be reached yields infinitely many smooth curves
    between those nodes (one per extra turn).  Walk enumeration that forbids
    repeating a directed arc cannot see this, so it is checked separately on
    the graph of directed-arc states.
    """
    states = [(aid, fwd) for aid in d.arcs for fwd in (True, False)]
    succ = {st: _successors(d, st) for st in states}
    pred: dict = {st: [] for st in states}
    for st, nxts in succ.items():
        for n in nxts:
            pred[n].append(st)
    reach = set()
    stack = [st for u in d.nodes for st in _start_states(d, u)]
    while stack:
        st = stack.pop()
        if st not in reach:
            reach.add(st)
            stack.extend(succ[st])
    coreach = set()
    stack = [st for st in states if _arrive(d, st).is_node]
    while stack:
        st = stack.pop()
        if st not in coreach:
            coreach.add(st)
            stack.extend(pred[st])
    live = reach & coreach
    # iterative DFS for a back edge inside the live states
    color: dict = {}
    for root in sorted(live):
        if root in color:
            continue
        path = [root]
        color[root] = 1
        iters = [iter([n for n in succ[root] if n in live])]
        while iters:
            nxt = next(iters[-1], None)
            if nxt is None:
                color[path.pop()] = 2
                iters.pop()
                continue
            if color.get(nxt) == 1:
                cycle = path[path.index(nxt):]
                return _cycle_walks(d, cycle)
            if nxt not in color:
                color[nxt] = 1
                path.append(nxt)
                iters.append(iter([n for n in succ[nxt] if n in live]))
    return None


def _cycle_walks(d: ConfluentDiagram, cycle: list) -> tuple[SmoothPath, SmoothPath]:
    entry = cycle[0]
    for u in sorted(d.nodes):
        pre = _state_bfs(d, _start_states(d, u), lambda st: st == entry)
        if pre is not None:
            break
    post = _state_bfs(d, [entry], lambda st: _arrive(d, st).is_node and _arrive(d, st).node != u)
    if post is None:
        post = _state_bfs(d, [entry], lambda st: _arrive(d, st).is_node)
    v = _arrive(d, post[-1]).node
    once = tuple(pre[:-1]) + tuple(post)
    twice = tuple(pre[:-1]) + tuple(cycle) + tuple(post)
    return SmoothPath(once, (u, v)), SmoothPath(twice, (u, v))


def check_strict(d: ConfluentDiagram) -> Verdict:
    """Strict iff no self-path and at most one path per unordered node pair.

    Paths may run along a smooth closed loop any number of times, so a loop
    that is entered from one node and left towards another also breaks
    strictness (kind ``smooth_cycle``).  Duplicate paths between distinct nodes are reported in preference to a
    self-path, since they name two endpoints.
    """
    loop = None
    for u in sorted(d.nodes):
        found: dict[str, SmoothPath] = {}
        for p in iter_smooth_walks(d, u):
            v = p.endpoints[1]
            if v == u:
                loop = loop or p
                continue
            if v in found:
                return Verdict(False, "duplicate_paths", (found[v], p))
            found[v] = p
    if loop is not None:
        return Verdict(False, "self_loop", (loop,))
    cyc = find_smooth_cycle(d)
    if cyc is not None:
        return Verdict(False, "smooth_cycle", cyc)
    return Verdict(True, "strict")


def path_counts(d: ConfluentDiagram, cap: int = 1000) -> dict[tuple[str, str], int]:
    """Number of walks per ordered node pair (walks starting at the first)."""
    out: dict[tuple[str, str], int] = defaultdict(int)
    for u in d.nodes:
        for p in iter_smooth_walks(d, u, limit=cap):
            out[(u, p.endpoints[1])] += 1
    return dict(out)


# -- editing helpers -------------------------------------------------------

def without_arcs(d: ConfluentDiagram, arc_ids: Iterable[str]) -> ConfluentDiagram:
    drop = set(arc_ids)
    return ConfluentDiagram(
        nodes=[(n, *p) for n, p in d.nodes.items()],
        junctions=list(d.junctions.values()),
        arcs=[a for a in d.arcs.values() if a.id not in drop],
        outer_order=d.outer_order.order if d.outer_order else None,
        meta=d.meta, partial=True)


def _arc_sort_key(aid: str):
    return [(0, int(t)) if t.isdigit() else (1, t) for t in _split_digits(aid)]


def _split_digits(s: str) -> list[str]:
    out, cur = [], ""
    for ch in s:
        if cur and (ch.isdigit() != cur[-1].isdigit()):
            out.append(cur)
            cur = ""
        cur += ch
    if cur:
        out.append(cur)
    return out


def sorted_arc_ids(d: ConfluentDiagram) -> list[str]:
    return sorted(d.arcs, key=_arc_sort_key)


def cleanup_junctions(d: ConfluentDiagram) -> ConfluentDiagram:
    """Remove unused junctions and splice out junctions left with a smooth pass-through.

    Junctions with a single remaining arc take that arc with them.
    """
    arcs = dict(d.arcs)
    junctions = dict(d.junctions)
    changed = True
    while changed:
        changed = False
        port_arc = {}
        for arc in arcs.values():
            for side in ("a", "b"):
                e = arc.end(side)
                if not e.is_node:
                    port_arc[(e.junction, e.port)] = (arc.id, side)
        for jid in sorted(junctions):
            j = junctions[jid]
            bound = [(p, port_arc[(jid, p)]) for p in PORTS[j.kind] if (jid, p) in port_arc]
            if len(bound) == 3:
                continue
            if len(bound) == 0:
                del junctions[jid]
            elif len(bound) == 1:
                del arcs[bound[0][1][0]]
                del junctions[jid]
            else:
                (p1, (a1, s1)), (p2, (a2, s2)) = bound
                if a1 == a2 or p2 not in SMOOTH[j.kind][p1]:
                    for aid in {a1, a2}:
                        del arcs[aid]
                    del junctions[jid]
                else:
                    arc1, arc2 = arcs.pop(a1), arcs.pop(a2)
                    # orient arc1 to end at the junction and arc2 to start there
                    pts1 = arc1.polyline if s1 == "b" else arc1.polyline[::-1]
                    far1 = arc1.a if s1 == "b" else arc1.b
                    pts2 = arc2.polyline if s2 == "a" else arc2.polyline[::-1]
                    far2 = arc2.b if s2 == "a" else arc2.a
                    merged = Arc(min(a1, a2, key=_arc_sort_key), far1, far2, tuple(pts1) + tuple(pts2[1:]))
                    arcs[merged.id] = merged
                    del junctions[jid]
            changed = True
            break
    return ConfluentDiagram(
        nodes=[(n, *p) for n, p in d.nodes.items()],
        junctions=list(junctions.values()),
        arcs=list(arcs.values()),
        outer_order=d.outer_order.order if d.outer_order else None,
        meta=d.meta)


def reduce(d: ConfluentDiagram) -> ConfluentDiagram:
    """Delete inessential arcs one at a time in ascending id order, restarting
    after each deletion, then tidy up junctions that lost arcs."""
    target = derive_graph(d)
    cur = d
    restart = True
    while restart:
        restart = False
        for aid in sorted_arc_ids(cur):
            trial = without_arcs(cur, [aid])
            if derive_graph(trial).edges == target.edges:
                cur = trial
                restart = True
                break
    out = cleanup_junctions(cur)
    assert derive_graph(out).edges == target.edges
    return out


def is_reduced(d: ConfluentDiagram) -> Verdict:
    target = derive_graph(d).edges
    for aid in sorted_arc_ids(d):
        if derive_graph(without_arcs(d, [aid])).edges == target:
            return Verdict(False, "inessential_arc", aid)
    return Verdict(True, "reduced")


# -- geometry ---------------------------------------------------------------

def _segments(arc: Arc):
    pts = arc.polyline
    return [(pts[i], pts[i + 1]) for i in range(len(pts) - 1)]


def validate_embedding(d: ConfluentDiagram, check_outer: bool = True) -> Verdict:
    """Check polyline endpoints, pairwise non-crossing and outer-face layout."""
    for arc in d.arcs.values():
        for p, q in _segments(arc):
            if p == q:
                raise DegeneratePolyline(f"arc {arc.id} has a zero-length segment")
        if not geo.same_point(arc.polyline[0], d.point(arc.a), 1e-9) or \
                not geo.same_point(arc.polyline[-1], d.point(arc.b), 1e-9):
            return Verdict(False, "endpoint_mismatch", arc.id)
    arcs = list(d.arcs.values())
    segs = {a.id: _segments(a) for a in arcs}
    ends = {a.id: {d.point(a.a), d.point(a.b)} for a in arcs}
    boxes = {}
    for a in arcs:
        xs = [p[0] for p in a.polyline]
        ys = [p[1] for p in a.polyline]
        boxes[a.id] = (min(xs), min(ys), max(xs), max(ys))
    for a in arcs:
        sa = segs[a.id]
        # self-intersection of a single arc
        for i, j in itertools.combinations(range(len(sa)), 2):
            kind, pt = geo.segment_intersection_kind(*sa[i], *sa[j])
            if kind == "none":
                continue
            if j == i + 1 and kind == "point" and pt == sa[i][1]:
                continue
            return Verdict(False, "crossing", (a.id, a.id))
    for a, b in itertools.combinations(arcs, 2):
        ba, bb = boxes[a.id], boxes[b.id]
        if ba[2] < bb[0] or bb[2] < ba[0] or ba[3] < bb[1] or bb[3] < ba[1]:
            continue
        shared = ends[a.id] & ends[b.id]
        for s1 in segs[a.id]:
            for s2 in segs[b.id]:
                kind, pt = geo.segment_intersection_kind(*s1, *s2)
                if kind == "none":
                    continue
                if kind == "point" and pt in shared and _is_arc_end(a, pt) and _is_arc_end(b, pt):
                    continue
                return Verdict(False, "crossing", tuple(sorted((a.id, b.id))))
    for j in d.junctions.values():
        for n, p in d.nodes.items():
            if p == j.point:
                return Verdict(False, "crossing", (j.id, n))
    if check_outer and d.outer_order is not None:
        v = _check_outer(d)
        if not v.ok:
            return v
    return Verdict(True, "ok")


def _is_arc_end(arc: Arc, pt) -> bool:
    return pt == arc.polyline[0] or pt == arc.polyline[-1]


def boundary_circle(d: ConfluentDiagram) -> tuple[tuple[float, float], float]:
    return geo.fit_circle(list(d.nodes.values()))


def clockwise_node_order(d: ConfluentDiagram) -> list[str]:
    (cx, cy), _ = boundary_circle(d)
    ang = {n: math.atan2(p[1] - cy, p[0] - cx) for n, p in d.nodes.items()}
    return sorted(d.nodes, key=lambda n: -ang[n])


def _check_outer(d: ConfluentDiagram) -> Verdict:
    (cx, cy), r = boundary_circle(d)
    if len(d.nodes) >= 3:
        for n, p in d.nodes.items():
            if abs(math.dist(p, (cx, cy)) - r) > 1e-9 * max(r, 1.0):
                return Verdict(False, "outer_order_violation", ("off_circle", n))
        if CyclicOrder(clockwise_node_order(d)) != d.outer_order:
            return Verdict(False, "outer_order_violation", ("order", clockwise_node_order(d)))
    node_pts = set(d.nodes.values())
    inner = r * (1 - 1e-12)
    for j in d.junctions.values():
        if math.dist(j.point, (cx, cy)) >= inner:
            return Verdict(False, "outer_order_violation", ("junction_outside", j.id))
    for arc in d.arcs.values():
        for p in arc.polyline:
            if p in node_pts:
                continue
            if math.dist(p, (cx, cy)) >= inner:
                return Verdict(False, "outer_order_violation", ("arc_outside", arc.id))
    return Verdict(True, "ok")


# -- classification -----------------------------------------------------------

def partition_edges(d: ConfluentDiagram) -> EdgePartition:
    g = derive_graph(d)
    simple = set()
    for arc in d.arcs.values():
        if arc.a.is_node and arc.b.is_node and arc.a.node != arc.b.node:
            e = tuple(sorted((arc.a.node, arc.b.node)))
            simple.add(e)
    simple &= set(g.edges)
    return EdgePartition(frozenset(simple), frozenset(set(g.edges) - simple))


def junction_arcs(d: ConfluentDiagram) -> list[str]:
    return [a.id for a in d.arcs.values() if not (a.a.is_node and a.b.is_node)]


def classify_tree_like(d: ConfluentDiagram) -> Verdict:
    """Tree-like iff the arcs touching a junction form a forest.

    A forest is accepted (several junction trees may coexist).  The witness is
    the sorted list of root-candidate arcs, or a cycle as a list of arc ids.
    """
    parent: dict[str, str] = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    adj: dict[str, list[tuple[str, str]]] = defaultdict(list)
    cands = sorted(junction_arcs(d), key=_arc_sort_key)
    for aid in cands:
        arc = d.arcs[aid]
        x = "n:" + arc.a.node if arc.a.is_node else "j:" + arc.a.junction
        y = "n:" + arc.b.node if arc.b.is_node else "j:" + arc.b.junction
        if find(x) == find(y):
            return Verdict(False, "not_tree_like", _cycle_witness(adj, x, y) + [aid])
        parent[find(x)] = find(y)
        adj[x].append((y, aid))
        adj[y].append((x, aid))
    return Verdict(True, "tree_like", cands)


def _cycle_witness(adj, src, dst) -> list[str]:
    prev = {src: None}
    queue = deque([src])
    while queue:
        v = queue.popleft()
        if v == dst:
            break
        for w, aid in adj[v]:
            if w not in prev:
                prev[w] = (v, aid)
                queue.append(w)
    out = []
    v = dst
    while prev.get(v):
        v, aid = prev[v]
        out.append(aid)
    return out[::-1]


def is_merge_split_pair(d: ConfluentDiagram, arc_id: str) -> bool:
    arc = d.arcs[arc_id]
    if arc.a.is_node or arc.b.is_node:
        return False
    ka = d.junctions[arc.a.junction].kind
    kb = d.junctions[arc.b.junction].kind
    return ka == BINARY and kb == BINARY and arc.a.port == "trunk" and arc.b.port == "trunk"


def _c6_with_chord(g: Graph) -> bool:
    if len(g) != 6 or len(g.edges) < 7:
        return False
    vs = list(g.vertices)
    first = vs[0]
    for perm in itertools.permutations(vs[1:]):
        cyc = (first,) + perm
        if perm[0] > perm[-1]:
            continue
        if all(g.has_edge(cyc[i], cyc[(i + 1) % 6]) for i in range(6)):
            return True
    return False


def _side_nodes(d: ConfluentDiagram, junction: str, port: str) -> set[str]:
    hit = d.arc_at_port(junction, port)
    if hit is None:
        return set()
    start = (hit[0], hit[1] == "a")
    seen = {start}
    queue = deque([start])
    out = set()
    while queue:
        st = queue.popleft()
        end = _arrive(d, st)
        if end.is_node:
            out.add(end.node)
            continue
        for nxt in _successors(d, st):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return out


def detect_c6_witness(d: ConfluentDiagram) -> list[str]:
    """Six nodes inducing a C6 with at least one chord in the derived graph.

    The diagram should be reduced and must violate strictness.  Candidates are
    the nodes reached through the side arcs of merge-split pairs on the
    offending paths.
    """
    verdict = check_strict(d)
    if verdict.ok:
        raise DiagramError("diagram is strict; nothing to witness")
    g = derive_graph(d)
    paths = verdict.witness
    u, v = paths[0].endpoints
    pool: set[str] = set()
    for p in paths:
        for state in p.steps:
            aid = state[0]
            if not is_merge_split_pair(d, aid):
                continue
            arc = d.arcs[aid]
            for end in (arc.a, arc.b):
                on_path = set(p.arcs())
                for port in ("branch_left", "branch_right"):
                    hit = d.arc_at_port(end.junction, port)
                    if hit and hit[0] not in on_path:
                        pool |= _side_nodes(d, end.junction, port)
    pool -= {u, v}
    for combo in itertools.combinations(sorted(pool), 4):
        vs = sorted({u, v, *combo})
        if len(vs) == 6 and _c6_with_chord(induced_subgraph(g, vs)):
            return vs
    # the structured pool can miss when side arcs lead back onto the paths
    for combo in itertools.combinations(sorted(set(g.vertices) - {u, v}), 4):
        vs = sorted({u, v, *combo})
        if _c6_with_chord(induced_subgraph(g, vs)):
            return vs
    for vs in itertools.combinations(sorted(g.vertices), 6):
        if _c6_with_chord(induced_subgraph(g, vs)):
            return list(vs)
    raise DiagramError("no C6-with-chord witness found")
