"""String and outer-string representations of strict confluent diagrams.

Every node u gets a curve t(u), its trace, that runs along the junction tree
of u in thin lanes parallel to the arcs.  Two traces meet exactly when the
diagram has a smooth path between their nodes.

Routing rules:

* Each arc holds a lane box.  Traces running through it in opposite
  directions always belong to adjacent nodes, and the box makes every such
  pair cross: one group runs straight, the other group sweeps across it
  (when it stops in the box) or crosses it diagonally (when it continues).
* A group of traces travels on past a junction unless it would split there
  into two arcs while holding two non-adjacent nodes.  Split groups that are
  not cliques stop in the box of the arc they arrived on; the nodes beyond
  then come to meet them instead.
* Non-adjacent traces only ever share lanes in the same direction; at a
  merge the two incoming blocks are ordered so their connectors do not
  interleave.

A trace never returns to its start: it starts at the node, steps to a hub
just inside the node and tours its covered lanes depth-first from there.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from confluent import geometry as geo
from confluent.diagram import (
    ConfluentDiagram, DiagramError, NotStrict, Verdict, _arrive, _start_states,
    _successors, boundary_circle, check_strict, derive_graph, iter_smooth_walks,
    validate_embedding,
)
from confluent.graph import Graph

State = tuple[str, bool]


# --- junction trees -----------------------------------------------------------

@dataclass
class TreeVertex:
    label: str
    kind: str  # "root", "junction" or "leaf"
    via: State | None = None
    children: list["TreeVertex"] = field(default_factory=list)

    def to_json(self) -> dict:
        doc = {"label": self.label, "kind": self.kind}
        if self.via is not None:
            doc["via"] = [self.via[0], self.via[1]]
        if self.children:
            doc["children"] = [c.to_json() for c in self.children]
        return doc


@dataclass
class JunctionTree:
    root: str
    tree: TreeVertex

    def vertices(self):
        stack = [self.tree]
        while stack:
            v = stack.pop()
            yield v
            stack.extend(reversed(v.children))

    def leaves(self) -> list[str]:
        return [v.label for v in self.vertices() if v.kind == "leaf"]

    def path_to(self, leaf: str) -> list[str]:
        """Junction labels on the way from the root to ``leaf``."""
        def walk(v, acc):
            if v.kind == "leaf":
                return acc if v.label == leaf else None
            for c in v.children:
                got = walk(c, acc + ([c.label] if c.kind == "junction" else []))
                if got is not None:
                    return got
            return None
        return walk(self.tree, [])

    def to_json(self) -> dict:
        return {"root": self.root, "tree": self.tree.to_json()}


def _leaving_angle(d: ConfluentDiagram, state: State) -> float:
    """Direction in which the traversal ``state`` leaves its start point."""
    arc = d.arcs[state[0]]
    pts = arc.polyline if state[1] else arc.polyline[::-1]
    (x0, y0), (x1, y1) = pts[0], pts[1]
    return math.atan2(y1 - y0, x1 - x0)


def _clockwise_from(d: ConfluentDiagram, ref: float, states: list[State]) -> list[State]:
    """Order ``states`` clockwise starting just after direction ``ref``."""
    return sorted(states, key=lambda s: (ref - _leaving_angle(d, s)) % (2 * math.pi) or 2 * math.pi)


def _walk_states(d: ConfluentDiagram, u: str) -> set[State]:
    out = set()
    for p in iter_smooth_walks(d, u):
        out.update(p.steps)
    return out


def junction_tree(d: ConfluentDiagram, u: str, require_strict: bool = True) -> JunctionTree:
    """Union of the smooth walks from ``u``, as a trie ordered clockwise.

    Children of a junction are listed clockwise after the arc the walk
    arrived on, so for a split the first child is the left subtree as seen
    from the root.
    """
    if u not in d.nodes:
        raise DiagramError(f"unknown node {u!r}")
    if require_strict:
        v = check_strict(d)
        if not v.ok:
            raise NotStrict(f"diagram is not strict: {v.kind}")
    walks = list(iter_smooth_walks(d, u))
    root = TreeVertex(u, "root")
    for p in walks:
        cur = root
        for st in p.steps:
            nxt = next((c for c in cur.children if c.via == st), None)
            if nxt is None:
                end = _arrive(d, st)
                nxt = TreeVertex(end.node, "leaf", st) if end.is_node else TreeVertex(end.junction, "junction", st)
                cur.children.append(nxt)
            cur = nxt

    def order(v: TreeVertex):
        if v.children:
            if v.via is None:
                ref = math.pi / 2
            else:
                back = (v.via[0], not v.via[1])
                ref = _leaving_angle(d, back)
            by_state = {c.via: c for c in v.children}
            v.children = [by_state[s] for s in _clockwise_from(d, ref, list(by_state))]
            for c in v.children:
                order(c)
    order(root)
    return JunctionTree(u, root)


def _merge_vertices(t: JunctionTree) -> dict[str, list[TreeVertex]]:
    out: dict[str, list[TreeVertex]] = {}
    for v in t.vertices():
        if v.kind == "junction" and len(v.children) == 1:
            out.setdefault(v.label, []).append(v)
    return out


def merge_junctions(d: ConfluentDiagram, tu: JunctionTree, tv: JunctionTree) -> set[str]:
    """Junctions where the walks of the two roots arrive by different ports and continue together."""
    mu, mv = _merge_vertices(tu), _merge_vertices(tv)
    out = set()
    for j in set(mu) & set(mv):
        for a in mu[j]:
            for b in mv[j]:
                if a.via != b.via and a.children[0].via == b.children[0].via:
                    out.add(j)
    return out


def _ancestor_pairs(t: JunctionTree, labels: set[str]):
    def walk(v, above):
        if v.kind == "junction" and v.label in labels:
            for a in above:
                if a != v.label:
                    yield (a, v.label)
            above = above + [v.label]
        for c in v.children:
            yield from walk(c, above)
    yield from walk(t.tree, [])


def check_merge_independence(d: ConfluentDiagram) -> Verdict:
    """Two merge junctions of one node pair never lie on a common root path.

    Runs without a strictness pre-check so that a broken diagram shows up as
    a reported violation.
    """
    nodes = sorted(d.nodes)
    trees = {u: junction_tree(d, u, require_strict=False) for u in nodes}
    for u, v in itertools.combinations(nodes, 2):
        ms = merge_junctions(d, trees[u], trees[v])
        if len(ms) < 2:
            continue
        for t in (trees[u], trees[v]):
            for a, b in _ancestor_pairs(t, ms):
                return Verdict(False, "merge_dependence", {"nodes": [u, v], "ancestor": a, "descendant": b,
                                                           "tree": t.root})
    return Verdict(True, "ok")


# --- lane geometry ------------------------------------------------------------

class ArcFrame:
    """Arclength/offset coordinates along an arc polyline.

    ``point(s, w)`` is the point at arclength ``s`` shifted by ``w`` along the
    miter direction (positive to the left of the a->b direction).  Offsets
    along lines of constant ``s`` are affine, so lanes sampled at every
    polyline vertex keep their (s, w) crossing pattern exactly.
    """

    def __init__(self, polyline):
        pts = [tuple(map(float, p)) for p in polyline]
        self.pts = pts
        cum = [0.0]
        for p, q in zip(pts, pts[1:]):
            cum.append(cum[-1] + math.dist(p, q))
        self.cum = cum
        self.length = cum[-1]
        normals = []
        for p, q in zip(pts, pts[1:]):
            ln = math.dist(p, q) or 1.0
            normals.append((-(q[1] - p[1]) / ln, (q[0] - p[0]) / ln))
        miters = [normals[0]]
        for n1, n2 in zip(normals, normals[1:]):
            mx, my = n1[0] + n2[0], n1[1] + n2[1]
            ln = math.hypot(mx, my)
            if ln < 1e-9:
                miters.append(n1)
                continue
            mx, my = mx / ln, my / ln
            k = mx * n1[0] + my * n1[1]
            miters.append((mx / k, my / k))
        miters.append(normals[-1])
        self.miters = miters

    def _seg(self, s: float) -> tuple[int, float]:
        cum = self.cum
        k = max(0, min(len(cum) - 2, np.searchsorted(cum, s, side="right") - 1))
        ln = cum[k + 1] - cum[k]
        t = 0.0 if ln == 0 else (s - cum[k]) / ln
        return int(k), min(max(t, 0.0), 1.0)

    def point(self, s: float, w: float) -> tuple[float, float]:
        k, t = self._seg(s)
        (x0, y0), (x1, y1) = self.pts[k], self.pts[k + 1]
        (mx0, my0), (mx1, my1) = self.miters[k], self.miters[k + 1]
        return (x0 + (x1 - x0) * t + w * (mx0 + (mx1 - mx0) * t),
                y0 + (y1 - y0) * t + w * (my0 + (my1 - my0) * t))

    def trace(self, knots: list[tuple[float, float]]) -> list[tuple[float, float]]:
        """Image of the (s, w) polyline ``knots``, refined at every polyline vertex."""
        out = [self.point(*knots[0])]
        for (s0, w0), (s1, w1) in zip(knots, knots[1:]):
            if s0 != s1:
                lo, hi = min(s0, s1), max(s0, s1)
                inner = [c for c in self.cum[1:-1] if lo < c < hi]
                if s1 < s0:
                    inner.reverse()
                for c in inner:
                    out.append(self.point(c, w0 + (w1 - w0) * (c - s0) / (s1 - s0)))
            out.append(self.point(s1, w1))
        return out


def _clip(frame: ArcFrame, s0: float, s1: float) -> list[tuple[float, float]]:
    return frame.trace([(s0, 0.0), (s1, 0.0)])


def _point_segment_dists(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance matrix between points (P, 2) and segments a->b (S, 2)."""
    ab = b - a
    ap = pts[:, None, :] - a[None, :, :]
    den = np.einsum("ij,ij->i", ab, ab)
    den = np.where(den == 0, 1.0, den)
    t = np.clip(np.einsum("psj,sj->ps", ap, ab) / den, 0.0, 1.0)
    proj = a[None, :, :] + t[..., None] * ab[None, :, :]
    return np.linalg.norm(pts[:, None, :] - proj, axis=2)


def _separation(d: ConfluentDiagram, frames: dict[str, ArcFrame], c: float, disk) -> float:
    """Smallest gap between clipped arcs of different ids, diagram points and the disk boundary."""
    pieces = {aid: np.asarray(_clip(f, c, f.length - c)) for aid, f in frames.items()}
    best = math.inf
    ids = sorted(pieces)
    for i, x in enumerate(ids):
        px = pieces[x]
        for y in ids[i + 1:]:
            py = pieces[y]
            if len(py) >= 2:
                best = min(best, float(_point_segment_dists(px, py[:-1], py[1:]).min()))
            if len(px) >= 2:
                best = min(best, float(_point_segment_dists(py, px[:-1], px[1:]).min()))
    marks = np.asarray(list(d.nodes.values()) + [j.point for j in d.junctions.values()], dtype=float)
    for x in ids:
        px = pieces[x]
        if len(px) >= 2 and len(marks):
            best = min(best, float(_point_segment_dists(marks, px[:-1], px[1:]).min()))
        if disk is not None:
            (cx, cy), r = disk
            best = min(best, float(r - np.linalg.norm(px - np.array([cx, cy]), axis=1).max()))
    return best


def outer_disk(d: ConfluentDiagram):
    """Disk whose boundary carries the nodes, or None without an outer order."""
    if d.outer_order is None:
        return None
    pts = list(d.nodes.values())
    if len(pts) <= 2:
        # too few nodes to fix a circle: use the unit circle when they lie on it
        if all(abs(math.hypot(*p) - 1.0) < 1e-9 for p in pts):
            return (0.0, 0.0), 1.0
    return boundary_circle(d)


# --- routing ------------------------------------------------------------------

@dataclass
class Trace:
    node: str
    events: list[dict]
    polyline: list[tuple[float, float]]

    def to_json(self) -> dict:
        return {"node": self.node, "events": self.events,
                "polyline": [[round(x, 12), round(y, 12)] for x, y in self.polyline]}


@dataclass
class TraceSet:
    traces: dict[str, Trace]
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"params": self.params, "traces": [self.traces[u].to_json() for u in sorted(self.traces)]}

    @classmethod
    def from_json(cls, doc: dict) -> "TraceSet":
        traces = {}
        for t in doc["traces"]:
            traces[t["node"]] = Trace(t["node"], t.get("events", []), [tuple(p) for p in t["polyline"]])
        return cls(traces, doc.get("params", {}))


class _Router:
    """Chooses, per trace, where it stops, then lays out every lane.

    A trace crosses a merge or an unsplit junction freely.  At a split it
    continues only into the branches it is sent to.  A backtracking search
    picks, shortest unmet edge first, the arc where the two traces meet,
    until every adjacent pair shares an arc in opposite directions.  Two non-adjacent traces arriving together
    at a split may only continue side by side into one common branch.
    """

    def __init__(self, d: ConfluentDiagram):
        self.d = d
        self.g = derive_graph(d)
        self.nodes = sorted(d.nodes)
        self.walk = {u: _walk_states(d, u) for u in self.nodes}
        states = set().union(*self.walk.values()) if self.walk else set()
        self.succ = {st: _successors(d, st) for st in states}
        self.cont: dict[tuple[str, State], set[State]] = {}
        self._cover()
        self._extend()

    def _next(self, u: str, st: State) -> list[State]:
        nxt = [q for q in self.succ[st] if q in self.walk[u]]
        if len(self.succ[st]) < 2:
            return nxt
        chosen = self.cont.get((u, st), set())
        return [q for q in nxt if q in chosen]

    def _cover(self):
        self.cov: dict[State, set[str]] = {}
        self.kids: dict[tuple[str, State], list[State]] = {}
        for u in self.nodes:
            stack = [s for s in _start_states(self.d, u) if s in self.walk[u]]
            while stack:
                st = stack.pop()
                self.cov.setdefault(st, set()).add(u)
                nxt = self._next(u, st)
                self.kids[(u, st)] = nxt
                stack.extend(nxt)

    def _unmet(self) -> list[tuple[str, str]]:
        met = set()
        for (aid, fwd), us in self.cov.items():
            for u in us:
                for v in self.cov.get((aid, not fwd), ()):
                    met.add((min(u, v), max(u, v)))
        return [e for e in self.g.sorted_edges() if e not in met]

    def _split_ok(self, st: State) -> bool:
        going = [(x, set(self.kids[(x, st)])) for x in sorted(self.cov.get(st, ())) if self.kids.get((x, st))]
        for (x, cx), (y, cy) in itertools.combinations(going, 2):
            if not self.g.has_edge(x, y) and not (cx == cy and len(cx) == 1):
                return False
        return True

    def _mixed(self) -> bool:
        """True when some arc has both lane groups mixing passing and stopping."""
        for aid in self.d.arcs:
            mix = 0
            for fwd in (True, False):
                st = (aid, fwd)
                if len({self.passing(st, x) for x in self.cov.get(st, ())}) > 1:
                    mix += 1
            if mix == 2:
                return True
        return False

    def _valid(self) -> bool:
        splits = {st for (_, st), nxt in self.kids.items() if nxt and len(self.succ[st]) > 1}
        return all(self._split_ok(st) for st in splits) and not self._mixed()

    def _meet_at(self, u: str, v: str, steps, k: int) -> dict:
        """Continuations needed so ``u`` reaches steps[k] and ``v`` reaches its reverse."""
        back = [(a, not f) for a, f in reversed(steps)]
        need = {}
        for who, seq in ((u, steps[: k + 1]), (v, back[: len(steps) - k])):
            for st, nxt in zip(seq, seq[1:]):
                if len(self.succ[st]) > 1:
                    need.setdefault((who, st), set()).add(nxt)
        return need

    def _extend(self, budget: int = 20000):
        paths = {}
        calls = [0]

        def search() -> bool:
            unmet = self._unmet()
            if not unmet:
                return True
            calls[0] += 1
            if calls[0] > budget:
                return False
            u, v = min(unmet, key=lambda e: (len(self._path(paths, *e)), e))
            steps = self._path(paths, u, v)
            options = []
            for k in range(len(steps)):
                need = self._meet_at(u, v, steps, k)
                fresh = sum(len(q - self.cont.get(key, set())) for key, q in need.items())
                options.append((fresh, abs(2 * k - len(steps) + 1), k, need))
            options.sort(key=lambda o: o[:3])
            saved = {key: set(q) for key, q in self.cont.items()}
            for _, _, _, need in options:
                for key, q in need.items():
                    self.cont[key] = self.cont.get(key, set()) | q
                self._cover()
                if self._valid() and search():
                    return True
                self.cont = {key: set(q) for key, q in saved.items()}
                self._cover()
            return False

        if not search():
            raise DiagramError(f"trace routing leaves edges without a meeting box: {self._unmet()}")

    def _path(self, cache, u, v):
        if (u, v) not in cache:
            walks = [p for p in iter_smooth_walks(self.d, u) if p.endpoints[1] == v]
            cache[(u, v)] = list(min(walks, key=len).steps)
        return cache[(u, v)]

    def passing(self, st: State, u: str) -> bool:
        return bool(self.kids.get((u, st)))

    # box design: the straight group keeps its offset, the other group
    # either sweeps across it and stops or crosses it diagonally; the
    # other group must be uniform for that
    def straight_is_forward(self, aid: str) -> bool:
        if aid not in self._straight:
            flags = {}
            for fwd in (True, False):
                st = (aid, fwd)
                flags[fwd] = {self.passing(st, x) for x in self.cov.get(st, ())}
            pf, pg = True in flags[True], True in flags[False]
            if pf and pg:
                if len(flags[False]) == 1:
                    res = True
                elif len(flags[True]) == 1:
                    res = False
                else:
                    raise DiagramError(f"arc {aid}: both lane groups mix passing and stopping traces")
            else:
                res = not (pg and not pf)
            self._straight[aid] = res
        return self._straight[aid]

    def knots(self, st: State, rank: int, passing: bool) -> list[tuple[float, float]]:
        aid, fwd = st
        delta, c = self.delta, self.c
        frame = self.frames[aid]
        span = frame.length - 2 * c
        sfwd = self.straight_is_forward(aid)
        n_s = len(self.cov.get((aid, sfwd), ()))
        n_o = len(self.cov.get((aid, not sfwd), ()))

        def s_at(x):
            tau = x if fwd else 1.0 - x
            return c + tau * span

        if fwd == sfwd:
            w = -delta * (rank + 1)
            end = 1.0 if passing else 0.85
            return [(s_at(0.0), w), (s_at(end), w)]
        w_in = delta * (rank + 1)
        if passing:
            w_out = -delta * (n_s + n_o) + delta * rank
            return [(s_at(0.0), w_in), (s_at(0.35), w_in), (s_at(0.65), w_out), (s_at(1.0), w_out)]
        x = 0.3 + 0.4 * rank / max(n_o - 1, 1)
        return [(s_at(0.0), w_in), (s_at(x), w_in), (s_at(x), -delta * (n_s + 1))]

    def lane(self, st: State, u: str) -> list[tuple[float, float]]:
        key = (st, u)
        if key not in self._lanes:
            rank = self.order(st).index(u)
            self._lanes[key] = self.frames[st[0]].trace(self.knots(st, rank, self.passing(st, u)))
        return self._lanes[key]

    def _entry(self, st: State, rank: int) -> tuple[float, float]:
        return self.frames[st[0]].point(*self.knots(st, rank, False)[0])

    def order(self, st: State) -> list[str]:
        if st in self._orders:
            return self._orders[st]
        if st in self._busy:
            raise DiagramError("lane order depends on itself; the diagram has a smooth cycle")
        self._busy.add(st)
        d = self.d
        arc = d.arcs[st[0]]
        start = arc.a if st[1] else arc.b
        members = self.cov[st]
        if start.is_node:
            result = sorted(members)
        else:
            sources = [p for p in self.cov if st in self.succ[p]
                       and not _arrive(d, p).is_node and _arrive(d, p).junction == start.junction]
            blocks = []
            for p in sorted(sources):
                if not any(st in self.kids[(x, p)] for x in self.cov[p]):
                    continue
                blk = [x for x in self.order(p) if x in members and st in self.kids[(x, p)]]
                if blk:
                    blocks.append((p, blk))
            result = self._best_order(st, blocks)
        self._busy.discard(st)
        self._orders[st] = result
        return result

    def _best_order(self, st: State, blocks) -> list[str]:
        if not blocks:
            return []
        if sum(len(b) for _, b in blocks) == 1:
            return list(blocks[0][1])
        starts = {}
        best, best_bad = None, None
        for perm in itertools.permutations(blocks):
            for flips in itertools.product((False, True), repeat=len(perm)):
                cand = []
                src = {}
                for (p, blk), fl in zip(perm, flips):
                    for x in (blk[::-1] if fl else blk):
                        cand.append(x)
                        src[x] = p
                chords = {}
                for i, x in enumerate(cand):
                    if i not in starts:
                        starts[i] = self._entry(st, i)
                    chords[x] = (self.lane(src[x], x)[-1], starts[i])
                bad = 0
                for x, y in itertools.combinations(cand, 2):
                    if not self.g.has_edge(x, y) and geo.segments_intersect(*chords[x], *chords[y]):
                        bad += 1
                if best_bad is None or bad < best_bad:
                    best, best_bad = cand, bad
                if bad == 0:
                    return cand
        return best

    def setup(self, shrink: float = 1.0):
        d = self.d
        self.frames = {aid: ArcFrame(a.polyline) for aid, a in d.arcs.items()}
        self.disk = outer_disk(d)
        marks = list(d.nodes.values()) + [j.point for j in d.junctions.values()]
        gaps = [math.dist(p, q) for p, q in itertools.combinations(marks, 2)]
        lengths = [f.length for f in self.frames.values()]
        scale = max((math.dist(p, q) for p, q in itertools.combinations(marks, 2)), default=1.0) or 1.0
        c = min([0.05 * scale] + [x / 4 for x in lengths] + [x / 3 for x in gaps if x > 0]
                + [x / 3 for x in self._mark_clearances()]
                + [0.9 * x for x in self._end_segments()])
        sep = _separation(d, self.frames, c, self.disk) if self.frames else c
        width = max((len(v) for v in self.cov.values()), default=1)
        self.c = c
        self.delta = shrink * min(sep, c) / (8 * (2 * width + 3))
        self._orders: dict[State, list[str]] = {}
        self._busy: set[State] = set()
        self._lanes: dict = {}
        self._straight: dict[str, bool] = {}

    def _end_segments(self):
        """Lengths of the first and last segment of every arc.

        Keeping the clearance below them makes each arc straight inside the
        small disk around its ends, so connectors there stay in convex
        position.
        """
        for arc in self.d.arcs.values():
            pts = arc.polyline
            yield math.dist(pts[0], pts[1])
            yield math.dist(pts[-2], pts[-1])

    def _mark_clearances(self):
        """Distances from each node or junction to the arcs not incident to it."""
        d = self.d
        marks = [(("node", n), p) for n, p in d.nodes.items()] + [(("junction", j.id), j.point)
                                                                  for j in d.junctions.values()]
        for aid, arc in d.arcs.items():
            ends = {("node", e.node) if e.is_node else ("junction", e.junction) for e in (arc.a, arc.b)}
            pts = [p for key, p in marks if key not in ends]
            poly = np.asarray(arc.polyline, dtype=float)
            if pts and len(poly) >= 2:
                yield float(_point_segment_dists(np.asarray(pts), poly[:-1], poly[1:]).min())

    def hub(self, u: str) -> tuple[float, float]:
        p = self.d.nodes[u]
        if self.disk is not None:
            tgt = self.disk[0]
        else:
            pts = list(self.d.nodes.values()) + [j.point for j in self.d.junctions.values()]
            tgt = (sum(x for x, _ in pts) / len(pts), sum(y for _, y in pts) / len(pts))
        dx, dy = tgt[0] - p[0], tgt[1] - p[1]
        ln = math.hypot(dx, dy)
        if ln < 1e-12:
            dx, dy, ln = 0.0, -1.0, 1.0
        return (p[0] + self.c / 2 * dx / ln, p[1] + self.c / 2 * dy / ln)

    def _side(self, st: State, u: str) -> str:
        w = self.knots(st, self.order(st).index(u), False)[0][1]
        return "left" if (w > 0) == st[1] else "right"

    def trace(self, u: str) -> Trace:
        d = self.d
        hub = self.hub(u)
        pts = [d.nodes[u], hub]
        events: list[dict] = []
        starts = [s for s in _start_states(d, u) if s in self.walk[u]]

        def tour(st: State, back: bool):
            aid = st[0]
            lane = self.lane(st, u)
            pts.extend(lane)
            events.append({"type": "descend", "arc": aid, "side": self._side(st, u)})
            sfwd = self.straight_is_forward(aid)
            other = sorted(self.cov.get((aid, not st[1]), ()))
            if st[1] != sfwd and other:
                kind = "cross_gap" if self.passing(st, u) else "u_turn"
                events.append({"type": kind, "arc": aid, "partners": other})
            elif not self.passing(st, u) and other:
                events.append({"type": "u_turn", "arc": aid, "partners": other})
            kids = self.kids[(u, st)]
            for i, q in enumerate(kids):
                last = i == len(kids) - 1
                tour(q, back or not last)
                if back or not last:
                    pts.append(lane[-1])
            if back:
                events.append({"type": "rewind", "arc": aid})
                pts.extend(reversed(lane[:-1]))

        for i, st in enumerate(starts):
            last = i == len(starts) - 1
            tour(st, not last)
            if not last:
                pts.append(hub)
        return Trace(u, events, _dedupe(pts))


def _dedupe(pts):
    out = []
    for p in pts:
        if not out or p != out[-1]:
            out.append(p)
    return out


def build_traces(d: ConfluentDiagram, shrink: float = 1.0) -> TraceSet:
    """One trace per node; intersecting traces are exactly the adjacent node pairs."""
    v = check_strict(d)
    if not v.ok:
        raise NotStrict(f"diagram is not strict: {v.kind}")
    emb = validate_embedding(d, check_outer=d.outer_order is not None)
    if not emb.ok:
        raise DiagramError(f"embedding invalid: {emb.kind}")
    r = _Router(d)
    r.setup(shrink)
    traces = {u: r.trace(u) for u in r.nodes}
    return TraceSet(traces, {"clearance": r.c, "lane_gap": r.delta})


# --- intersection and certification --------------------------------------------

def _segments(poly) -> np.ndarray:
    p = np.asarray(poly, dtype=float)
    if len(p) < 2:
        raise DiagramError("degenerate trace polyline")
    return np.stack([p[:-1], p[1:]], axis=1)


def _cross(o, a, b):
    return (a[..., 0] - o[..., 0]) * (b[..., 1] - o[..., 1]) - (a[..., 1] - o[..., 1]) * (b[..., 0] - o[..., 0])


def crossing_count(p, q) -> int:
    """Number of intersecting segment pairs between two polylines.

    Pairs are prefiltered by bounding boxes and sign tests in numpy; any pair
    whose orientation is numerically zero is settled by the exact predicate.
    """
    a, b = _segments(p), _segments(q)
    amin, amax = a.min(axis=1), a.max(axis=1)
    bmin, bmax = b.min(axis=1), b.max(axis=1)
    box = ((amin[:, None, 0] <= bmax[None, :, 0]) & (bmin[None, :, 0] <= amax[:, None, 0])
           & (amin[:, None, 1] <= bmax[None, :, 1]) & (bmin[None, :, 1] <= amax[:, None, 1]))
    ii, jj = np.nonzero(box)
    if len(ii) == 0:
        return 0
    s1, s2 = a[ii], b[jj]
    d1 = _cross(s1[:, 0], s1[:, 1], s2[:, 0])
    d2 = _cross(s1[:, 0], s1[:, 1], s2[:, 1])
    d3 = _cross(s2[:, 0], s2[:, 1], s1[:, 0])
    d4 = _cross(s2[:, 0], s2[:, 1], s1[:, 1])
    tiny = 1e-13
    sure = ((d1 * d2 < 0) & (d3 * d4 < 0) & (np.abs(d1) > tiny) & (np.abs(d2) > tiny)
            & (np.abs(d3) > tiny) & (np.abs(d4) > tiny))
    vague = ~sure & ((np.minimum(np.abs(d1), np.abs(d2)) <= tiny) | (np.minimum(np.abs(d3), np.abs(d4)) <= tiny))
    count = int(sure.sum())
    for k in np.nonzero(vague)[0]:
        x, y = s1[k], s2[k]
        if geo.segments_intersect(tuple(x[0]), tuple(x[1]), tuple(y[0]), tuple(y[1])):
            count += 1
    return count


def crossing_multiplicities(t: TraceSet) -> dict[tuple[str, str], int]:
    nodes = sorted(t.traces)
    out = {}
    for u, v in itertools.combinations(nodes, 2):
        k = crossing_count(t.traces[u].polyline, t.traces[v].polyline)
        if k:
            out[(u, v)] = k
    return out


def intersection_graph(t: TraceSet) -> Graph:
    """Vertices are the trace owners; an edge joins two traces that meet."""
    return Graph(sorted(t.traces), crossing_multiplicities(t).keys())


def certify_outer_string(d: ConfluentDiagram, t: TraceSet, tol: float = 1e-9) -> Verdict:
    """Every trace starts on the boundary circle and stays strictly inside it afterwards."""
    if d.outer_order is None:
        raise DiagramError("diagram has no outer order")
    (cx, cy), r = outer_disk(d)
    for u in sorted(t.traces):
        poly = t.traces[u].polyline
        if abs(math.dist(poly[0], (cx, cy)) - r) > tol * max(r, 1.0):
            return Verdict(False, "start_off_boundary", u)
        if math.dist(poly[0], d.nodes[u]) > tol * max(r, 1.0):
            return Verdict(False, "start_not_at_node", u)
        for p in poly[1:]:
            if math.dist(p, (cx, cy)) >= r - tol * max(r, 1.0) * 1e-3:
                return Verdict(False, "leaves_disk", {"node": u, "point": list(p)})
    return Verdict(True, "ok")
