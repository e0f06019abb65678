"""Strict confluent drawings of unit-interval graphs.

Vertices are grouped into cliques by a greedy left-to-right leader scan; a
vertex only meets its own clique and the next one.  Each clique is drawn on
a horizontal line H as a chain of Delta-junctions with the inner vertices
hung below.  Edges into the next clique are bundled by the leftmost source
vertex: a binary junction on H collects every source from that vertex
rightwards, the bundle climbs over its clique, crosses H in the gap and runs
under the next clique to a binary split tree below its targets.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from confluent.diagram import (
    ConfluentDiagram, DiagramError, Endpoint, check_strict, derive_graph, validate_embedding,
)
from confluent.graph import Graph, is_isomorphic

H_STEP = 2.0      # distance between consecutive positions on H
HANG = -1.0       # y of hung nodes
TREE_TOP = -1.5   # lowest allowed y of a split-tree junction is below this


class LayoutError(ValueError):
    pass


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class IntervalLayout:
    unit: Fraction
    intervals: dict  # id -> (left, right) as Fractions

    def order(self) -> list[str]:
        """Left-to-right ordering by left endpoint (ties by id)."""
        return sorted(self.intervals, key=lambda v: (self.intervals[v][0], v))

    def is_normalized(self) -> bool:
        pts = [p for iv in self.intervals.values() for p in iv]
        return len(set(pts)) == len(pts)

    def graph(self) -> Graph:
        return interval_graph(self.intervals)

    def to_json(self) -> dict:
        return {"unit": str(self.unit),
                "intervals": {v: [str(a), str(b)] for v, (a, b) in sorted(self.intervals.items())}}

    @classmethod
    def from_json(cls, doc: dict) -> "IntervalLayout":
        ivs = {str(v): (_frac(a), _frac(b)) for v, (a, b) in doc["intervals"].items()}
        unit = _frac(doc["unit"]) if "unit" in doc else None
        lay = make_layout(ivs)
        if unit is not None and lay.intervals and lay.unit != unit:
            raise LayoutError("declared unit differs from the interval lengths")
        return lay

    @classmethod
    def load(cls, path) -> "IntervalLayout":
        return cls.from_json(json.loads(Path(path).read_text()))


def interval_graph(intervals: dict) -> Graph:
    """Closed-interval overlap graph."""
    vs = sorted(intervals)
    es = []
    for a, b in itertools.combinations(vs, 2):
        (la, ra), (lb, rb) = intervals[a], intervals[b]
        if max(la, lb) <= min(ra, rb):
            es.append((a, b))
    return Graph(vs, es)


def make_layout(raw: dict) -> IntervalLayout:
    ivs = {str(v): (_frac(a), _frac(b)) for v, (a, b) in raw.items()}
    lengths = {b - a for a, b in ivs.values()}
    if len(lengths) > 1:
        raise LayoutError(f"intervals have different lengths: {sorted(lengths)}")
    unit = lengths.pop() if lengths else Fraction(1)
    if unit <= 0:
        raise LayoutError("unit length must be positive")
    return IntervalLayout(unit, ivs)


def normalize_intervals(raw: dict) -> IntervalLayout:
    """Shift intervals so that all endpoints are distinct, keeping the graph.

    The i-th interval in left-to-right order (ties by id) moves left by
    i * eps, with eps below the smallest positive endpoint gap over 2n.
    Co-located left ends separate, and a left end touching an earlier right
    end moves inside it, so closed-interval adjacency survives.
    """
    lay = make_layout(raw)
    if lay.is_normalized():
        return lay
    order = lay.order()
    n = len(order)
    pts = sorted({p for iv in lay.intervals.values() for p in iv})
    gaps = [b - a for a, b in zip(pts, pts[1:])]
    gap = min(gaps) if gaps else lay.unit
    eps = min(gap, lay.unit) / (2 * n + 1)
    out = {}
    for i, v in enumerate(order):
        a, b = lay.intervals[v]
        s = (i + 1) * eps
        out[v] = (a - s, b - s)
    res = IntervalLayout(lay.unit, out)
    if not res.is_normalized() or res.graph() != lay.graph():
        raise LayoutError("normalization changed the graph")  # guarded by the choice of eps
    return res


@dataclass(frozen=True)
class CliqueDecomposition:
    leaders: list
    cliques: list  # list of lists, each left to right

    def clique_of(self) -> dict:
        return {v: i for i, c in enumerate(self.cliques) for v in c}

    def to_json(self) -> dict:
        return {"leaders": list(self.leaders), "cliques": [list(c) for c in self.cliques]}


def decompose_cliques(layout: IntervalLayout) -> CliqueDecomposition:
    """Greedy leaders: a vertex leads when it starts after the last leader ends."""
    if not layout.is_normalized():
        raise LayoutError("layout is not normalized")
    leaders, cliques = [], []
    for v in layout.order():
        left = layout.intervals[v][0]
        if not leaders or left > layout.intervals[leaders[-1]][1]:
            leaders.append(v)
            cliques.append([v])
        else:
            cliques[-1].append(v)
    dec = CliqueDecomposition(leaders, cliques)
    _check_decomposition(layout, dec)
    return dec


def _check_decomposition(layout: IntervalLayout, dec: CliqueDecomposition):
    g = layout.graph()
    where = dec.clique_of()
    for c in dec.cliques:
        for a, b in itertools.combinations(c, 2):
            if not g.has_edge(a, b):
                raise LayoutError(f"clique {c} misses edge {a}-{b}")
    for a, b in g.edges:
        if abs(where[a] - where[b]) > 1:
            raise LayoutError(f"edge {a}-{b} skips a clique")
    for i in range(len(dec.cliques) - 1):
        cur, nxt = dec.cliques[i], dec.cliques[i + 1]
        for w in nxt:
            hits = [g.has_edge(v, w) for v in cur]
            # once a vertex reaches w, every later vertex does
            if any(h and not h2 for h, h2 in zip(hits, hits[1:])):
                raise LayoutError(f"neighbourhood of {w} is not monotone")


def bundles(layout: IntervalLayout, dec: CliqueDecomposition, i: int) -> list[tuple[int, list[str]]]:
    """(leftmost source index, consecutive targets) for clique i to clique i+1."""
    if i + 1 >= len(dec.cliques):
        return []
    g = layout.graph()
    cur, nxt = dec.cliques[i], dec.cliques[i + 1]
    groups: dict[int, list[str]] = {}
    for w in nxt:
        lo = next((k for k, v in enumerate(cur) if g.has_edge(v, w)), None)
        if lo is not None:
            groups.setdefault(lo, []).append(w)
    return sorted(groups.items())


class _Drawing:
    def __init__(self):
        self.nodes: dict[str, tuple[float, float]] = {}
        self.junctions: dict[str, tuple[str, tuple[float, float]]] = {}
        self.arcs: list = []

    def arc(self, a: Endpoint, b: Endpoint, pts):
        clean = [tuple(map(float, pts[0]))]
        for p in pts[1:]:
            p = tuple(map(float, p))
            if p != clean[-1]:
                clean.append(p)
        self.arcs.append((f"a{len(self.arcs) + 1}", a, b, clean))

    def point(self, e: Endpoint):
        return self.nodes[e.node] if e.is_node else self.junctions[e.junction][1]

    def link(self, a: Endpoint, b: Endpoint, via=()):
        self.arc(a, b, [self.point(a), *via, self.point(b)])

    def diagram(self, meta) -> ConfluentDiagram:
        return ConfluentDiagram(
            nodes=[(k, *p) for k, p in self.nodes.items()],
            junctions=[(k, kind, *p) for k, (kind, p) in self.junctions.items()],
            arcs=self.arcs, meta=meta)


def _N(v):
    return Endpoint(node=v)


def _J(j, p):
    return Endpoint(junction=j, port=p)


def _split_tree(dr: _Drawing, tag: str, targets: list[str], root_y: float) -> Endpoint:
    """Binary split tree over ``targets``; returns the endpoint facing the route."""
    xs = {w: dr.nodes[w][0] for w in targets}
    height = max(1, (len(targets) - 1).bit_length())
    count = itertools.count(1)

    def y_at(level):
        return root_y + level * (TREE_TOP - root_y) / height

    def grow(ws, level) -> tuple[Endpoint, tuple[float, float] | None]:
        if len(ws) == 1:
            w = ws[0]
            return _N(w), (xs[w], TREE_TOP + 0.25)
        jid = f"{tag}t{next(count)}"
        x = (xs[ws[0]] + xs[ws[-1]]) / 2
        dr.junctions[jid] = ("binary", (x, y_at(level)))
        mid = (len(ws) + 1) // 2
        for port, part in (("branch_left", ws[:mid]), ("branch_right", ws[mid:])):
            end, bend = grow(part, level + 1)
            dr.link(_J(jid, port), end, [bend] if bend else [])
        return _J(jid, "trunk"), None

    top, _ = grow(targets, 0)
    return top


def build_sc_diagram(layout: IntervalLayout) -> ConfluentDiagram:
    """Strict confluent diagram of a normalized unit-interval layout."""
    if not layout.is_normalized():
        raise LayoutError("layout is not normalized")
    dec = decompose_cliques(layout)
    dr = _Drawing()
    x0 = 0.0
    ends, hpos = [], {}
    all_bundles = [bundles(layout, dec, i) for i in range(len(dec.cliques))]
    # positions of every clique on H
    for i, c in enumerate(dec.cliques):
        for p, v in enumerate(c):
            hpos[v] = x0 + H_STEP * p
        ends.append(x0 + H_STEP * (len(c) - 1))
        x0 = ends[-1] + len(all_bundles[i]) + 2.0
    for c in dec.cliques:
        for p, v in enumerate(c):
            dr.nodes[v] = (hpos[v], HANG if 0 < p < len(c) - 1 else 0.0)
    for i, c in enumerate(dec.cliques):
        k = len(c)
        # H chain: (x, endpoint entering from the left, endpoint leaving to the right)
        chain = []
        for p, v in enumerate(c):
            if 0 < p < k - 1:
                did = f"d{i}_{p}"
                dr.junctions[did] = ("delta", (hpos[v], 0.0))
                dr.link(_J(did, "p3"), _N(v))
                chain.append((hpos[v], _J(did, "p1"), _J(did, "p2")))
            else:
                chain.append((hpos[v], _N(v), _N(v)))
        sources = {}
        for lo, _ in all_bundles[i]:
            if lo == 0:
                # a leader ends before the next clique starts
                raise LayoutError(f"leader {c[0]} reaches the next clique")
            bid = f"b{i}_{lo}"
            x = hpos[c[lo]] - 1.0
            dr.junctions[bid] = ("binary", (x, 0.0))
            chain.append((x, _J(bid, "branch_left"), _J(bid, "trunk")))
            sources[lo] = _J(bid, "branch_right")
        chain.sort(key=lambda t: t[0])
        for (_, _, right), (_, left, _) in zip(chain, chain[1:]):
            dr.link(right, left)
        # routes into the next clique: smaller source index runs higher,
        # crosses H further right and runs shallower below
        nb = len(all_bundles[i])
        for r, (lo, targets) in enumerate(reversed(all_bundles[i])):
            src = sources[lo]
            h = 1.0 + r
            xc = ends[i] + 1.0 + r
            g = -2.0 - (nb - 1 - r)
            top = _split_tree(dr, f"r{i}_{lo}", targets, g)
            if top.is_node:
                w = top.node
                tx = dr.nodes[w][0]
                end_pts = [(tx, g), (tx, dr.nodes[w][1])]
            else:
                tx, ty = dr.junctions[top.junction][1]
                end_pts = [(tx, ty)]
            sx, sy = dr.point(src)
            pts = [(sx, sy), (sx, h), (xc, h), (xc, g), *end_pts]
            dr.arc(src, top, pts)
    meta = {"name": "unit_interval", "cliques": dec.to_json()["cliques"]}
    return dr.diagram(meta)


def verify_build(layout: IntervalLayout, d: ConfluentDiagram) -> dict:
    """Strictness, embedding and graph checks on a built diagram."""
    strict = check_strict(d)
    emb = validate_embedding(d)
    g = derive_graph(d)
    return {"strict": strict.ok, "embedding": emb.ok, "equal": g == layout.graph(),
            "isomorphic": is_isomorphic(g, layout.graph())}


def random_layout(n: int, seed: int, spread: float | None = None, grid: int = 4) -> dict:
    """Random unit intervals on a coarse grid, so ties and touching ends occur."""
    import random
    rng = random.Random(seed)
    spread = spread if spread is not None else max(1.0, 0.55 * n)
    steps = max(1, int(spread * grid))
    out = {}
    for k in range(n):
        a = Fraction(rng.randint(0, steps), grid)
        out[f"v{k + 1}"] = (a, a + 1)
    return out


def build_from_raw(raw: dict) -> tuple[IntervalLayout, ConfluentDiagram]:
    lay = normalize_intervals(raw)
    d = build_sc_diagram(lay)
    rep = verify_build(lay, d)
    if not all(rep.values()):
        raise DiagramError(f"unit-interval build failed verification: {rep}")
    return lay, d
