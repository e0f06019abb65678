"""Circular layouts, representable crossings and strict bipartite outer drawings.

A crossing between chords (a, c) and (b, d), a < b < c < d around the
circle, is representable when (a, b), (c, d) or (a, d), (b, c) are edges
too: the four vertices then carry a K2,2 that a merge-split pair can draw.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from confluent import geometry as geo
from confluent.diagram import (
    Arc, ConfluentDiagram, Endpoint, Junction, check_strict, derive_graph, detect_c6_witness,
    reduce, validate_embedding,
)
from confluent.graph import (
    CyclicOrder, Graph, SizeCapExceeded, domino, find_induced, is_bipartite_permutation,
    bipartition,
)

SCAN_CAP = 10


class BuildError(RuntimeError):
    pass


@dataclass(frozen=True)
class CircularLayout:
    graph: Graph
    order: CyclicOrder

    def __post_init__(self):
        if not self.order.is_permutation_of(self.graph.vertices):
            raise ValueError("order must be a permutation of the vertices")


@dataclass(frozen=True)
class Crossing:
    edges: tuple[tuple[str, str], tuple[str, str]]
    representable: bool
    witness: tuple[tuple[str, str], tuple[str, str]] | None


@dataclass
class CrossingReport:
    crossings: list[Crossing] = field(default_factory=list)

    @property
    def all_representable(self) -> bool:
        return all(c.representable for c in self.crossings)

    def to_json(self) -> dict:
        return {"crossings": [{"edges": [list(e) for e in c.edges], "representable": c.representable,
                               "witness": [list(e) for e in c.witness] if c.witness else None}
                              for c in self.crossings]}


def _interleaved(pos, e, f) -> tuple[str, str, str, str] | None:
    """Return (a, b, c, d) with a < b < c < d if chords e=(a,c), f=(b,d) cross."""
    if set(e) & set(f):
        return None
    a, c = sorted(e, key=pos.get)
    b, d = sorted(f, key=pos.get)
    if pos[a] > pos[b]:
        a, b, c, d = b, a, d, c
    if pos[a] < pos[b] < pos[c] < pos[d]:
        return a, b, c, d
    return None


def crossings(layout: CircularLayout) -> CrossingReport:
    g = layout.graph
    pos = {v: i for i, v in enumerate(layout.order.order)}
    edges = g.sorted_edges()
    out = []
    for e, f in itertools.combinations(edges, 2):
        q = _interleaved(pos, e, f)
        if q is None:
            continue
        a, b, c, d = q
        wit = None
        if g.has_edge(a, b) and g.has_edge(c, d):
            wit = (tuple(sorted((a, b))), tuple(sorted((c, d))))
        elif g.has_edge(a, d) and g.has_edge(b, c):
            wit = (tuple(sorted((a, d))), tuple(sorted((b, c))))
        out.append(Crossing((e, f), wit is not None, wit))
    return CrossingReport(out)


def fully_representable(g: Graph, order) -> bool:
    pos = {v: i for i, v in enumerate(order)}
    edges = g.sorted_edges()
    for e, f in itertools.combinations(edges, 2):
        q = _interleaved(pos, e, f)
        if q is None:
            continue
        a, b, c, d = q
        if not ((g.has_edge(a, b) and g.has_edge(c, d)) or (g.has_edge(a, d) and g.has_edge(b, c))):
            return False
    return True


def cyclic_orders(vertices) -> "itertools.Iterator[list[str]]":
    """Cyclic orders up to rotation and reflection, in canonical order."""
    vs = sorted(vertices)
    if len(vs) <= 2:
        yield vs
        return
    first, rest = vs[0], vs[1:]
    for perm in itertools.permutations(rest):
        if perm[0] < perm[-1]:
            yield [first, *perm]


def scan_orders(g: Graph, cap: int = SCAN_CAP) -> list[str] | None:
    """First cyclic order (canonical enumeration) whose crossings are all representable."""
    if len(g) > cap:
        raise SizeCapExceeded(f"order scan limited to {cap} vertices")
    for order in cyclic_orders(g.vertices):
        if fully_representable(g, order):
            return order
    return None


def decide_strict_bip_soc(g: Graph) -> tuple[bool, dict]:
    ok, ordering = is_bipartite_permutation(g)
    if not ok:
        reason = "not_bipartite" if bipartition(g) is None else "not_bipartite_permutation"
        return False, {"reason": reason}
    wit = find_induced(domino(), g) if len(g) >= 6 else None
    if wit is not None:
        return False, {"reason": "domino", "witness": wit}
    xs, ys = ordering
    return True, {"strong_ordering": [list(xs), list(ys)]}


# --- construction -------------------------------------------------------------

def two_column_order(xs, ys) -> list[str]:
    """X clockwise ascending, then Y counterclockwise ascending."""
    return list(xs) + list(reversed(ys))


def circle_positions(order, jitter: float = 0.0) -> dict[str, tuple[float, float]]:
    n = len(order)
    pts = {}
    for i, v in enumerate(order):
        t = math.pi / 2 - 2 * math.pi * (i + 0.5) / n + jitter * math.sin(7.31 * i + 1.7)
        pts[v] = (math.cos(t), math.sin(t))
    return pts


def replace_crossings(g: Graph, order, jitter: float = 0.013, meta: dict | None = None) -> ConfluentDiagram:
    """Straight-line circular layout with every crossing turned into a merge-split pair.

    Every crossing must be representable.  Each crossing point P of chords
    (a, c) and (b, d) becomes a merge junction just before P (merging the two
    halves coming from the a/b side) and a split junction just after P.
    """
    order = list(order)
    pos = {v: i for i, v in enumerate(order)}
    if not fully_representable(g, order):
        raise BuildError("layout has a non-representable crossing")
    pts = circle_positions(order, jitter)
    edges = g.sorted_edges()
    # crossing points along each chord, oriented from its earlier endpoint
    cross_pts: dict[tuple, list] = {e: [] for e in edges}
    records = []
    for e, f in itertools.combinations(edges, 2):
        q = _interleaved(pos, e, f)
        if q is None:
            continue
        a, b, c, d = q
        p = geo.intersection_point(pts[a], pts[c], pts[b], pts[d])
        k = len(records)
        # the merge junction joins the two ends whose K2,2 partners are the others
        if g.has_edge(a, d) and g.has_edge(b, c):
            merge, split = (a, b), (c, d)
        else:
            merge, split = (a, d), (b, c)
        records.append((a, b, c, d, p, merge, split))
        ea = tuple(sorted((a, c)))
        eb = tuple(sorted((b, d)))
        cross_pts[ea].append(k)
        cross_pts[eb].append(k)
    # epsilon below the feature size of the arrangement
    feat = [math.dist(r1[4], r2[4]) for r1, r2 in itertools.combinations(records, 2)]
    for r in records:
        for e in edges:
            if e in ((r[0], r[2]), (r[2], r[0]), (r[1], r[3]), (r[3], r[1])):
                continue
            if tuple(sorted((r[0], r[2]))) == e or tuple(sorted((r[1], r[3]))) == e:
                continue
            feat.append(geo.point_segment_distance(r[4], pts[e[0]], pts[e[1]]))
    feat.append(1.0)
    eps = 0.2 * min(f for f in feat if f > 0)
    junctions = []
    # at crossing k the merge junction mk takes the halves arriving from the
    # merge ends and the split junction sk sends them on to the split ends
    jpos = {}
    for k, (a, b, c, d, p, merge, split) in enumerate(records):
        src = ((pts[merge[0]][0] + pts[merge[1]][0]) / 2, (pts[merge[0]][1] + pts[merge[1]][1]) / 2)
        dst = ((pts[split[0]][0] + pts[split[1]][0]) / 2, (pts[split[0]][1] + pts[split[1]][1]) / 2)
        dx, dy = dst[0] - src[0], dst[1] - src[1]
        ln = math.hypot(dx, dy) or 1.0
        m = (p[0] - eps * dx / ln, p[1] - eps * dy / ln)
        s = (p[0] + eps * dx / ln, p[1] + eps * dy / ln)
        jpos[f"m{k}"] = m
        jpos[f"s{k}"] = s
        junctions.append(Junction(f"m{k}", "binary", m))
        junctions.append(Junction(f"s{k}", "binary", s))
    arcs = []
    n_arc = [0]

    def add(a_end, b_end, poly):
        n_arc[0] += 1
        arcs.append(Arc(f"e{n_arc[0]}", a_end, b_end, tuple(poly)))

    for k in range(len(records)):
        add(Endpoint(junction=f"m{k}", port="trunk"), Endpoint(junction=f"s{k}", port="trunk"),
            [jpos[f"m{k}"], jpos[f"s{k}"]])
    for e in edges:
        u, v = sorted(e, key=pos.get)
        ks = sorted(cross_pts[e], key=lambda k: math.dist(pts[u], records[k][4]))
        cur = Endpoint(node=u)
        cur_pt = pts[u]
        for k in ks:
            a, b, c, d, p, merge, split = records[k]
            port = "branch_left" if {u, v} == {a, c} else "branch_right"
            first, second = (f"m{k}", f"s{k}") if u in merge else (f"s{k}", f"m{k}")
            add(cur, Endpoint(junction=first, port=port), [cur_pt, jpos[first]])
            cur, cur_pt = Endpoint(junction=second, port=port), jpos[second]
        add(cur, Endpoint(node=v), [cur_pt, pts[v]])
    nodes = [(v, *pts[v]) for v in order]
    return ConfluentDiagram(nodes=nodes, junctions=junctions, arcs=arcs, outer_order=order, meta=meta)


@dataclass
class BuildResult:
    diagram: ConfluentDiagram
    strict: bool
    violation: object = None
    witness: list[str] | None = None


def build_in_order(g: Graph, order, meta: dict | None = None) -> BuildResult:
    """Replace every crossing of the circular layout, reduce, and report strictness.

    This is the hook for fixed orders: for K3,3 in alternating order the
    result keeps the right graph but cannot be strict.
    """
    d = reduce(replace_crossings(g, order, meta=meta))
    verdict = check_strict(d)
    if verdict.ok:
        return BuildResult(d, True)
    return BuildResult(d, False, verdict, detect_c6_witness(d))


def build_bip_soc(g: Graph) -> ConfluentDiagram:
    ok, evidence = decide_strict_bip_soc(g)
    if not ok:
        raise BuildError(f"graph has no strict bipartite outer drawing: {evidence}")
    xs, ys = evidence["strong_ordering"]
    attempts = [two_column_order(xs, ys), two_column_order(list(reversed(xs)), list(reversed(ys)))]
    last = None
    for order in attempts:
        res = build_in_order(g, order, meta={"name": "bipartite_soc"})
        last = res
        if not res.strict:
            continue
        if not derive_graph(res.diagram).same_as(g):
            raise BuildError("derived graph differs from the input")
        emb = validate_embedding(res.diagram)
        if not emb.ok:
            raise BuildError(f"embedding check failed: {emb.kind} {emb.witness}")
        return res.diagram
    raise BuildError(f"no strict drawing reached; C6 witness {last.witness}")
