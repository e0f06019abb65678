"""Geometry for outer diagrams described combinatorially.

Nodes sit on the unit circle in clockwise order.  Junction trees are drawn
radially: every junction gets the midpoint angle of its leaf wedge and a
radius from its level, and an arc to a child first spirals outward inside a
thin annulus to the child's angle, then runs radially to the child.  Trees
nested inside a pocket of another tree use a higher radius band.  Direct
node-node arcs ("chords") hug the boundary and may only enclose nodes that
carry no junction arcs.

A tree is written as a nested dict::

    {"id": "d1", "kind": "delta", "up": "p1",
     "children": [("p2", "w"), ("p3", {...})]}

The root omits ``up`` and lists three children.  Children go clockwise.
"""

from __future__ import annotations

import math
from typing import Iterable

from confluent.diagram import Arc, ConfluentDiagram, Endpoint, Junction

JUNCTION_MAX_R = 0.84
CHORD_MIN_R = 0.88


class LayoutError(ValueError):
    pass


def node_angle(i: float, n: int) -> float:
    return math.pi / 2 - 2 * math.pi * i / n


def polar(r: float, theta: float) -> tuple[float, float]:
    return (r * math.cos(theta), r * math.sin(theta))


def _leaves(tree) -> list[str]:
    if isinstance(tree, str):
        return [tree]
    out = []
    for _, ch in tree["children"]:
        out += _leaves(ch)
    return out


def _height(tree) -> int:
    if isinstance(tree, str):
        return 0
    return 1 + max(_height(ch) for _, ch in tree["children"])


def _unrolled(indices: list[int], n: int) -> list[int]:
    """Unroll circular indices (given in clockwise leaf order) to increasing ints."""
    out = [indices[0]]
    for i in indices[1:]:
        v = i
        while v <= out[-1]:
            v += n
        out.append(v)
    if out[-1] - out[0] >= n:
        raise LayoutError("tree leaves are not in clockwise order")
    return out


def layout_outer(order: Iterable[str], trees: Iterable[dict] = (), chords: Iterable = (),
                 meta: dict | None = None) -> ConfluentDiagram:
    order = [str(v) for v in order]
    n = len(order)
    pos = {v: i for i, v in enumerate(order)}
    trees = list(trees)
    nodes = [(v, *polar(1.0, node_angle(i, n))) for i, v in enumerate(order)]
    node_pt = {v: (x, y) for v, x, y in nodes}
    # tree spans in unrolled index space
    spans = []
    for t in trees:
        lv = _leaves(t)
        u = _unrolled([pos[v] for v in lv], n)
        spans.append((u[0], u[-1], u))
    depth = []
    for k, (s, e, _) in enumerate(spans):
        d = 0
        for m, (s2, e2, u2) in enumerate(spans):
            if m == k:
                continue
            for sh in (-n, 0, n):
                if s2 < s + sh and e + sh < e2:
                    # nested only if inside a pocket between consecutive leaves
                    if any(a < s + sh and e + sh < b for a, b in zip(u2, u2[1:])):
                        d += 1
                        break
        depth.append(d)
    bands = max(depth, default=0) + 1
    band_w = JUNCTION_MAX_R / bands
    junctions: list[Junction] = []
    arcs: list[Arc] = []
    counter = [0]

    def new_arc_id(prefix="a"):
        counter[0] += 1
        return f"{prefix}{counter[0]}"

    for t, (s, e, u), dep in zip(trees, spans, depth):
        leaf_t = dict(zip(_leaves(t), u))
        h = _height(t)
        lo = dep * band_w + 0.04
        hi = (dep + 1) * band_w - 0.04
        step = (hi - lo) / max(h, 1)
        dr = step * 0.35

        def place(node, level):
            lv = _leaves(node)
            ts = [leaf_t[x] for x in lv]
            theta = node_angle((min(ts) + max(ts)) / 2, n)
            r = lo + level * step
            junctions.append(Junction(node["id"], node["kind"], polar(r, theta)))
            return r, theta

        def build(node, level):
            r, theta = place(node, level)
            for port, ch in node["children"]:
                if isinstance(ch, str):
                    ct = node_angle(leaf_t[ch], n)
                    target, cr, end = node_pt[ch], 1.0, Endpoint(node=ch)
                else:
                    cr, ct = build(ch, level + 1)
                    target, end = polar(cr, ct), Endpoint(junction=ch["id"], port=ch["up"])
                pts = [polar(r, theta)]
                steps = max(2, int(abs(ct - theta) / 0.05))
                for k in range(1, steps + 1):
                    f = k / steps
                    pts.append(polar(r + dr * f, theta + (ct - theta) * f))
                pts.append(target)
                arcs.append(Arc(new_arc_id(), Endpoint(junction=node["id"], port=port), end,
                                tuple(_dedupe(pts))))
            return r, theta

        build(t, 0)
    tree_nodes = {v for t in trees for v in _leaves(t)}
    chord_spans = []
    for ch in chords:
        a, b = str(ch[0]), str(ch[1])
        ia, ib = pos[a], pos[b]
        fwd = (ib - ia) % n
        inside_fwd = [order[(ia + k) % n] for k in range(1, fwd)]
        inside_bwd = [order[(ib + k) % n] for k in range(1, n - fwd)]
        if len(ch) > 2:
            inside = inside_fwd if ch[2] == "cw" else inside_bwd
            start = ia if ch[2] == "cw" else ib
            length = fwd if ch[2] == "cw" else n - fwd
        elif (len(inside_fwd), inside_fwd) <= (len(inside_bwd), inside_bwd) and not (tree_nodes & set(inside_fwd)):
            inside, start, length = inside_fwd, ia, fwd
        else:
            inside, start, length = inside_bwd, ib, n - fwd
        if tree_nodes & set(inside):
            raise LayoutError(f"chord {a}-{b} encloses nodes with junction arcs")
        chord_spans.append((start, start + length, (a, b)))
    def contains(outer, inner):
        s2, e2 = outer[:2]
        return any(s2 <= inner[0] + sh and inner[1] + sh <= e2 and (s2, e2) != (inner[0] + sh, inner[1] + sh)
                   for sh in (-n, 0, n))

    height: dict[int, int] = {}

    def chord_height(k):
        if k not in height:
            inner = [m for m in range(len(chord_spans)) if m != k and contains(chord_spans[k], chord_spans[m])]
            height[k] = 1 + max((chord_height(m) for m in inner), default=-1)
        return height[k]

    for k, (s, e, (a, b)) in enumerate(chord_spans):
        h = chord_height(k)
        # enclosing chords run deeper and leave their endpoints more steeply
        rho = max(0.985 - 0.02 * h, CHORD_MIN_R)
        off = 0.2 * (2 * math.pi / n) / (1 + 0.5 * h)
        t0 = node_angle(s, n)
        t1 = node_angle(e, n)
        first = order[s % n]
        last = order[e % n]
        pts = [node_pt[first]]
        a0, a1 = t0 - off, t1 + off
        steps = max(2, int(abs(a1 - a0) / 0.05))
        for k in range(steps + 1):
            pts.append(polar(rho, a0 + (a1 - a0) * k / steps))
        pts.append(node_pt[last])
        arcs.append(Arc(new_arc_id("c"), Endpoint(node=first), Endpoint(node=last), tuple(_dedupe(pts))))
    return ConfluentDiagram(nodes=nodes, junctions=junctions, arcs=arcs, outer_order=order, meta=meta)


def _dedupe(pts):
    out = []
    for p in pts:
        if not out or math.dist(out[-1], p) > 1e-12:
            out.append(p)
    return out
