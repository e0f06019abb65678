"""Named diagrams and graphs used by tests, the CLI and the acceptance suite.

Hand-placed diagrams use straight arcs between the listed points; tree-like
ones go through :func:`confluent.layout.layout_outer`.
"""

from __future__ import annotations

import json
import math
import random
from pathlib import Path

from confluent import graph as gmod
from confluent.diagram import ConfluentDiagram, Endpoint
from confluent.graph import Graph
from confluent.layout import layout_outer


def _deg(a: float) -> tuple[float, float]:
    t = math.radians(a)
    return (math.cos(t), math.sin(t))


def _end(spec: str) -> Endpoint:
    if "." in spec:
        j, p = spec.split(".")
        return Endpoint(junction=j, port=p)
    return Endpoint(node=spec)


def _straight(nodes: dict, junctions: dict, arcs: list[tuple[str, str]], order, meta=None):
    """Diagram whose arcs are straight segments.  ``arcs`` entries are
    ``"node"`` or ``"junction.port"`` strings."""
    pts = {**{k: v for k, v in nodes.items()}, **{k: v[1] for k, v in junctions.items()}}
    arc_list = []
    for k, (a, b) in enumerate(arcs, 1):
        ea, eb = _end(a), _end(b)
        pa = pts[ea.node or ea.junction]
        pb = pts[eb.node or eb.junction]
        arc_list.append((f"a{k}", ea, eb, [pa, pb]))
    return ConfluentDiagram(
        nodes=[(k, *v) for k, v in nodes.items()],
        junctions=[(k, kind, *p) for k, (kind, p) in junctions.items()],
        arcs=arc_list, outer_order=order, meta=meta)


# --- hand-placed diagrams ---------------------------------------------------

def k5_soc() -> ConfluentDiagram:
    """Strict outer drawing of K5 with four binary junctions.

    The u-y path runs through i, j, k and l.
    """
    nodes = {"u": _deg(90), "v": _deg(18), "w": _deg(-54), "x": _deg(-126), "y": _deg(162)}
    junctions = {
        "i": ("binary", (0.4, 0.5)),
        "j": ("binary", (0.3, 0.1)),
        "k": ("binary", (0.0, -0.35)),
        "l": ("binary", (-0.45, -0.2)),
    }
    arcs = [
        ("i.branch_left", "u"), ("i.branch_right", "v"), ("i.trunk", "j.trunk"),
        ("j.branch_left", "k.branch_left"), ("j.branch_right", "w"),
        ("k.branch_right", "w"), ("k.trunk", "l.trunk"),
        ("l.branch_left", "x"), ("l.branch_right", "y"),
        ("u", "v"), ("x", "y"),
    ]
    return _straight(nodes, junctions, arcs, ["u", "v", "w", "x", "y"], meta={"name": "k5_soc"})


def lollipop_cycle() -> ConfluentDiagram:
    """A stick from i to j ending in a loop with two merge-split pairs.

    The loop can be run in both directions, so u and v are joined by two
    smooth walks, each passing i and j twice.
    """
    nodes = {"u": _deg(150), "a": _deg(80), "b": _deg(30), "c": _deg(-30), "d": _deg(-80), "v": _deg(-150)}
    junctions = {
        "i": ("binary", (-0.5, 0.0)),
        "j": ("binary", (0.0, 0.0)),
        "p1": ("binary", (0.1, 0.35)),
        "p2": ("binary", (0.4, 0.25)),
        "q1": ("binary", (0.4, -0.25)),
        "q2": ("binary", (0.1, -0.35)),
    }
    arcs = [
        ("i.branch_left", "u"), ("i.branch_right", "v"), ("i.trunk", "j.trunk"),
        ("j.branch_right", "p1.branch_left"), ("p1.trunk", "p2.trunk"),
        ("p2.branch_left", "q1.branch_left"), ("q1.trunk", "q2.trunk"),
        ("q2.branch_left", "j.branch_left"),
        ("p1.branch_right", "a"), ("p2.branch_right", "b"),
        ("q1.branch_right", "c"), ("q2.branch_right", "d"),
    ]
    return _straight(nodes, junctions, arcs, ["u", "a", "b", "c", "d", "v"], meta={"name": "lollipop_cycle"})


def domino_order() -> ConfluentDiagram:
    """Domino in bipartite order with both crossings replaced.

    u and v end up joined by two parallel routes, one per merge-split pair.
    """
    nodes = {"u": _deg(180), "x": _deg(120), "y": _deg(60), "v": _deg(0), "w": _deg(-60), "z": _deg(-120)}
    junctions = {
        "s": ("binary", (-0.6, 0.0)),
        "m": ("binary", (0.6, 0.0)),
        "p1": ("binary", (-0.25, 0.35)),
        "p2": ("binary", (0.25, 0.35)),
        "q1": ("binary", (-0.25, -0.35)),
        "q2": ("binary", (0.25, -0.35)),
    }
    arcs = [
        ("s.trunk", "u"), ("s.branch_left", "p1.branch_left"), ("s.branch_right", "q1.branch_left"),
        ("p1.trunk", "p2.trunk"), ("p1.branch_right", "x"),
        ("p2.branch_left", "m.branch_left"), ("p2.branch_right", "y"),
        ("q1.trunk", "q2.trunk"), ("q1.branch_right", "z"),
        ("q2.branch_left", "m.branch_right"), ("q2.branch_right", "w"),
        ("m.trunk", "v"),
    ]
    return _straight(nodes, junctions, arcs, ["u", "x", "y", "v", "w", "z"], meta={"name": "domino_order"})


def k2() -> ConfluentDiagram:
    return layout_outer(["a", "b"], chords=[("a", "b")], meta={"name": "k2"})


def isolated(n: int = 2) -> ConfluentDiagram:
    return layout_outer([f"v{i}" for i in range(1, n + 1)], meta={"name": f"isolated{n}"})


def outer_path(n: int = 5) -> ConfluentDiagram:
    vs = [f"v{i}" for i in range(1, n + 1)]
    return layout_outer(vs, chords=list(zip(vs, vs[1:])), meta={"name": f"path{n}"})


def outer_cycle(n: int = 5) -> ConfluentDiagram:
    vs = [f"v{i}" for i in range(1, n + 1)]
    return layout_outer(vs, chords=[(vs[i], vs[(i + 1) % n]) for i in range(n)], meta={"name": f"cycle{n}"})


def outer_star() -> ConfluentDiagram:
    return layout_outer(["c", "a", "b", "e"], chords=[("c", "a"), ("c", "b", "cw"), ("e", "c")],
                        meta={"name": "star3"})


def c4_merge_split() -> ConfluentDiagram:
    """C4 as K2,2 with sides contiguous: one merge-split pair."""
    tree = {"id": "m", "kind": "binary", "children": [
        ("branch_left", "x1"), ("branch_right", "x2"),
        ("trunk", {"id": "s", "kind": "binary", "up": "trunk",
                   "children": [("branch_left", "y1"), ("branch_right", "y2")]})]}
    return layout_outer(["x1", "x2", "y1", "y2"], trees=[tree], meta={"name": "c4_merge_split"})


def delta_k5e() -> ConfluentDiagram:
    """A binary junction feeding a chain of two Delta-junctions: K5 minus uv."""
    tree = {"id": "a", "kind": "binary", "children": [
        ("branch_left", "u"), ("branch_right", "v"),
        ("trunk", {"id": "d1", "kind": "delta", "up": "p1", "children": [
            ("p2", "w"),
            ("p3", {"id": "d2", "kind": "delta", "up": "p1", "children": [("p2", "x"), ("p3", "y")]})]})]}
    depths = {"a": 3, "d1": 2, "d2": 1}
    return layout_outer(["u", "v", "w", "x", "y"], trees=[tree],
                        meta={"name": "delta_k5e", "depths": depths})


def delta_k4() -> ConfluentDiagram:
    tree = {"id": "d1", "kind": "delta", "children": [
        ("p1", "a"), ("p2", "b"),
        ("p3", {"id": "d2", "kind": "delta", "up": "p1", "children": [("p2", "c"), ("p3", "d")]})]}
    return layout_outer(["a", "b", "c", "d"], trees=[tree], meta={"name": "delta_k4"})


def delta_tree_chords() -> ConfluentDiagram:
    """Delta/binary tree over a, b, c, d plus boundary paths through p and q.

    The simple edges sit on the outer face, so the graph is tree-like but not
    distance-hereditary (it has an induced house).
    """
    tree = {"id": "j1", "kind": "binary", "children": [
        ("branch_left", "a"), ("branch_right", "b"),
        ("trunk", {"id": "d1", "kind": "delta", "up": "p1", "children": [("p2", "c"), ("p3", "d")]})]}
    order = ["a", "p", "b", "c", "q", "d", "r"]
    chords = [("a", "p"), ("p", "b"), ("c", "q"), ("q", "d"), ("d", "r"), ("r", "a")]
    return layout_outer(order, trees=[tree], chords=chords, meta={"name": "delta_tree_chords"})


def region_sketch() -> ConfluentDiagram:
    """Two-level tree with boundary stretches on both sides of the root.

    Used to check region boundaries and groups against stored annotations.
    """
    left = {"id": "jl", "kind": "binary", "up": "trunk", "children": [("branch_left", "a"), ("branch_right", "b")]}
    right = {"id": "jr", "kind": "delta", "up": "p1", "children": [("p2", "d"), ("p3", "e")]}
    tree = {"id": "j0", "kind": "delta", "children": [("p1", left), ("p2", right), ("p3", "g")]}
    order = ["a", "s", "b", "t", "d", "e", "g", "h"]
    chords = [("a", "s"), ("s", "b"), ("b", "t"), ("t", "d"), ("g", "h"), ("h", "a")]
    # hand annotation, rooted at the arc jl-a: (junction, stretch, groups)
    regions = [
        ["jr", ["d"], {"A": ["d"]}],
        ["jr", ["e"], {"A": ["e"]}],
        ["j0", ["d", "e"], {"A": ["d"], "B": ["e"]}],
        ["j0", ["g"], {"A": ["g"]}],
        ["jl", ["b"], {"A": ["b"]}],
        ["jl", ["d", "e", "g"], {"A": ["d"], "B": ["g"], "D": ["e"]}],
        [None, ["b", "t", "d", "e", "g"], {"A": ["b"], "B": ["g"], "C": ["t"], "D": ["d", "e"]}],
        [None, ["a"], {"A": ["a"]}],
    ]
    meta = {"name": "region_sketch", "depths": {"jr": 1, "j0": 2, "jl": 3}, "regions": regions}
    return layout_outer(order, trees=[tree], chords=chords, meta=meta)


def pure_delta_tree(leaves: int, seed: int) -> ConfluentDiagram:
    """Random tree of Delta-junctions with the given number of node leaves."""
    return random_tree_like(leaves, seed, extra_nodes=0, delta_prob=1.0, chord_prob=0.0,
                            name=f"delta_tree_{leaves}_{seed}")


def random_tree_like(leaves: int, seed: int, extra_nodes: int = 0, delta_prob: float = 0.5,
                     chord_prob: float = 0.6, name: str | None = None) -> ConfluentDiagram:
    """A random tree-like strict outer diagram.

    One junction tree over ``leaves`` (>= 3) boundary nodes; ``extra_nodes``
    further nodes are sprinkled between tree leaves and joined by boundary
    chords to their neighbours with probability ``chord_prob``.
    """
    rng = random.Random(seed)
    counter = [0]

    def jid():
        counter[0] += 1
        return f"j{counter[0]}"

    def grow(items):
        # items: list of subtrees in clockwise order; merge neighbours until <= 3
        items = list(items)
        while len(items) > 3:
            k = rng.randrange(len(items) - 1)
            kind = "delta" if rng.random() < delta_prob else "binary"
            if kind == "delta":
                node = {"id": jid(), "kind": kind, "up": "p1",
                        "children": [("p2", items[k]), ("p3", items[k + 1])]}
            else:
                up = rng.choice(["trunk", "branch_left", "branch_right"])
                rest = [p for p in ("branch_left", "trunk", "branch_right") if p != up]
                node = {"id": jid(), "kind": kind, "up": up,
                        "children": [(rest[0], items[k]), (rest[1], items[k + 1])]}
            items[k:k + 2] = [node]
        kind = "delta" if rng.random() < delta_prob else "binary"
        ports = ["p1", "p2", "p3"] if kind == "delta" else ["branch_left", "trunk", "branch_right"]
        if kind == "binary":
            rng.shuffle(ports)
        return {"id": jid(), "kind": kind, "children": list(zip(ports, items))}

    tree_nodes = [f"t{i}" for i in range(1, leaves + 1)]
    tree = grow(tree_nodes)
    order = list(tree_nodes)
    extras = []
    for e in range(extra_nodes):
        pos = rng.randrange(len(order) + 1)
        name_e = f"s{e + 1}"
        order.insert(pos, name_e)
        extras.append(name_e)
    d0 = layout_outer(order, trees=[tree])
    from confluent.diagram import derive_graph
    adj = derive_graph(d0)
    chords = []
    n = len(order)
    extra_set = set(extras)
    for i in range(n):
        a, b = order[i], order[(i + 1) % n]
        if n < 2 or a == b or (a not in extra_set and b not in extra_set):
            continue
        if adj.has_edge(a, b) or any({a, b} == {c[0], c[1]} for c in chords):
            continue
        if rng.random() < chord_prob:
            chords.append((a, b, "cw"))
    return layout_outer(order, trees=[tree], chords=chords, meta={"name": name or f"tree_like_{leaves}_{seed}"})


# --- collections ------------------------------------------------------------

def strict_outer_fixtures() -> dict[str, ConfluentDiagram]:
    out = {}
    for f in (k5_soc, delta_k5e, k2, c4_merge_split, delta_k4, outer_star, delta_tree_chords, region_sketch):
        d = f()
        out[d.meta["name"]] = d
    out["isolated2"] = isolated(2)
    out["isolated3"] = isolated(3)
    out["path5"] = outer_path(5)
    out["cycle5"] = outer_cycle(5)
    out["cycle6"] = outer_cycle(6)
    return out


def non_strict_fixtures() -> dict[str, ConfluentDiagram]:
    return {"lollipop_cycle": lollipop_cycle(), "domino_order": domino_order()}


def tree_like_fixtures() -> dict[str, ConfluentDiagram]:
    out = {k: v for k, v in strict_outer_fixtures().items() if k != "k5_soc"}
    for leaves, seed in [(4, 1), (5, 2), (6, 3), (7, 4)]:
        d = random_tree_like(leaves, seed, extra_nodes=3)
        out[d.meta["name"]] = d
    for leaves, seed in [(4, 11), (5, 12), (6, 13)]:
        d = pure_delta_tree(leaves, seed)
        out[d.meta["name"]] = d
    return out


def pure_delta_fixtures() -> dict[str, ConfluentDiagram]:
    """Junction-tree-only diagrams (no simple edges), at most 8 nodes."""
    out = {"delta_k4": delta_k4(), "delta_k5e": delta_k5e()}
    for leaves, seed in [(4, 11), (5, 12), (6, 13), (7, 14), (8, 15)]:
        d = pure_delta_tree(leaves, seed)
        out[d.meta["name"]] = d
    for leaves, seed in [(5, 21), (6, 22), (7, 23), (8, 24), (8, 25)]:
        d = random_tree_like(leaves, seed, extra_nodes=0, delta_prob=0.3, name=f"junction_tree_{leaves}_{seed}")
        out[d.meta["name"]] = d
    return out


# --- named graphs (non-inclusion fixtures) ---------------------------------

def named_graphs() -> dict[str, Graph]:
    return {
        "c4": gmod.cycle(4),
        "c5": gmod.cycle(5),
        "c6": gmod.cycle(6),
        "k4": gmod.complete(4),
        "k33": gmod.complete_bipartite(3, 3),
        "k33_minus_edge": gmod.k33_minus_edge(),
        "domino": gmod.domino(),
        "w5": gmod.wheel(5),
        "w7": gmod.wheel(7),
        "bw3": gmod.broken_wheel_3(),
        "domino_subdivided_chord": gmod.domino_subdivided_chord(),
        "subdivided_star_complement": gmod.subdivided_star_complement(),
    }


def export(directory: str | Path) -> list[Path]:
    """Write every fixture as JSON into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, d in {**strict_outer_fixtures(), **non_strict_fixtures()}.items():
        p = directory / f"{name}.json"
        p.write_text(json.dumps(d.to_json(), sort_keys=True, indent=1))
        written.append(p)
    for name, g in named_graphs().items():
        p = directory / f"{name}.graph.json"
        p.write_text(json.dumps(g.to_json(), sort_keys=True, indent=1))
        written.append(p)
    return written
