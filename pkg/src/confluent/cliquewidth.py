"""k-expressions and a 16-label construction for tree-like diagrams.

A k-expression is a term over four operations: create a vertex with a label,
disjoint union, relabel i -> j, and join every i-labelled vertex to every
j-labelled one.  The number of labels used bounds the clique-width.
"""

from __future__ import annotations

import functools
import itertools
import json
from dataclasses import dataclass

from confluent.graph import Graph, SizeCapExceeded


class ExpressionError(ValueError):
    pass


# --- terms ---------------------------------------------------------------------

@dataclass(frozen=True)
class KExpression:
    op: str  # "initial", "union", "relabel", "edges"
    children: tuple = ()
    vertex: str | None = None
    label: int | None = None
    i: int | None = None
    j: int | None = None

    def walk(self):
        """Post-order traversal without recursion."""
        stack = [(self, False)]
        while stack:
            t, done = stack.pop()
            if done or not t.children:
                yield t
                continue
            stack.append((t, True))
            for c in reversed(t.children):
                stack.append((c, False))

    def labels(self) -> set[int]:
        out = set()
        for t in self.walk():
            if t.op == "initial":
                out.add(t.label)
            elif t.op in ("relabel", "edges"):
                out.update((t.i, t.j))
        return out

    def vertices(self) -> list[str]:
        return [t.vertex for t in self.walk() if t.op == "initial"]

    def to_sexpr(self) -> str:
        memo = {}
        for t in self.walk():
            if t.op == "initial":
                s = f"(v {t.vertex} {t.label})"
            elif t.op == "union":
                s = "(union " + " ".join(memo[id(c)] for c in t.children) + ")"
            elif t.op == "relabel":
                s = f"(relabel {t.i} {t.j} {memo[id(t.children[0])]})"
            else:
                s = f"(eta {t.i} {t.j} {memo[id(t.children[0])]})"
            memo[id(t)] = s
        return memo[id(self)]

    def to_json(self) -> dict:
        memo = {}
        for t in self.walk():
            if t.op == "initial":
                out = {"op": "initial", "vertex": t.vertex, "label": t.label}
            elif t.op == "union":
                out = {"op": "union", "children": [memo[id(c)] for c in t.children]}
            else:
                out = {"op": t.op, "i": t.i, "j": t.j, "child": memo[id(t.children[0])]}
            memo[id(t)] = out
        return memo[id(self)]

    @staticmethod
    def from_json(data: dict) -> "KExpression":
        op = data["op"]
        if op == "initial":
            return initial(data["vertex"], data["label"])
        if op == "union":
            return union(*(KExpression.from_json(c) for c in data["children"]))
        child = KExpression.from_json(data["child"])
        if op == "relabel":
            return relabel(data["i"], data["j"], child)
        if op == "edges":
            return insert_edges(data["i"], data["j"], child)
        raise ExpressionError(f"unknown op {op!r}")

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def initial(vertex: str, label: int = 1) -> KExpression:
    if label < 1:
        raise ExpressionError("labels start at 1")
    return KExpression("initial", vertex=vertex, label=label)


def union(*parts: KExpression) -> KExpression:
    """Disjoint union; more than two parts nest to the right."""
    if not parts:
        raise ExpressionError("empty union")
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = KExpression("union", children=(p, out))
    return out


def relabel(i: int, j: int, child: KExpression) -> KExpression:
    if i < 1 or j < 1:
        raise ExpressionError("labels start at 1")
    return child if i == j else KExpression("relabel", children=(child,), i=i, j=j)


def insert_edges(i: int, j: int, child: KExpression) -> KExpression:
    if i == j:
        raise ExpressionError("edge insertion needs two different labels")
    if i < 1 or j < 1:
        raise ExpressionError("labels start at 1")
    return KExpression("edges", children=(child,), i=i, j=j)


def evaluate(e: KExpression, k: int | None = None) -> tuple[Graph, dict[str, int]]:
    """Graph and final labelling defined by ``e``; ``k`` bounds the labels."""
    memo: dict[int, tuple[set, dict]] = {}
    for t in e.walk():
        if t.op == "initial":
            res = (set(), {t.vertex: t.label})
        elif t.op == "union":
            edges, lab = set(), {}
            for c in t.children:
                ce, cl = memo.pop(id(c))
                dup = lab.keys() & cl.keys()
                if dup:
                    raise ExpressionError(f"vertex introduced twice: {sorted(dup)[0]}")
                edges |= ce
                lab.update(cl)
            res = (edges, lab)
        elif t.op == "relabel":
            edges, lab = memo.pop(id(t.children[0]))
            res = (edges, {v: (t.j if x == t.i else x) for v, x in lab.items()})
        else:
            edges, lab = memo.pop(id(t.children[0]))
            a = [v for v, x in lab.items() if x == t.i]
            b = [v for v, x in lab.items() if x == t.j]
            edges = edges | {(min(u, v), max(u, v)) for u in a for v in b}
            res = (edges, lab)
        memo[id(t)] = res
    if k is not None:
        bad = [x for x in e.labels() if x > k]
        if bad:
            raise ExpressionError(f"label {max(bad)} outside [1, {k}]")
    edges, lab = memo[id(e)]
    return Graph(sorted(lab), sorted(edges)), lab


def width(e: KExpression) -> int:
    """Number of distinct labels appearing in ``e``."""
    return len(e.labels())


def final_labels(e: KExpression) -> dict[str, int]:
    return evaluate(e)[1]


def rename(e: KExpression, perm: dict[int, int]) -> KExpression:
    """Apply an injective renaming to every label in the term."""
    if len(set(perm.values())) != len(perm):
        raise ExpressionError("renaming must be injective")
    f = lambda x: perm.get(x, x)  # noqa: E731
    memo = {}
    for t in e.walk():
        if t.op == "initial":
            r = initial(t.vertex, f(t.label))
        elif t.op == "union":
            r = union(*(memo[id(c)] for c in t.children))
        elif t.op == "relabel":
            r = relabel(f(t.i), f(t.j), memo[id(t.children[0])])
        else:
            r = insert_edges(f(t.i), f(t.j), memo[id(t.children[0])])
        memo[id(t)] = r
    return memo[id(e)]


def apply_map(e: KExpression, f: dict[int, int], limit: int = 16) -> KExpression:
    """Relabel so every label ``x`` ends as ``f[x]`` (many-to-one allowed).

    Cycles go through a free label in [1, limit].
    """
    present = set(final_labels(e).values())
    pending = {x: f[x] for x in present if x in f and f[x] != x}
    while pending:
        ready = [x for x, t in sorted(pending.items()) if t not in pending]
        if ready:
            x = ready[0]
            t = pending.pop(x)
            e = relabel(x, t, e)
            present.discard(x)
            present.add(t)
            continue
        used = present | set(pending.values())
        free = next((y for y in range(1, limit + 1) if y not in used), None)
        if free is None:
            raise ExpressionError("no free label to break a relabel cycle")
        x = min(pending)
        e = relabel(x, free, e)
        pending[free] = pending.pop(x)
        present.discard(x)
        present.add(free)
    return e


# --- copy expansion ---------------------------------------------------------------

def expand_groups(e: KExpression, groups: list, limit: int | None = None) -> KExpression:
    """Re-express ``e`` so the vertices of ``groups[i]`` end on label i + 1.

    Every group of two or more vertices gets its own copy of the k labels of
    ``e``; a singleton keeps one reserved label while its original label is
    tracked symbolically.  Width: k per large group plus one per singleton.
    """
    groups = [set(x) for x in groups]
    verts = set(e.vertices())
    seen = set()
    for grp in groups:
        if grp & seen:
            raise ExpressionError("groups must be disjoint")
        seen |= grp
    if seen != verts:
        raise ExpressionError("groups must cover the vertices of the expression")
    k = max(2, max(e.labels()))
    big = [gi for gi, grp in enumerate(groups) if len(grp) > 1]
    single = [gi for gi, grp in enumerate(groups) if len(grp) == 1]
    copy_of = {v: c for c, gi in enumerate(big) for v in groups[gi]}
    spot = {next(iter(groups[gi])): len(big) * k + 1 + n for n, gi in enumerate(single)}
    top = len(big) * k + len(single)
    limit = max(limit or 0, top, len(groups))

    def copies(x):
        return [x + c * k for c in range(len(big))]

    memo: dict[int, tuple[KExpression, dict]] = {}
    for t in e.walk():
        if t.op == "initial":
            v = t.vertex
            lab = spot[v] if v in spot else t.label + copy_of[v] * k
            res = (initial(v, lab), {v: t.label} if v in spot else {})
        elif t.op == "union":
            parts = [memo.pop(id(c)) for c in t.children]
            track = {}
            for _, tr in parts:
                track.update(tr)
            res = (union(*(p for p, _ in parts)), track)
        elif t.op == "relabel":
            child, track = memo.pop(id(t.children[0]))
            for a, b in zip(copies(t.i), copies(t.j)):
                child = relabel(a, b, child)
            res = (child, {v: (t.j if x == t.i else x) for v, x in track.items()})
        else:
            child, track = memo.pop(id(t.children[0]))
            for a in copies(t.i):
                for b in copies(t.j):
                    child = insert_edges(a, b, child)
            ones = {x: [spot[v] for v, y in track.items() if y == x] for x in (t.i, t.j)}
            for r in ones[t.i]:
                for b in copies(t.j) + ones[t.j]:
                    child = insert_edges(r, b, child)
            for r in ones[t.j]:
                for a in copies(t.i):
                    child = insert_edges(r, a, child)
            res = (child, track)
        memo[id(t)] = res
    out = memo[id(e)][0]
    # collapse every copy onto its first label, then move copies to targets
    collapse = {x + c * k: 1 + c * k for c in range(len(big)) for x in range(1, k + 1)}
    out = apply_map(out, collapse, limit)
    target = {1 + c * k: gi + 1 for c, gi in enumerate(big)}
    target.update({spot[next(iter(groups[gi]))]: gi + 1 for gi in single})
    return apply_map(out, target, limit)


def expand_labels(e: KExpression, V1, V2, s: str) -> KExpression:
    """A (3k+1)-label version of ``e`` ending with V1 on label 1, V2 on 2,
    s on 3 and every other vertex on 4."""
    V1, V2 = set(V1), set(V2)
    verts = set(e.vertices())
    if V1 & V2 or s in V1 | V2:
        raise ExpressionError("V1, V2 and s must be disjoint")
    if s not in verts or not (V1 | V2) <= verts:
        raise ExpressionError("V1, V2 and s must be vertices of the expression")
    k = max(2, max(e.labels()))
    return expand_groups(e, [V1, V2, {s}, verts - V1 - V2 - {s}], 3 * k + 1)


# --- exact small-width search ----------------------------------------------------

EXACT_CAP = 8


def _set_partitions(items, k):
    """Partitions of ``items`` into at most k blocks (block = list)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest, k):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        if len(part) < k:
            yield [[first]] + part


@functools.lru_cache(maxsize=None)
def _groupings(n: int, k: int) -> tuple:
    return tuple(tuple(tuple(b) for b in p) for p in _set_partitions(list(range(n)), k))


def min_width_expression(g: Graph, max_width: int = 5, cap: int = EXACT_CAP) -> KExpression | None:
    """A k-expression of smallest width <= max_width, by exhaustive search.

    Builds every labelled induced subgraph reachable by union plus edge
    insertion; relabelling is folded into how the blocks of the two sides
    are grouped.  Returns None when the clique-width exceeds max_width.
    """
    vs = sorted(g.vertices)
    n = len(vs)
    if n > cap:
        raise SizeCapExceeded(f"exact clique-width search limited to {cap} vertices")
    if n == 0:
        return None
    for k in range(1, max_width + 1):
        e = _search(g, vs, k)
        if e is not None:
            return e
    return None


def _search(g: Graph, vs: list[str], k: int) -> KExpression | None:
    n = len(vs)
    adj = [0] * n
    for a, b in g.edges:
        ia, ib = vs.index(a), vs.index(b)
        adj[ia] |= 1 << ib
        adj[ib] |= 1 << ia
    full = (1 << n) - 1
    # states[S] = {partition (sorted tuple of block masks): backpointer}
    states: dict[int, dict[tuple, object]] = {1 << i: {(1 << i,): ("leaf", i)} for i in range(n)}

    # union and intersection of neighbourhoods for every vertex mask
    nbr_any = [0] * (full + 1)
    nbr_all = [full] * (full + 1)
    for m in range(1, full + 1):
        low = m & -m
        i = low.bit_length() - 1
        nbr_any[m] = nbr_any[m ^ low] | adj[i]
        nbr_all[m] = nbr_all[m ^ low] & adj[i]

    for size in range(2, n + 1):
        for S in (m for m in range(1, full + 1) if bin(m).count("1") == size):
            low = S & -S
            found: dict[tuple, object] = {}
            sub = (S - 1) & S
            while sub:
                if sub & low and sub != S:
                    S1, S2 = sub, S ^ sub
                    if S1 in states and S2 in states:
                        for P1 in states[S1]:
                            for P2 in states[S2]:
                                blocks = [(0, b) for b in P1] + [(1, b) for b in P2]
                                for grouping in _groupings(len(blocks), k):
                                    groups = []
                                    ok = True
                                    for grp in grouping:
                                        m1 = m2 = 0
                                        for i in grp:
                                            if blocks[i][0]:
                                                m2 |= blocks[i][1]
                                            else:
                                                m1 |= blocks[i][1]
                                        if nbr_any[m1] & m2:
                                            ok = False
                                            break
                                        groups.append((m1, m2))
                                    if not ok:
                                        continue
                                    joins = []
                                    for a, b in itertools.combinations(range(len(groups)), 2):
                                        (a1, a2), (b1, b2) = groups[a], groups[b]
                                        if nbr_any[a1] & b2 or nbr_any[a2] & b1:
                                            if nbr_all[a1 | a2] & (b1 | b2) != b1 | b2:
                                                ok = False
                                                break
                                            joins.append((a, b))
                                    if not ok:
                                        continue
                                    P = tuple(sorted(x | y for x, y in groups))
                                    if P in found or any(_finer(Q, P) for Q in found):
                                        continue
                                    for Q in [Q for Q in found if _finer(P, Q)]:
                                        del found[Q]
                                    found[P] = ("join", S1, P1, S2, P2, blocks, grouping, joins)
                sub = (sub - 1) & S
            if found:
                states[S] = found
        if size == n:
            break
    if full not in states:
        return None
    P = next(iter(sorted(states[full])))
    return _rebuild(states, vs, full, P, k)


def _finer(P, Q) -> bool:
    """Every block of P lies inside a block of Q (relabelling turns P into Q)."""
    return all(any(b & q == b for q in Q) for b in P)


def _rebuild(states, vs, S, P, k) -> KExpression:
    """Expression for state (S, P) whose block P[i] ends on label i + 1."""
    back = states[S][P]
    if back[0] == "leaf":
        return initial(vs[back[1]], 1)
    _, S1, P1, S2, P2, blocks, grouping, joins = back
    # group g takes the position of its block in the sorted result partition
    masks = [sum(blocks[i][1] for i in grp) for grp in grouping]
    target = {g: P.index(m) + 1 for g, m in enumerate(masks)}
    sides = []
    for side, (Sx, Px) in enumerate(((S1, P1), (S2, P2))):
        e = _rebuild(states, vs, Sx, Px, k)
        idx = [i for i, b in enumerate(blocks) if b[0] == side]
        group_of = {i: g for g, grp in enumerate(grouping) for i in grp}
        # rename so one block per group sits on its target, the rest on spare labels
        perm, reps = {}, set()
        for pos, i in enumerate(idx):
            g = group_of[i]
            if g not in reps:
                perm[pos + 1] = target[g]
                reps.add(g)
        spare = iter(x for x in range(1, k + 1) if x not in perm.values())
        for pos, i in enumerate(idx):
            if pos + 1 not in perm:
                perm[pos + 1] = next(spare)
        rest = iter(x for x in range(1, k + 1) if x not in perm.values())
        for x in sorted(e.labels()):
            if x not in perm:
                perm[x] = next(rest)
        e = rename(e, perm)
        for pos, i in enumerate(idx):
            e = relabel(perm[pos + 1], target[group_of[i]], e)
        sides.append(e)
    out = union(*sides)
    for a, b in joins:
        out = insert_edges(target[a], target[b], out)
    return out


# --- junction trees, depths and regions --------------------------------------------

from confluent.diagram import (  # noqa: E402
    ConfluentDiagram, DiagramError, NotTreeLike, classify_tree_like, derive_graph,
)
from confluent.graph import induced_subgraph  # noqa: E402

MAX_LABELS = 16
REGION_WIDTH = 5


@dataclass(frozen=True)
class DepthMap:
    depth: dict          # junction id -> depth (nodes are 0)
    down_arcs: dict      # junction id -> arc ids towards its children
    roots: tuple         # one root arc per junction tree

    def to_json(self) -> dict:
        return {"depth": dict(sorted(self.depth.items())),
                "down_arcs": {k: list(v) for k, v in sorted(self.down_arcs.items())},
                "roots": list(self.roots)}


@dataclass(frozen=True)
class Region:
    junction: str | None     # None for the two sides of a root arc
    down_arc: str
    boundary_segment: tuple  # nodes in clockwise order
    groups: dict             # "A", "B", "C", "D" -> tuple of nodes

    def to_json(self) -> dict:
        return {"junction": self.junction, "down_arc": self.down_arc,
                "boundary_segment": list(self.boundary_segment),
                "groups": {k: list(v) for k, v in self.groups.items()}}


class _Tree:
    """One junction tree rooted at its smallest arc.  Node endpoints are leaves."""

    def __init__(self, d: ConfluentDiagram, arcs: list[str], root: str):
        self.d = d
        self.arcs = list(arcs)
        self.root = root
        self.nbrs: dict[tuple, list[tuple[tuple, str]]] = {}
        for aid in arcs:
            arc = d.arcs[aid]
            ends = [("n", e.node, aid) if e.is_node else ("j", e.junction) for e in (arc.a, arc.b)]
            for x, y in (ends, ends[::-1]):
                self.nbrs.setdefault(x, []).append((y, aid))
        ra = d.arcs[root]
        self.tops = [("n", e.node, root) if e.is_node else ("j", e.junction) for e in (ra.a, ra.b)]
        self.parent: dict[tuple, tuple] = {self.tops[0]: (self.tops[1], root), self.tops[1]: (self.tops[0], root)}
        self.children: dict[tuple, list[tuple[tuple, str]]] = {}
        stack = list(self.tops)
        while stack:
            x = stack.pop()
            kids = [(y, aid) for y, aid in self.nbrs.get(x, []) if aid != self.parent[x][1]]
            self.children[x] = kids
            for y, aid in kids:
                self.parent[y] = (x, aid)
                stack.append(y)
        self.depth: dict[tuple, int] = {}
        for x in self._postorder():
            self.depth[x] = 0 if x[0] == "n" else 1 + max(self.depth[y] for y, _ in self.children[x])
        self.leaves: dict[tuple, set[str]] = {}
        for x in self._postorder():
            self.leaves[x] = {x[1]} if x[0] == "n" else set().union(*(self.leaves[y] for y, _ in self.children[x]))

    def _postorder(self):
        out, stack = [], list(self.tops)
        while stack:
            x = stack.pop()
            out.append(x)
            stack.extend(y for y, _ in self.children.get(x, []))
        return out[::-1]

    def all_leaves(self) -> set[str]:
        return self.leaves[self.tops[0]] | self.leaves[self.tops[1]]

    def below(self, x) -> list[tuple]:
        out, stack = [], [x]
        while stack:
            y = stack.pop()
            out.append(y)
            stack.extend(c for c, _ in self.children.get(y, []))
        return out

    def rerooted_at(self, node: str) -> "_Tree":
        aid = next(a for a in self.arcs if node in (self.d.arcs[a].a.node, self.d.arcs[a].b.node))
        return _Tree(self.d, self.arcs, aid)


def _trees(d: ConfluentDiagram) -> list[_Tree]:
    v = classify_tree_like(d)
    if not v.ok:
        raise NotTreeLike(f"junction arcs contain a cycle: {v.witness}")
    arcs = v.witness
    comp: dict[str, str] = {}

    def find(x):
        while comp.setdefault(x, x) != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    for aid in arcs:
        arc = d.arcs[aid]
        js = [e.junction for e in (arc.a, arc.b) if not e.is_node]
        for j in js[1:]:
            comp[find(js[0])] = find(j)
        find(js[0])
    groups: dict[str, list[str]] = {}
    for aid in arcs:  # arcs are sorted, so the first arc of a group is its root
        arc = d.arcs[aid]
        j = arc.a.junction if not arc.a.is_node else arc.b.junction
        groups.setdefault(find(j), []).append(aid)
    trees = [_Tree(d, grp, grp[0]) for grp in groups.values()]
    for t in trees:
        for x, kids in t.children.items():
            if x[0] == "j" and len(kids) + 1 != 3:
                raise DiagramError(f"junction {x[1]} does not have three arcs")
    return trees


def compute_depths(d: ConfluentDiagram) -> DepthMap:
    """Depth of every junction: one more than its deepest child (nodes are 0)."""
    depth, down, roots = {}, {}, []
    for t in _trees(d):
        roots.append(t.root)
        for x, dep in t.depth.items():
            if x[0] == "j":
                depth[x[1]] = dep
                down[x[1]] = tuple(aid for _, aid in t.children[x])
    return DepthMap(depth, down, tuple(roots))


class _Circle:
    def __init__(self, order: list[str]):
        self.order = order
        self.pos = {v: i for i, v in enumerate(order)}

    def span(self, leaves: set[str], tree_leaves: set[str]) -> list[str]:
        """Shortest clockwise stretch holding ``leaves`` and no other tree leaf."""
        n = len(self.order)
        marks = sorted(self.pos[v] for v in tree_leaves)
        inside = [self.order[p] in leaves for p in marks]
        m = len(marks)
        starts = [i for i in range(m) if inside[i] and not inside[i - 1]]
        if len(leaves) == m:
            starts = [0]
        if len(starts) != 1:
            raise DiagramError("subtree leaves are not consecutive on the boundary")
        i = starts[0]
        first = marks[i]
        last = marks[(i + len(leaves) - 1) % m]
        out = [self.order[(first + k) % n] for k in range((last - first) % n + 1)]
        if set(out) & tree_leaves != leaves:
            raise DiagramError("subtree leaves are not consecutive on the boundary")
        return out

    def offset(self, start: str, leaves: set[str], tree_leaves: set[str]) -> int:
        return (self.pos[self.span(leaves, tree_leaves)[0]] - self.pos[start]) % len(self.order)

    def between(self, a: str, b: str) -> list[str]:
        n = len(self.order)
        i, j = self.pos[a], self.pos[b]
        return [self.order[(i + k) % n] for k in range(1, (j - i) % n)]


def _region_groups(g: Graph, seg: list[str]) -> dict[str, tuple]:
    """Groups A-D of a boundary stretch; group D must share one outside neighbourhood."""
    inside = set(seg)
    out = {"A": (seg[0],), "B": tuple(seg[-1:]) if len(seg) > 1 else (), "C": (), "D": ()}
    c, dgrp = [], []
    for v in seg[1:-1]:
        (dgrp if g.neighbors(v) - inside else c).append(v)
    if len({frozenset(g.neighbors(v) - inside) for v in dgrp}) > 1:
        raise ExpressionError(f"group D of stretch {seg[0]}..{seg[-1]} has differing outside neighbours")
    out["C"], out["D"] = tuple(c), tuple(dgrp)
    return out


def decompose_regions(d: ConfluentDiagram, depths: DepthMap | None = None) -> list[Region]:
    """One region per (junction, down-arc), plus the two sides of each root arc."""
    if d.outer_order is None:
        raise DiagramError("regions need an outer order")
    g = derive_graph(d)
    circle = _Circle(list(d.outer_order.order))
    out = []
    for t in _trees(d):
        tl = t.all_leaves()
        for x in sorted((x for x in t.children if x[0] == "j"), key=lambda x: (t.depth[x], x[1])):
            for y, aid in t.children[x]:
                seg = circle.span(t.leaves[y], tl)
                out.append(Region(x[1], aid, tuple(seg), _region_groups(g, seg)))
        for y in t.tops:
            seg = circle.span(t.leaves[y], tl)
            out.append(Region(None, t.root, tuple(seg), _region_groups(g, seg)))
    return out


# --- the 16-label construction ------------------------------------------------------

@dataclass
class _Piece:
    expr: KExpression
    groups: list          # groups[i] ends on label i + 1
    seg: list


@dataclass
class BuildLog:
    merges: list          # (stretch, inserted label pairs)

    def to_json(self) -> dict:
        return {"merges": [{"stretch": list(s), "joins": [list(p) for p in j]} for s, j in self.merges]}


class _Builder:
    def __init__(self, d: ConfluentDiagram):
        self.d = d
        self.g = derive_graph(d)
        self.log = BuildLog([])
        self.trees: list[_Tree] = []

    # -- small pieces --------------------------------------------------------

    def small_expression(self, verts: list[str]) -> KExpression:
        """At most REGION_WIDTH labels for the induced subgraph on ``verts``."""
        sub = induced_subgraph(self.g, verts)
        best = min((_linear_expression(sub, seq) for seq in (verts, verts[::-1])), key=width)
        if width(best) > REGION_WIDTH:
            exact = min_width_expression(sub, REGION_WIDTH) if len(verts) <= EXACT_CAP else None
            if exact is None:
                raise ExpressionError(f"stretch {verts[0]}..{verts[-1]} needs more than {REGION_WIDTH} labels")
            best = exact
        return best

    def gap_piece(self, seq: list[str], left: str, right: str) -> _Piece:
        """A stretch without tree leaves between the border nodes left and right.

        Usual case: outside neighbours lie in {left, right}; the stretch is
        labelled V1 (sees left), V2 (sees right), s (sees both), rest.
        """
        inside = set(seq)
        outs = {v: self.g.neighbors(v) - inside for v in seq}
        e = self.small_expression(seq)
        if left != right and all(o <= {left, right} for o in outs.values()):
            v1 = {v for v, o in outs.items() if o == {left}}
            v2 = {v for v, o in outs.items() if o == {right}}
            s = {v for v, o in outs.items() if o == {left, right}}
            if len(s) <= 1:
                grps = [v1, v2, s, inside - v1 - v2 - s]
                return _Piece(expand_groups(e, grps, MAX_LABELS), grps, seq)
        grps = _classes(self.g, seq)
        return _Piece(expand_groups(e, grps, MAX_LABELS), grps, seq)

    # -- merging ---------------------------------------------------------------

    def merge(self, parts: list[_Piece], seg: list[str], regions: bool = True) -> _Piece:
        """Union the parts (label blocks in list order), join adjacent groups
        across parts, then relabel onto the groups of the merged stretch:
        A-D for regions, outside-neighbourhood classes otherwise."""
        exprs, labelled, off = [], [], 0
        for p in parts:
            shift = {i + 1: off + i + 1 for i in range(len(p.groups))}
            exprs.append(apply_map(p.expr, shift, MAX_LABELS))
            labelled.append([(off + i + 1, grp) for i, grp in enumerate(p.groups) if grp])
            off += len(p.groups)
        if off > MAX_LABELS:
            raise ExpressionError(f"merge needs {off} labels")
        e = union(*exprs)
        joins = []
        for a, b in itertools.combinations(range(len(parts)), 2):
            for la, ga in labelled[a]:
                for lb, gb in labelled[b]:
                    hits = sum(1 for u in ga for v in gb if self.g.has_edge(u, v))
                    if hits == 0:
                        continue
                    if hits != len(ga) * len(gb):
                        raise ExpressionError("groups are not joined uniformly")
                    e = insert_edges(la, lb, e)
                    joins.append((la, lb))
        if regions:
            new = _region_groups(self.g, seg)
            new_groups = [set(new[k]) for k in "ABCD"]
        else:
            new_groups = _classes(self.g, seg)
        f = {}
        for lab, grp in (x for block in labelled for x in block):
            hit = [i for i, ng in enumerate(new_groups) if grp <= ng]
            if not hit:
                raise ExpressionError("a group splits across the merged stretch")
            f[lab] = hit[0] + 1
        e = apply_map(e, f, MAX_LABELS)
        self.log.merges.append((tuple(seg), joins))
        return _Piece(e, new_groups, seg)

    # -- trees -----------------------------------------------------------------

    def tree_piece(self, t: _Tree, x: tuple, circle: _Circle) -> _Piece:
        """Piece for the region below tree vertex x, built leaves to root by depth."""
        tl = t.all_leaves()
        pieces: dict[tuple, _Piece] = {}
        for y in sorted(t.below(x), key=lambda y: (t.depth[y], y[1:])):
            seg = circle.span(t.leaves[y], tl)
            if y[0] == "n":
                pieces[y] = _Piece(initial(y[1], 1), [{y[1]}, set(), set(), set()], seg)
                continue
            kids = sorted((c for c, _ in t.children[y]), key=lambda c: circle.offset(seg[0], t.leaves[c], tl))
            left, right = pieces.pop(kids[0]), pieces.pop(kids[1])
            parts = [left, right]
            gap = circle.between(left.seg[-1], right.seg[0])
            if gap:
                parts.append(self.stretch_piece(gap, left.seg[-1], right.seg[0], t))
            pieces[y] = self.merge(parts, seg)
        return pieces[x]

    def close_tree(self, t: _Tree, circle: _Circle) -> _Piece:
        """Merge both sides of the root arc with the stretch between them, then
        fold in the stretch on the far side."""
        sides = [self.tree_piece(t, y, circle) for y in t.tops]
        sides.sort(key=lambda s: circle.pos[s.seg[0]])
        r1, r2 = sides
        parts = [r1, r2]
        gap = circle.between(r1.seg[-1], r2.seg[0])
        if gap:
            parts.append(self.stretch_piece(gap, r1.seg[-1], r2.seg[0], t))
        body = r1.seg + gap + r2.seg
        merged = self.merge(parts, body)
        rest = circle.between(r2.seg[-1], r1.seg[0])
        if not rest:
            return merged
        tail = self.stretch_piece(rest, r2.seg[-1], r1.seg[0], t)
        return self.merge([merged, tail], body + rest, regions=False)

    def stretch_piece(self, seq: list[str], left: str, right: str, owner: _Tree) -> _Piece:
        """Stretch between two border nodes; nested junction trees are built
        as their own pieces and merged in along the stretch."""
        inside = set(seq)
        inner = [t for t in self.trees if t is not owner and t.all_leaves() <= inside]
        if not inner:
            return self.gap_piece(seq, left, right)
        pos = {v: i for i, v in enumerate(seq)}
        t = min(inner, key=lambda t: min(pos[v] for v in t.all_leaves()))
        lo = min(pos[v] for v in t.all_leaves())
        hi = max(pos[v] for v in t.all_leaves())
        sub = t.rerooted_at(seq[lo])
        span = self.close_tree(sub, _Circle(seq[lo:hi + 1]))
        parts, seg = [], []
        if lo:
            parts.append(self.stretch_piece(seq[:lo], left, seq[lo], owner))
            seg += seq[:lo]
        parts.append(span)
        seg += span.seg
        if hi + 1 < len(seq):
            parts.append(self.stretch_piece(seq[hi + 1:], seq[hi], right, owner))
            seg += seq[hi + 1:]
        return span if len(parts) == 1 else self.merge(parts, seg, regions=False)

    def build(self) -> KExpression:
        d = self.d
        if d.outer_order is None:
            raise DiagramError("the construction needs an outer order")
        order = list(d.outer_order.order)
        if not order:
            raise DiagramError("empty diagram")
        self.trees = _trees(d)
        if not self.trees:
            return self.gap_piece(order, order[0], order[0]).expr
        # trees do not cross, so every other tree sits in a stretch of the first
        return self.close_tree(self.trees[0], _Circle(order)).expr


def _classes(g: Graph, seg: list[str]) -> list[set]:
    inside = set(seg)
    classes: dict[frozenset, set] = {}
    for v in seg:
        classes.setdefault(frozenset(g.neighbors(v) - inside), set()).add(v)
    return list(classes.values())


def build_16_expression(d: ConfluentDiagram, log: BuildLog | None = None) -> KExpression:
    """A k-expression with at most 16 labels for a strict tree-like outer diagram."""
    b = _Builder(d)
    e = b.build()
    if log is not None:
        log.merges.extend(b.log.merges)
    if width(e) > MAX_LABELS:
        raise ExpressionError(f"expression uses {width(e)} labels")
    return e


def _linear_expression(g: Graph, seq: list[str]) -> KExpression:
    """Add vertices in order; labels are neighbourhood classes towards the rest."""
    e = None
    placed: list[str] = []
    cls: list[set] = []
    for idx, v in enumerate(seq):
        lab = len(cls) + 1
        piece = initial(v, lab)
        e = piece if e is None else union(e, piece)
        for i, grp in enumerate(cls):
            if g.has_edge(v, next(iter(grp))):
                e = insert_edges(i + 1, lab, e)
        placed.append(v)
        rest = set(seq[idx + 1:])
        by_nbhd: dict[frozenset, set] = {}
        for u in placed:
            by_nbhd.setdefault(frozenset(g.neighbors(u) & rest), set()).add(u)
        new = sorted(by_nbhd.values(), key=lambda grp: min(seq.index(u) for u in grp))
        f = {}
        for i, grp in enumerate(cls + [{v}]):
            f[i + 1] = next(n for n, ng in enumerate(new) if grp <= ng) + 1
        e = apply_map(e, f, MAX_LABELS)
        cls = [set(x) for x in new]
    return e
