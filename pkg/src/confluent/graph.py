"""Simple undirected graphs plus the small exhaustive oracles used everywhere
else (isomorphism, induced patterns, bipartite-permutation recognition)."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

ISO_CAP = 16
SIDE_CAP = 9


class GraphError(ValueError):
    pass


class SizeCapExceeded(GraphError):
    pass


def _pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple graph with opaque string vertex ids.

    ``vertices`` keeps the declared order; ``edges`` holds sorted pairs.
    """

    vertices: tuple[str, ...]
    edges: frozenset[tuple[str, str]] = frozenset()
    _adj: dict = field(default=None, compare=False, repr=False, hash=False)

    def __init__(self, vertices: Iterable, edges: Iterable = ()):
        vs = tuple(str(v) for v in vertices)
        if len(set(vs)) != len(vs):
            raise GraphError("duplicate vertex id")
        vset = set(vs)
        es = set()
        for e in edges:
            a, b = (str(x) for x in e)
            if a == b:
                raise GraphError(f"self-loop at {a!r}")
            if a not in vset or b not in vset:
                raise GraphError(f"edge {a!r}-{b!r} uses an undeclared vertex")
            es.add(_pair(a, b))
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "edges", frozenset(es))
        adj = {v: set() for v in vs}
        for a, b in es:
            adj[a].add(b)
            adj[b].add(a)
        object.__setattr__(self, "_adj", {v: frozenset(n) for v, n in adj.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return set(self.vertices) == set(other.vertices) and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((frozenset(self.vertices), self.edges))

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v) -> bool:
        return v in self._adj

    def neighbors(self, v: str) -> frozenset[str]:
        return self._adj[v]

    def degree(self, v: str) -> int:
        return len(self._adj[v])

    def has_edge(self, a: str, b: str) -> bool:
        return b in self._adj.get(a, ())

    def sorted_edges(self) -> list[tuple[str, str]]:
        return sorted(self.edges)

    def same_as(self, other: "Graph") -> bool:
        """Exact equality of vertex set and edge set (order ignored)."""
        return set(self.vertices) == set(other.vertices) and self.edges == other.edges

    def components(self) -> list[list[str]]:
        seen: set[str] = set()
        out = []
        for s in self.vertices:
            if s in seen:
                continue
            comp, stack = [], [s]
            seen.add(s)
            while stack:
                v = stack.pop()
                comp.append(v)
                for w in self._adj[v]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            out.append(sorted(comp))
        return out

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def complement(self) -> "Graph":
        return Graph(self.vertices, [(a, b) for a, b in itertools.combinations(self.vertices, 2)
                                     if not self.has_edge(a, b)])

    def relabel(self, mapping: dict) -> "Graph":
        return Graph([mapping[v] for v in self.vertices],
                     [(mapping[a], mapping[b]) for a, b in self.edges])

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [list(e) for e in self.sorted_edges()]}

    @classmethod
    def from_json(cls, doc: dict) -> "Graph":
        try:
            return cls(doc["vertices"], doc["edges"])
        except (KeyError, TypeError) as exc:
            raise GraphError(f"malformed graph document: {exc}") from exc

    @classmethod
    def load(cls, path) -> "Graph":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def __repr__(self) -> str:
        return f"Graph(n={len(self.vertices)}, m={len(self.edges)})"


@dataclass(frozen=True)
class CyclicOrder:
    """A circular sequence; rotations compare equal, reflections do not."""

    order: tuple[str, ...]

    def __init__(self, order: Iterable):
        object.__setattr__(self, "order", tuple(str(v) for v in order))
        if len(set(self.order)) != len(self.order):
            raise GraphError("cyclic order repeats an id")

    def canonical(self) -> tuple[str, ...]:
        if not self.order:
            return ()
        i = self.order.index(min(self.order))
        return self.order[i:] + self.order[:i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, CyclicOrder):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self) -> int:
        return hash(self.canonical())

    def __len__(self) -> int:
        return len(self.order)

    def __iter__(self) -> Iterator[str]:
        return iter(self.order)

    def index(self, v: str) -> int:
        return self.order.index(v)

    def between(self, u: str, v: str) -> list[str]:
        """Elements strictly after ``u`` and strictly before ``v`` going forward."""
        n = len(self.order)
        i, j = self.order.index(u), self.order.index(v)
        out = []
        k = (i + 1) % n
        while k != j:
            out.append(self.order[k])
            k = (k + 1) % n
        return out

    def is_permutation_of(self, vertices: Iterable[str]) -> bool:
        vs = list(vertices)
        return len(vs) == len(self.order) and set(vs) == set(self.order)


def induced_subgraph(g: Graph, vs: Iterable[str]) -> Graph:
    keep = set(vs)
    unknown = keep - set(g.vertices)
    if unknown:
        raise GraphError(f"unknown vertex ids: {sorted(unknown)}")
    order = [v for v in g.vertices if v in keep]
    return Graph(order, [e for e in g.edges if e[0] in keep and e[1] in keep])


def _iso_map(a: Graph, b: Graph) -> dict | None:
    if len(a) != len(b) or len(a.edges) != len(b.edges):
        return None
    if sorted(a.degree(v) for v in a.vertices) != sorted(b.degree(v) for v in b.vertices):
        return None
    # most constrained vertices first: high degree, then many already-placed neighbours
    order: list[str] = []
    rest = set(a.vertices)
    while rest:
        v = max(sorted(rest), key=lambda x: (len(a.neighbors(x) & set(order)), a.degree(x)))
        order.append(v)
        rest.remove(v)
    cands = {v: [w for w in b.vertices if b.degree(w) == a.degree(v)] for v in order}
    mapping: dict[str, str] = {}
    used: set[str] = set()

    def extend(k: int) -> bool:
        if k == len(order):
            return True
        v = order[k]
        for w in cands[v]:
            if w in used:
                continue
            if all(a.has_edge(v, x) == b.has_edge(w, mapping[x]) for x in order[:k]):
                mapping[v] = w
                used.add(w)
                if extend(k + 1):
                    return True
                del mapping[v]
                used.discard(w)
        return False

    return dict(mapping) if extend(0) else None


def is_isomorphic(a: Graph, b: Graph, cap: int = ISO_CAP) -> bool:
    """Exact isomorphism test by backtracking with degree pruning."""
    if max(len(a), len(b)) > cap:
        raise SizeCapExceeded(f"isomorphism test limited to {cap} vertices")
    return _iso_map(a, b) is not None


def isomorphism(a: Graph, b: Graph, cap: int = ISO_CAP) -> dict | None:
    if max(len(a), len(b)) > cap:
        raise SizeCapExceeded(f"isomorphism test limited to {cap} vertices")
    return _iso_map(a, b)


def find_induced(pattern: Graph, host: Graph, cap: int = ISO_CAP) -> list[str] | None:
    """Return a sorted vertex set of ``host`` inducing ``pattern``, or None."""
    k = len(pattern)
    if k > len(host):
        raise GraphError("pattern larger than host")
    if k > cap:
        raise SizeCapExceeded(f"pattern limited to {cap} vertices")
    m = len(pattern.edges)
    degs = sorted(pattern.degree(v) for v in pattern.vertices)
    for combo in itertools.combinations(sorted(host.vertices), k):
        sub = induced_subgraph(host, combo)
        if len(sub.edges) != m:
            continue
        if sorted(sub.degree(v) for v in sub.vertices) != degs:
            continue
        if _iso_map(pattern, sub) is not None:
            return list(combo)
    return None


def bipartition(g: Graph) -> list[tuple[list[str], list[str]]] | None:
    """Two-colour each component; None if some component has an odd cycle."""
    colour: dict[str, int] = {}
    parts = []
    for comp in g.components():
        s = comp[0]
        colour[s] = 0
        stack = [s]
        while stack:
            v = stack.pop()
            for w in g.neighbors(v):
                if w not in colour:
                    colour[w] = 1 - colour[v]
                    stack.append(w)
                elif colour[w] == colour[v]:
                    return None
        parts.append(([v for v in comp if colour[v] == 0], [v for v in comp if colour[v] == 1]))
    return parts


def is_strong_ordering(g: Graph, xs: Sequence[str], ys: Sequence[str]) -> bool:
    """Check the strong-ordering condition.

    For edges x_i y_l and x_k y_j with i < k and j < l, both x_i y_j and
    x_k y_l must be edges as well.
    """
    xi = {x: i for i, x in enumerate(xs)}
    yi = {y: i for i, y in enumerate(ys)}
    es = []
    for a, b in g.edges:
        if a in xi and b in yi:
            es.append((xi[a], yi[b]))
        elif b in xi and a in yi:
            es.append((xi[b], yi[a]))
        else:
            return False
    eset = set(es)
    for (i, l), (k, j) in itertools.permutations(es, 2):
        if i < k and j < l and ((i, j) not in eset or (k, l) not in eset):
            return False
    return True


def _sorted_partner_order(g: Graph, xs: Sequence[str], ys: Iterable[str]) -> list[str]:
    pos = {x: i for i, x in enumerate(xs)}

    def key(y):
        idx = [pos[x] for x in g.neighbors(y)]
        return (min(idx), max(idx), y) if idx else (len(xs), len(xs), y)

    return sorted(ys, key=key)


def is_bipartite_permutation(g: Graph, cap: int = SIDE_CAP) -> tuple[bool, tuple[list[str], list[str]] | None]:
    """Recognise bipartite permutation graphs by brute force.

    Every ordering of one colour class is tried; the other class is then
    forced up to twins (sorted by first and last neighbour position), so the
    search is complete.  Returns ``(True, (xs, ys))`` with a strong ordering.
    """
    parts = bipartition(g)
    if parts is None:
        return False, None
    # components may be flipped independently
    flips = itertools.product((False, True), repeat=max(len(parts) - 1, 0))
    for flip in flips:
        xs_all, ys_all = [], []
        for idx, (p, q) in enumerate(parts):
            if idx > 0 and flip[idx - 1]:
                p, q = q, p
            xs_all += p
            ys_all += q
        if len(xs_all) > len(ys_all):
            xs_all, ys_all = ys_all, xs_all
        if len(xs_all) > cap:
            raise SizeCapExceeded(f"side size {len(xs_all)} exceeds cap {cap}")
        for perm in itertools.permutations(sorted(xs_all)):
            ys = _sorted_partner_order(g, perm, ys_all)
            if is_strong_ordering(g, perm, ys):
                return True, (list(perm), ys)
    return False, None


def is_permutation_graph_bruteforce(g: Graph, cap: int = 9) -> bool:
    """Search for a permutation diagram.

    A graph is a permutation graph when some vertex order L1 admits a second
    order L2 such that edges are exactly the pairs the two orders disagree on.
    Given L1, the relation forced on L2 is a tournament, and it is a linear
    order iff it has no directed triangle.  For u < v < w in L1 that happens
    exactly when uw is an edge and uv, vw are not, or the reverse.  The search
    builds L1 by backtracking and rejects a prefix as soon as a triangle shows.
    """
    n = len(g)
    if n > cap:
        raise SizeCapExceeded(f"permutation-diagram search limited to {cap} vertices")
    vs = list(g.vertices)
    adj = [[g.has_edge(a, b) for b in vs] for a in vs]
    order: list[int] = []
    used = [False] * n

    def ok(w: int) -> bool:
        for i in range(len(order)):
            u = order[i]
            for j in range(i + 1, len(order)):
                v = order[j]
                if adj[u][w] != adj[u][v] and adj[u][w] != adj[v][w]:
                    return False
        return True

    def extend() -> bool:
        if len(order) == n:
            return True
        for w in range(n):
            if not used[w] and ok(w):
                used[w] = True
                order.append(w)
                if extend():
                    return True
                order.pop()
                used[w] = False
        return False

    return extend()


def is_bipartite_permutation_oracle(g: Graph) -> bool:
    return bipartition(g) is not None and is_permutation_graph_bruteforce(g)


# --- named graphs -----------------------------------------------------------

def _ids(n: int, prefix: str = "") -> list[str]:
    return [f"{prefix}{i}" for i in range(1, n + 1)]


def cycle(n: int) -> Graph:
    vs = _ids(n)
    return Graph(vs, [(vs[i], vs[(i + 1) % n]) for i in range(n)])


def path(n: int) -> Graph:
    vs = _ids(n)
    return Graph(vs, [(vs[i], vs[i + 1]) for i in range(n - 1)])


def complete(n: int) -> Graph:
    vs = _ids(n)
    return Graph(vs, itertools.combinations(vs, 2))


def complete_bipartite(m: int, n: int) -> Graph:
    xs, ys = _ids(m, "x"), _ids(n, "y")
    return Graph(xs + ys, itertools.product(xs, ys))


def empty(n: int) -> Graph:
    return Graph(_ids(n))


def domino() -> Graph:
    """Two 4-cycles glued along the edge 2-5."""
    return Graph(_ids(6), [("1", "2"), ("2", "3"), ("3", "4"), ("4", "5"), ("5", "6"),
                           ("6", "1"), ("2", "5")])


def wheel(rim: int) -> Graph:
    g = cycle(rim)
    return Graph(["h"] + list(g.vertices), list(g.edges) + [("h", v) for v in g.vertices])


def broken_wheel_3() -> Graph:
    """K4 drawn as a wheel with each rim edge subdivided once."""
    rim = ["a", "ab", "b", "bc", "c", "ca"]
    edges = [(rim[i], rim[(i + 1) % 6]) for i in range(6)] + [("h", "a"), ("h", "b"), ("h", "c")]
    return Graph(["h"] + rim, edges)


def domino_subdivided_chord() -> Graph:
    """Domino whose shared edge 2-5 is subdivided by vertex 7."""
    d = domino()
    edges = [e for e in d.edges if e != ("2", "5")] + [("2", "7"), ("5", "7")]
    return Graph(list(d.vertices) + ["7"], edges)


def subdivided_star_complement() -> Graph:
    """Complement of K_{1,3} with every edge subdivided."""
    vs = ["c", "m1", "m2", "m3", "l1", "l2", "l3"]
    star = Graph(vs, [("c", "m1"), ("c", "m2"), ("c", "m3"),
                      ("m1", "l1"), ("m2", "l2"), ("m3", "l3")])
    return star.complement()


def k33_minus_edge() -> Graph:
    g = complete_bipartite(3, 3)
    return Graph(g.vertices, [e for e in g.edges if e != ("x3", "y1")])
