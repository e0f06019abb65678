"""Brute-force helpers shared by the tests."""

import itertools

from confluent.graph import Graph, is_isomorphic


def _invariant(g: Graph):
    degs = sorted(g.degree(v) for v in g.vertices)
    nbr = sorted(tuple(sorted(g.degree(w) for w in g.neighbors(v))) for v in g.vertices)
    return (len(g.edges), tuple(degs), tuple(nbr))


def connected_bipartite_graphs(n: int) -> list[Graph]:
    """Every connected bipartite graph on n vertices, one per isomorphism class."""
    if n == 1:
        return [Graph(["x1"])]
    classes: dict = {}
    for a in range(1, n // 2 + 1):
        xs = [f"x{i}" for i in range(1, a + 1)]
        ys = [f"y{i}" for i in range(1, n - a + 1)]
        pairs = list(itertools.product(xs, ys))
        for mask in range(1, 1 << len(pairs)):
            es = [p for k, p in enumerate(pairs) if mask >> k & 1]
            if len(es) < n - 1:
                continue
            g = Graph(xs + ys, es)
            if not g.is_connected():
                continue
            bucket = classes.setdefault(_invariant(g), [])
            if not any(is_isomorphic(g, h) for h in bucket):
                bucket.append(g)
    return [g for bucket in classes.values() for g in bucket]


def interval_graph(intervals: dict) -> Graph:
    """Closed-interval overlap graph."""
    vs = sorted(intervals)
    es = [(a, b) for a, b in itertools.combinations(vs, 2)
          if max(intervals[a][0], intervals[b][0]) <= min(intervals[a][1], intervals[b][1])]
    return Graph(vs, es)
