import itertools

import pytest
from hypothesis import given, settings, strategies as st

from confluent.graph import (
    CyclicOrder, Graph, GraphError, SizeCapExceeded, complete, complete_bipartite, cycle,
    domino, empty, find_induced, induced_subgraph, is_bipartite_permutation,
    is_bipartite_permutation_oracle, is_isomorphic, is_strong_ordering, path,
)


def perm_iso(a: Graph, b: Graph) -> bool:
    """Plain permutation search, no pruning."""
    if len(a) != len(b) or len(a.edges) != len(b.edges):
        return False
    for p in itertools.permutations(b.vertices):
        m = dict(zip(a.vertices, p))
        if all(b.has_edge(m[x], m[y]) for x, y in a.edges):
            return True
    return False


@st.composite
def graphs(draw, max_n=6):
    n = draw(st.integers(0, max_n))
    vs = [f"v{i}" for i in range(n)]
    pairs = list(itertools.combinations(vs, 2))
    es = [p for p in pairs if draw(st.booleans())]
    return Graph(vs, es)


def test_graph_rejects_bad_input():
    with pytest.raises(GraphError):
        Graph(["a", "a"])
    with pytest.raises(GraphError):
        Graph(["a"], [("a", "a")])
    with pytest.raises(GraphError):
        Graph(["a"], [("a", "b")])


def test_graph_equality_ignores_vertex_order():
    assert Graph(["a", "b"], [("b", "a")]) == Graph(["b", "a"], [("a", "b")])
    assert Graph(["a", "b"], [("a", "b")]) != Graph(["a", "b"])


def test_json_round_trip():
    g = domino()
    assert Graph.from_json(g.to_json()) == g
    assert all(a < b for a, b in g.to_json()["edges"])


def test_cyclic_order_rotation_and_between():
    assert CyclicOrder(["1", "2", "3"]) == CyclicOrder(["3", "1", "2"])
    assert CyclicOrder(["1", "2", "3"]) != CyclicOrder(["1", "3", "2"])
    c = CyclicOrder(["1", "2", "3", "4", "5"])
    assert c.between("1", "3") == ["2"]
    assert c.between("3", "1") == ["4", "5"]


def test_induced_subgraph_examples():
    k33 = complete_bipartite(3, 3)
    assert induced_subgraph(k33, k33.vertices) == k33
    c6 = cycle(6)
    assert induced_subgraph(c6, ["1", "2", "3"]) == Graph(["1", "2", "3"], [("1", "2"), ("2", "3")])
    d = domino()
    assert is_isomorphic(induced_subgraph(d, ["1", "2", "5", "6"]), cycle(4))
    with pytest.raises(GraphError):
        induced_subgraph(c6, ["9"])


def test_isomorphism_examples():
    c4 = cycle(4)
    assert is_isomorphic(c4, c4.relabel({"1": "x", "2": "z", "3": "y", "4": "w"}))
    two_k3 = Graph(list("abcdef"), [("a", "b"), ("b", "c"), ("a", "c"), ("d", "e"), ("e", "f"), ("d", "f")])
    assert not is_isomorphic(cycle(6), two_k3)
    k5 = complete(5)
    a = Graph(k5.vertices, [e for e in k5.edges if e != ("1", "2")])
    b = Graph(k5.vertices, [e for e in k5.edges if e != ("3", "5")])
    assert is_isomorphic(a, b)


def test_isomorphism_size_cap():
    with pytest.raises(SizeCapExceeded):
        is_isomorphic(empty(5), empty(5), cap=4)


def test_find_induced_examples():
    assert sorted(find_induced(domino(), domino())) == sorted(domino().vertices)
    assert find_induced(domino(), cycle(6)) is None
    assert find_induced(domino(), complete_bipartite(3, 3)) is None


def test_bipartite_permutation_examples():
    ok, order = is_bipartite_permutation(cycle(4))
    assert ok and is_strong_ordering(cycle(4), *order)
    assert is_bipartite_permutation(cycle(6)) == (False, None)
    ok, order = is_bipartite_permutation(domino())
    assert ok and is_strong_ordering(domino(), *order)
    assert not is_bipartite_permutation(complete(3))[0]


@settings(max_examples=60, deadline=None, derandomize=True)
@given(graphs(), graphs())
def test_isomorphism_matches_permutation_search(a, b):
    assert is_isomorphic(a, b) == perm_iso(a, b)


@settings(max_examples=30, deadline=None, derandomize=True)
@given(graphs(5), graphs(5), graphs(5))
def test_isomorphism_is_an_equivalence(a, b, c):
    assert is_isomorphic(a, a)
    assert is_isomorphic(a, b) == is_isomorphic(b, a)
    if is_isomorphic(a, b) and is_isomorphic(b, c):
        assert is_isomorphic(a, c)


@settings(max_examples=40, deadline=None, derandomize=True)
@given(graphs(4), graphs(7))
def test_find_induced_witness_is_sound(p, h):
    w = find_induced(p, h) if len(p) <= len(h) else None
    if w is not None:
        assert is_isomorphic(induced_subgraph(h, w), p)
    elif len(p) <= len(h):
        assert not any(is_isomorphic(induced_subgraph(h, s), p)
                       for s in itertools.combinations(h.vertices, len(p)))


@settings(max_examples=80, deadline=None, derandomize=True)
@given(graphs(7))
def test_bipartite_permutation_agrees_with_segment_oracle(g):
    ok, order = is_bipartite_permutation(g)
    assert ok == is_bipartite_permutation_oracle(g)
    if ok:
        assert is_strong_ordering(g, *order)


def test_named_small_graphs():
    assert len(path(4).edges) == 3
    assert len(complete(4).edges) == 6
