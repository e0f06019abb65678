import itertools
import json
import math
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from confluent import fixtures as F
from confluent.diagram import (
    ConfluentDiagram, DegeneratePolyline, DiagramError, J, N, check_strict, classify_tree_like,
    derive_graph, detect_c6_witness, enumerate_smooth_paths, is_reduced, partition_edges,
    path_junctions, reduce, validate_embedding,
)
from confluent.graph import complete, induced_subgraph, is_isomorphic

# port pairs written out independently of the library tables
SMOOTH_PAIRS = {
    "binary": {frozenset({"trunk", "branch_left"}), frozenset({"trunk", "branch_right"})},
    "delta": {frozenset({"p1", "p2"}), frozenset({"p1", "p3"}), frozenset({"p2", "p3"})},
}


def naive_walks(d: ConfluentDiagram) -> Counter:
    """Count node-to-node smooth walks of at most 2|arcs| steps, repeats allowed."""
    bound = 2 * len(d.arcs)
    ends = {}
    for a in d.arcs.values():
        ends[a.id] = (a.a, a.b)
    at_port = {}
    for aid, (ea, eb) in ends.items():
        for k, e in enumerate((ea, eb)):
            if not e.is_node:
                at_port[(e.junction, e.port)] = (aid, k)
    out = Counter()
    for u in d.nodes:
        frontier = []
        for aid, (ea, eb) in ends.items():
            if ea.is_node and ea.node == u:
                frontier.append((aid, 1))
            if eb.is_node and eb.node == u:
                frontier.append((aid, 0))
        for _ in range(bound):
            nxt = []
            for aid, k in frontier:
                e = ends[aid][k]
                if e.is_node:
                    out[(u, e.node)] += 1
                    continue
                kind = d.junctions[e.junction].kind
                for pair in SMOOTH_PAIRS[kind]:
                    if e.port in pair:
                        (q,) = pair - {e.port}
                        hit = at_port.get((e.junction, q))
                        if hit:
                            nxt.append((hit[0], 1 - hit[1]))
            frontier = nxt
    return out


def all_fixtures():
    return {**F.strict_outer_fixtures(), **F.non_strict_fixtures(), **F.tree_like_fixtures()}


def test_k5_fixture_derives_k5():
    d = F.k5_soc()
    g = derive_graph(d)
    assert g == complete(5).relabel(dict(zip("12345", "uvwxy")))
    assert len(g.edges) == 10
    assert check_strict(d).ok and validate_embedding(d).ok


def test_delta_fixture_derives_k5_minus_edge():
    d = F.delta_k5e()
    g = derive_graph(d)
    assert len(g.edges) == 9 and not g.has_edge("u", "v")
    assert check_strict(d).ok and validate_embedding(d).ok


def test_smooth_path_examples():
    d = F.k2()
    (p,) = enumerate_smooth_paths(d, "a", "b")
    assert len(p) == 1
    (p,) = enumerate_smooth_paths(F.k5_soc(), "u", "y")
    assert path_junctions(F.k5_soc(), p)[:3] == ["i", "j", "k"]
    assert len(enumerate_smooth_paths(F.lollipop_cycle(), "u", "v")) == 2
    with pytest.raises(DiagramError):
        enumerate_smooth_paths(d, "a", "zz")


def test_isolated_nodes_give_edgeless_graph():
    g = derive_graph(F.isolated(2))
    assert len(g) == 2 and not g.edges


def test_check_strict_examples():
    assert check_strict(F.k5_soc()).ok
    assert check_strict(F.k2()).ok
    v = check_strict(F.lollipop_cycle())
    assert not v.ok and v.kind == "duplicate_paths"
    p, q = v.witness
    assert p.endpoints == q.endpoints and p.steps != q.steps


def test_strictness_agrees_with_naive_walk_count():
    for name, d in all_fixtures().items():
        counts = naive_walks(d)
        if check_strict(d).ok:
            for u, v in itertools.combinations(sorted(d.nodes), 2):
                n = len(enumerate_smooth_paths(d, u, v))
                assert n in (0, 1), name
                assert counts[(u, v)] == n, name
            assert all(counts[(u, u)] == 0 for u in d.nodes), name
        else:
            assert any(c >= 2 for c in counts.values()) or any(counts[(u, u)] for u in d.nodes), name


def test_paths_visit_each_junction_at_most_twice():
    for d in all_fixtures().values():
        for u, v in itertools.product(sorted(d.nodes), repeat=2):
            for p in enumerate_smooth_paths(d, u, v):
                c = Counter(path_junctions(d, p))
                assert all(k <= 2 for k in c.values())


def test_reduce_preserves_graph_on_fixtures():
    for name, d in all_fixtures().items():
        r = reduce(d)
        assert derive_graph(r).edges == derive_graph(d).edges, name
        assert is_reduced(r).ok, name


def _k2_with_parallel_route():
    pts = {"a": (-1.0, 0.0), "b": (1.0, 0.0)}
    junctions = [("s", "binary", -0.5, 0.0), ("m", "binary", 0.5, 0.0)]
    arcs = [
        ("a1", N("a"), N("b"), [(-1, 0), (0, -0.8), (1, 0)]),
        ("a2", N("a"), J("s", "trunk"), [(-1, 0), (-0.5, 0)]),
        ("a3", J("s", "branch_left"), J("m", "branch_left"), [(-0.5, 0), (0, 0.3), (0.5, 0)]),
        ("a4", J("s", "branch_right"), J("m", "branch_right"), [(-0.5, 0), (0, -0.3), (0.5, 0)]),
        ("a5", J("m", "trunk"), N("b"), [(0.5, 0), (1, 0)]),
    ]
    return ConfluentDiagram([(k, *p) for k, p in pts.items()], junctions, arcs)


def test_reduce_examples():
    k2 = F.k2()
    assert sorted(reduce(k2).arcs) == sorted(k2.arcs)
    d = _k2_with_parallel_route()
    r = reduce(d)
    assert derive_graph(r).sorted_edges() == [("a", "b")]
    assert len(r.arcs) == 1
    dangling = ConfluentDiagram(
        [("a", -1, 0), ("b", 1, 0)], [("j", "binary", 0, 0.5)],
        [("a1", N("a"), N("b"), [(-1, 0), (1, 0)]),
         ("a2", N("a"), J("j", "trunk"), [(-1, 0), (0, 0.5)])], partial=True)
    r = reduce(dangling)
    assert sorted(r.arcs) == ["a1"]


def test_validate_embedding_examples():
    assert validate_embedding(F.k5_soc()).ok
    crossing = F.outer_cycle(4).copy()
    pts = crossing.nodes
    bad = ConfluentDiagram(
        [(k, *p) for k, p in pts.items()], [],
        [("x", N("v1"), N("v3"), [pts["v1"], pts["v3"]]), ("y", N("v2"), N("v4"), [pts["v2"], pts["v4"]])],
        outer_order=["v1", "v2", "v3", "v4"])
    v = validate_embedding(bad)
    assert not v.ok and v.kind == "crossing" and v.witness == ("x", "y")
    d = F.k5_soc()
    rotated = d.copy(outer_order=["w", "x", "y", "u", "v"])
    assert validate_embedding(rotated).ok
    wrong = d.copy(outer_order=["u", "w", "v", "x", "y"])
    assert not validate_embedding(wrong).ok
    with pytest.raises(DegeneratePolyline):
        validate_embedding(ConfluentDiagram([("a", 0, 0), ("b", 1, 0)], [],
                                            [("e", N("a"), N("b"), [(0, 0), (0, 0), (1, 0)])]))


@settings(max_examples=20, deadline=None, derandomize=True)
@given(st.floats(0, 2 * math.pi), st.floats(0.1, 50.0))
def test_embedding_invariant_under_rotation_and_scaling(theta, s):
    c, sn = math.cos(theta), math.sin(theta)
    for d in (F.k5_soc(), F.delta_k5e(), F.c4_merge_split()):
        t = d.transformed(lambda p: (s * (c * p[0] - sn * p[1]), s * (sn * p[0] + c * p[1])))
        assert validate_embedding(t).ok


def test_partition_edges_examples():
    p = partition_edges(F.k2())
    assert p.simple_edges == {("a", "b")} and not p.confluent_edges
    p = partition_edges(F.delta_k5e())
    assert not p.simple_edges and len(p.confluent_edges) == 9
    p = partition_edges(F.delta_tree_chords())
    assert ("a", "p") in p.simple_edges and ("a", "c") in p.confluent_edges
    assert p.simple_edges | p.confluent_edges == derive_graph(F.delta_tree_chords()).edges


def test_classify_tree_like_examples():
    assert classify_tree_like(F.delta_k5e()).ok
    assert classify_tree_like(F.outer_cycle(5)).ok
    v = classify_tree_like(F.lollipop_cycle())
    assert not v.ok and v.kind == "not_tree_like"
    assert {"a4", "a5", "a6", "a7", "a8"} <= set(v.witness)


def _has_c6_with_chord(g):
    vs = list(g.vertices)
    for perm in itertools.permutations(vs[1:]):
        cyc = [vs[0], *perm]
        if all(g.has_edge(cyc[i], cyc[(i + 1) % 6]) for i in range(6)):
            return len(g.edges) >= 7
    return False


def test_detect_c6_witness_examples():
    d = reduce(F.domino_order())
    assert sorted(detect_c6_witness(d)) == sorted(F.domino_order().nodes)
    lol = reduce(F.lollipop_cycle())
    w = detect_c6_witness(lol)
    assert _has_c6_with_chord(induced_subgraph(derive_graph(lol), w))
    with pytest.raises(DiagramError):
        detect_c6_witness(F.k5_soc())


def test_diagram_json_round_trip():
    for d in all_fixtures().values():
        doc = d.to_json()
        back = ConfluentDiagram.from_json(json.loads(json.dumps(doc)))
        assert back.to_json() == doc
        assert derive_graph(back) == derive_graph(d)


def test_domino_order_graph_is_domino():
    from confluent.graph import domino
    assert is_isomorphic(derive_graph(F.domino_order()), domino())
