import math

import pytest
from hypothesis import given, settings, strategies as st

from confluent import fixtures as F
from confluent import geometry as geo
from confluent.diagram import ConfluentDiagram, DiagramError, N, NotStrict, derive_graph
from confluent.strings import (
    Trace, TraceSet, build_traces, certify_outer_string, check_merge_independence, crossing_count,
    crossing_multiplicities, intersection_graph, junction_tree,
)


def interior_star() -> ConfluentDiagram:
    """K1,3 with the centre inside the disk: strict but not outer."""
    pts = {"c": (0.0, 0.0), "a": (1.0, 0.0), "b": (-0.5, 0.8), "e": (-0.5, -0.8)}
    arcs = [(f"e{k}", N("c"), N(v), [pts["c"], pts[v]]) for k, v in enumerate("abe")]
    return ConfluentDiagram([(k, *p) for k, p in pts.items()], [], arcs)


def brute_pairs(t: TraceSet) -> set[tuple[str, str]]:
    """Pairwise polyline intersection with the plain segment predicate."""
    out = set()
    names = sorted(t.traces)
    for i, u in enumerate(names):
        pu = t.traces[u].polyline
        for v in names[i + 1:]:
            pv = t.traces[v].polyline
            if any(geo.segments_intersect(pu[a], pu[a + 1], pv[b], pv[b + 1])
                   for a in range(len(pu) - 1) for b in range(len(pv) - 1)):
                out.add((u, v))
    return out


def test_junction_tree_examples():
    t = junction_tree(F.k2(), "a")
    assert t.leaves() == ["b"] and t.path_to("b") == []
    t = junction_tree(F.k5_soc(), "u")
    assert sorted(t.leaves()) == ["v", "w", "x", "y"]
    assert t.path_to("y")[:3] == ["i", "j", "k"]
    t = junction_tree(F.isolated(2), "v1")
    assert t.leaves() == [] and t.to_json() == {"root": "v1", "tree": {"label": "v1", "kind": "root"}}
    with pytest.raises(NotStrict):
        junction_tree(F.lollipop_cycle(), "u")


def test_junction_tree_shape_on_strict_fixtures():
    for name, d in F.strict_outer_fixtures().items():
        g = derive_graph(d)
        for u in d.nodes:
            t = junction_tree(d, u)
            assert sorted(t.leaves()) == sorted(g.neighbors(u)), name
            for v in t.vertices():
                if v.kind == "junction":
                    assert len(v.children) in (1, 2), name


def test_merge_independence():
    assert check_merge_independence(F.k5_soc()).ok
    assert check_merge_independence(F.k2()).ok
    v = check_merge_independence(F.lollipop_cycle())
    assert not v.ok and v.kind == "merge_dependence"


@pytest.mark.parametrize("name", sorted(F.strict_outer_fixtures()))
def test_traces_realize_the_derived_graph(name):
    d = F.strict_outer_fixtures()[name]
    t = build_traces(d)
    assert intersection_graph(t) == derive_graph(d)
    assert certify_outer_string(d, t).ok


def test_k2_traces_cross_at_the_u_turn():
    t = build_traces(F.k2())
    assert intersection_graph(t).sorted_edges() == [("a", "b")]
    kinds = [e["type"] for e in t.traces["a"].events]
    assert "u_turn" in kinds


def test_edgeless_diagrams_give_disjoint_traces():
    for n in (2, 3):
        t = build_traces(F.isolated(n))
        assert len(t.traces) == n
        assert not intersection_graph(t).edges


def test_delta_fixture_traces_give_k5_minus_edge():
    g = intersection_graph(build_traces(F.delta_k5e()))
    assert len(g.edges) == 9 and not g.has_edge("u", "v")


def test_intersection_graph_matches_plain_segment_test():
    for name in ("k5_soc", "delta_k5e", "region_sketch"):
        t = build_traces(F.strict_outer_fixtures()[name])
        assert set(intersection_graph(t).edges) == brute_pairs(t)


def test_adjacent_traces_meet_only_for_edges():
    d = F.k5_soc()
    t = build_traces(d)
    mult = crossing_multiplicities(t)
    assert set(mult) == set(derive_graph(d).edges)
    assert all(m >= 1 for m in mult.values())


def test_traces_start_at_their_nodes():
    d = F.region_sketch()
    t = build_traces(d)
    for u, tr in t.traces.items():
        assert tr.polyline[0] == pytest.approx(d.nodes[u])


def test_traces_stay_close_to_the_diagram():
    d = F.delta_tree_chords()
    t = build_traces(d)
    reach = 2 * t.params["clearance"]
    segs = [(a.polyline[i], a.polyline[i + 1]) for a in d.arcs.values() for i in range(len(a.polyline) - 1)]
    for tr in t.traces.values():
        for p in tr.polyline:
            assert min(geo.point_segment_distance(p, a, b) for a, b in segs) <= reach


def test_non_outer_diagram():
    d = interior_star()
    t = build_traces(d)
    assert intersection_graph(t) == derive_graph(d)
    with pytest.raises(DiagramError):
        certify_outer_string(d, t)


def test_build_traces_rejects_non_strict():
    with pytest.raises(DiagramError):
        build_traces(F.lollipop_cycle())


def test_perturbed_trace_leaves_the_disk():
    d = F.k5_soc()
    t = build_traces(d)
    tr = t.traces["u"]
    bad = Trace(tr.node, tr.events, tr.polyline[:2] + [(2.0, 2.0)] + tr.polyline[2:])
    broken = TraceSet({**t.traces, "u": bad}, t.params)
    v = certify_outer_string(d, broken)
    assert not v.ok and v.kind == "leaves_disk"
    moved = Trace(tr.node, tr.events, [(0.0, 0.0)] + tr.polyline[1:])
    v = certify_outer_string(d, TraceSet({**t.traces, "u": moved}, t.params))
    assert not v.ok and v.kind == "start_off_boundary"


def test_build_traces_is_deterministic():
    a = build_traces(F.region_sketch()).to_json()
    b = build_traces(F.region_sketch()).to_json()
    assert a == b


def test_trace_json_round_trip():
    t = build_traces(F.delta_k4())
    back = TraceSet.from_json(t.to_json())
    assert back.to_json() == t.to_json()
    assert intersection_graph(back) == intersection_graph(t)


def test_crossing_count_simple_cases():
    assert crossing_count([(0, 0), (1, 1)], [(0, 1), (1, 0)]) == 1
    assert crossing_count([(0, 0), (1, 0)], [(0, 1), (1, 1)]) == 0
    zig = [(0, 0), (1, 1), (2, 0), (3, 1)]
    assert crossing_count(zig, [(0, 0.5), (3, 0.5)]) == 3


@settings(max_examples=25, deadline=None, derandomize=True)
@given(st.integers(3, 8), st.integers(0, 10_000), st.integers(0, 3))
def test_random_tree_like_diagrams(leaves, seed, extra):
    d = F.random_tree_like(leaves, seed, extra_nodes=extra)
    t = build_traces(d)
    assert intersection_graph(t) == derive_graph(d)
    assert certify_outer_string(d, t).ok


@settings(max_examples=15, deadline=None, derandomize=True)
@given(st.floats(0, 2 * math.pi), st.floats(0.2, 20.0))
def test_traces_survive_similarity_maps(theta, s):
    c, sn = math.cos(theta), math.sin(theta)
    d = F.delta_k5e().transformed(lambda p: (s * (c * p[0] - sn * p[1]), s * (sn * p[0] + c * p[1])))
    t = build_traces(d)
    assert intersection_graph(t) == derive_graph(d)
    assert certify_outer_string(d, t).ok
