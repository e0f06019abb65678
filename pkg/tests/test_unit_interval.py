from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from confluent.diagram import check_strict, derive_graph, validate_embedding
from confluent.graph import complete, is_isomorphic
from confluent.unit_interval import (
    IntervalLayout, LayoutError, build_from_raw, build_sc_diagram, bundles, decompose_cliques,
    normalize_intervals, random_layout,
)

from oracles import interval_graph


def test_normalize_symmetric_tie():
    lay = normalize_intervals({"a": (0, 1), "b": (0, 1)})
    assert lay.is_normalized()
    assert lay.graph().sorted_edges() == [("a", "b")]
    assert all(r - l == 1 for l, r in lay.intervals.values())


def test_normalize_leaves_distinct_layouts_alone():
    raw = {"v1": (0, 1), "v2": (0.5, 1.5), "v3": (2, 3)}
    lay = normalize_intervals(raw)
    assert lay.intervals["v2"] == (Fraction(1, 2), Fraction(3, 2))
    assert lay.intervals["v3"] == (2, 3)


def test_normalize_keeps_touching_intervals_adjacent():
    lay = normalize_intervals({"a": (0, 1), "b": (1, 2)})
    assert lay.is_normalized()
    assert lay.graph().has_edge("a", "b")


def test_normalize_rejects_unequal_lengths():
    with pytest.raises(LayoutError):
        normalize_intervals({"a": (0, 1), "b": (0, 2)})


def test_decompose_examples():
    dec = decompose_cliques(normalize_intervals({"v1": (0, 1), "v2": (0.5, 1.5), "v3": (2, 3)}))
    assert dec.leaders == ["v1", "v3"]
    assert dec.cliques == [["v1", "v2"], ["v3"]]
    dec = decompose_cliques(normalize_intervals({"v1": (0, 1), "v2": (0.1, 1.1), "v3": (0.2, 1.2)}))
    assert dec.leaders == ["v1"] and dec.cliques == [["v1", "v2", "v3"]]
    dec = decompose_cliques(normalize_intervals({"v": (3, 4)}))
    assert dec.leaders == ["v"] and dec.cliques == [["v"]]


def test_decompose_requires_normalized_layout():
    with pytest.raises(LayoutError):
        decompose_cliques(IntervalLayout(Fraction(1), {"a": (Fraction(0), Fraction(1)),
                                                       "b": (Fraction(0), Fraction(1))}))


def test_build_examples():
    _, d = build_from_raw({"v1": (0, 1), "v2": (5, 6)})
    assert not d.junctions and not derive_graph(d).edges
    _, d = build_from_raw({"v1": (0, 1), "v2": (0.1, 1.1), "v3": (0.2, 1.2)})
    assert is_isomorphic(derive_graph(d), complete(3))
    assert [j.kind for j in d.junctions.values()] == ["delta"]
    _, d = build_from_raw({"v1": (0, 1), "v2": (0.5, 1.5), "v3": (2, 3)})
    assert derive_graph(d).sorted_edges() == [("v1", "v2")]
    assert check_strict(d).ok


def test_small_cliques_use_no_delta_junctions():
    _, d = build_from_raw({"a": (0, 1), "b": (0.5, 1.5), "c": (3, 4)})
    assert not any(j.kind == "delta" for j in d.junctions.values())


def test_bundle_between_cliques():
    raw = {"a": (0, 1), "b": (0.4, 1.4), "c": (0.8, 1.8), "d": (1.2, 2.2), "e": (1.7, 2.7)}
    lay, d = build_from_raw(raw)
    dec = decompose_cliques(lay)
    assert dec.cliques == [["a", "b", "c"], ["d", "e"]]
    assert bundles(lay, dec, 0) == [(1, ["d"]), (2, ["e"])]
    assert derive_graph(d) == interval_graph(raw)


def test_build_rejects_raw_ties():
    lay = IntervalLayout(Fraction(1), {"a": (Fraction(0), Fraction(1)), "b": (Fraction(0), Fraction(1))})
    with pytest.raises(LayoutError):
        build_sc_diagram(lay)


def test_layout_json_round_trip():
    lay = normalize_intervals(random_layout(7, 3))
    back = IntervalLayout.from_json(lay.to_json())
    assert back == lay


@settings(max_examples=80, deadline=None, derandomize=True)
@given(st.lists(st.integers(0, 24), min_size=1, max_size=12), st.sampled_from([2, 3, 4]))
def test_random_layouts_build_strict_drawings(starts, grid):
    raw = {f"v{k}": (Fraction(a, grid), Fraction(a, grid) + 1) for k, a in enumerate(starts)}
    lay = normalize_intervals(raw)
    assert lay.graph() == interval_graph(raw)
    d = build_sc_diagram(lay)
    assert check_strict(d).ok
    assert validate_embedding(d).ok
    assert derive_graph(d) == interval_graph(raw)


@settings(max_examples=60, deadline=None, derandomize=True)
@given(st.lists(st.integers(0, 30), min_size=2, max_size=12))
def test_neighbourhoods_are_monotone(starts):
    raw = {f"v{k:02d}": (Fraction(a, 3), Fraction(a, 3) + 1) for k, a in enumerate(starts)}
    lay = normalize_intervals(raw)
    g = lay.graph()
    dec = decompose_cliques(lay)
    for cur, nxt in zip(dec.cliques, dec.cliques[1:]):
        for w in nxt:
            hits = [g.has_edge(v, w) for v in cur]
            first = hits.index(True) if True in hits else len(hits)
            assert all(hits[first:])
    for c in dec.cliques:
        assert len(dec.leaders) == len(dec.cliques)
        assert c[0] in dec.leaders
