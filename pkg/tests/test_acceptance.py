"""Acceptance criteria 1-8, each with its runtime limit.

Each test records one PASS/FAIL line; the lines are printed in the pytest
terminal summary (also when this file is run as a script).
"""

import functools
import itertools
import subprocess
import sys
import time
from contextlib import contextmanager
from pathlib import Path

import pytest

from confluent import fixtures as F
from confluent.bipartite import BuildError, build_bip_soc, scan_orders
from confluent.cliquewidth import build_16_expression, evaluate, min_width_expression, width
from confluent.diagram import check_strict, partition_edges, derive_graph, validate_embedding
from confluent.graph import (
    broken_wheel_3, complete, complete_bipartite, cycle, domino, domino_subdivided_chord, find_induced,
    is_bipartite_permutation, is_isomorphic, subdivided_star_complement, wheel,
)
from confluent.pursuit import play, robber_policy, solve_cop_number_at_most
from confluent.strings import build_traces, certify_outer_string, intersection_graph
from confluent.unit_interval import build_sc_diagram, normalize_intervals, random_layout

sys.path.insert(0, str(Path(__file__).parent))
from oracles import connected_bipartite_graphs, interval_graph  # noqa: E402

RESULTS: dict[int, str] = {}


@contextmanager
def criterion(number: int, title: str, limit: float):
    start = time.perf_counter()
    RESULTS[number] = f"criterion {number} ({title}): FAIL"
    yield
    took = time.perf_counter() - start
    ok = took < limit
    RESULTS[number] = f"criterion {number} ({title}): {'PASS' if ok else 'FAIL'} in {took:.1f}s (limit {limit:.0f}s)"
    assert ok, f"took {took:.1f}s, limit {limit}s"


@functools.lru_cache(maxsize=None)
def random_interval_cases():
    """200 seeded unit-interval layouts with 1..12 intervals."""
    cases = []
    for seed in range(200):
        n = 1 + seed % 12
        raw = random_layout(n, seed)
        cases.append((seed, raw, build_sc_diagram(normalize_intervals(raw))))
    return cases


def test_criterion_1_figure_fixtures():
    with criterion(1, "figure fixtures", 1.0):
        g = derive_graph(F.k5_soc())
        assert len(g) == 5 and len(g.edges) == 10
        assert all(g.has_edge(a, b) for a, b in itertools.combinations(g.vertices, 2))
        h = derive_graph(F.delta_k5e())
        assert len(h) == 5 and len(h.edges) == 9
        missing = [(a, b) for a, b in itertools.combinations(h.vertices, 2) if not h.has_edge(a, b)]
        assert len(missing) == 1
        for d in (F.k5_soc(), F.delta_k5e()):
            assert check_strict(d).ok and validate_embedding(d).ok


def test_criterion_2_traces_realize_graphs():
    cases = random_interval_cases()  # built outside the timer; criterion 3 times the builder
    with criterion(2, "string representations", 30.0):
        diagrams = list(F.strict_outer_fixtures().values())
        assert len(diagrams) >= 10 and all(len(d.nodes) <= 8 for d in diagrams)
        diagrams += [d for _, _, d in cases]
        for d in diagrams:
            t = build_traces(d)
            assert intersection_graph(t) == derive_graph(d)
            if d.outer_order is not None:
                assert certify_outer_string(d, t).ok


def test_criterion_3_unit_interval_builder():
    random_interval_cases.cache_clear()
    with criterion(3, "unit-interval builder", 60.0):
        cases = random_interval_cases()
        assert len(cases) == 200 and max(len(raw) for _, raw, _ in cases) == 12
        passed = 0
        for seed, raw, d in cases:
            oracle = interval_graph(raw)
            if check_strict(d).ok and validate_embedding(d).ok and is_isomorphic(derive_graph(d), oracle):
                passed += 1
        assert passed == 200


def test_criterion_4_bipartite_characterization():
    with criterion(4, "bipartite builder", 600.0):
        for n in range(1, 8):
            for g in connected_bipartite_graphs(n):
                expect = is_bipartite_permutation(g)[0] and (n < 6 or find_induced(domino(), g) is None)
                try:
                    d = build_bip_soc(g)
                    built = (check_strict(d).ok and validate_embedding(d).ok
                             and is_isomorphic(derive_graph(d), g))
                except BuildError:
                    built = False
                assert built == expect, g.sorted_edges()


def test_criterion_5_order_scan():
    with criterion(5, "order scan", 120.0):
        for g in (wheel(5), broken_wheel_3(), domino_subdivided_chord(), subdivided_star_complement()):
            assert scan_orders(g) is None
        for g in (cycle(4), cycle(5), complete(4), complete_bipartite(3, 3)):
            assert scan_orders(g) is not None


def test_criterion_6_two_cops():
    with criterion(6, "two-cop strategy", 300.0):
        played = 0
        for name, d in F.strict_outer_fixtures().items():
            g = derive_graph(d)
            assert len(d.nodes) <= 12
            if not g.is_connected():
                # isolated nodes: two cops win exactly when there are at most two
                assert solve_cop_number_at_most(g, 2) == (len(g.components()) <= 2)
                continue
            out = play(d, robber_policy("optimal", g))
            assert out.captured and out.moves <= 4 * len(d.nodes), name
            played += 1
        assert played >= 10
        assert solve_cop_number_at_most(cycle(4), 1) is False
        assert solve_cop_number_at_most(cycle(4), 2) is True


def test_criterion_7_clique_width():
    with criterion(7, "clique-width", 600.0):
        for name, d in F.tree_like_fixtures().items():
            e = build_16_expression(d)
            g, _ = evaluate(e)
            assert width(e) <= 16 and is_isomorphic(g, derive_graph(d)), name
        # the Δ-tree with outer-face simple edges is among them
        assert partition_edges(F.tree_like_fixtures()["delta_tree_chords"]).simple_edges
        for name, d in F.pure_delta_fixtures().items():
            g = derive_graph(d)
            assert len(g) <= 8
            e = min_width_expression(g, 3)
            assert e is not None and evaluate(e)[0] == g, name


def test_criterion_8_property_suites():
    here = Path(__file__).parent
    with criterion(8, "property suites", 1800.0):
        proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", str(here),
                               "--ignore", str(here / "test_acceptance.py")],
                              capture_output=True, text=True, cwd=here.parent)
        assert proc.returncode == 0, proc.stdout[-3000:]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
