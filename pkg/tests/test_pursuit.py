import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from confluent import fixtures as F
from confluent.diagram import DiagramError, derive_graph
from confluent.graph import Graph, GraphError, SizeCapExceeded, complete, cycle, empty, path
from confluent.pursuit import (
    GameState, InteractiveRobber, StrategyError, StrategyPhase, TwoCopStrategy, cop_strategy_step,
    extremal, is_locked, node_interval, play, robber_policy, solve_cop_number_at_most,
)


def dismantlable(g: Graph) -> bool:
    """Cop-win test: repeatedly delete a vertex whose closed neighbourhood
    sits inside another vertex's closed neighbourhood."""
    vs = set(g.vertices)
    while len(vs) > 1:
        closed = {v: (g.neighbors(v) & vs) | {v} for v in vs}
        gone = next((v for v in sorted(vs) for w in sorted(vs) if v != w and closed[v] <= closed[w]), None)
        if gone is None:
            return False
        vs.remove(gone)
    return True


def connected_strict():
    return {k: d for k, d in F.strict_outer_fixtures().items() if derive_graph(d).is_connected()}


def test_node_interval_examples():
    d = F.outer_cycle(5)
    order = list(d.outer_order.order)
    assert node_interval(d, order[0], order[2]) == [order[1]]
    assert node_interval(d, order[2], order[0]) == order[3:]
    assert node_interval(d, order[0], order[1]) == []
    with pytest.raises(DiagramError):
        node_interval(d.copy(outer_order=None), order[0], order[2])


def test_is_locked_examples():
    p5 = Graph(list("abcde"), [("a", "b"), ("b", "c"), ("c", "d"), ("d", "e")])
    assert is_locked(p5, ("c", "c"), "a", ["a", "b"])
    assert not is_locked(p5, ("e", "e"), "a", ["a"])
    c4 = cycle(4)
    assert is_locked(c4, ("1", "2"), "4", ["3", "4"])
    with pytest.raises(GraphError):
        is_locked(c4, ("1", "1"), "3", ["4"])


def test_extremal_examples():
    d = F.outer_cycle(4)
    o = list(d.outer_order.order)
    ex = extremal(d, o[1], o[0])
    assert (ex.w, ex.x) == (o[2], o[3]) and ex.is_extremal_pair
    star = F.outer_star()
    o = list(star.outer_order.order)
    centre = next(v for v in o if derive_graph(star).degree(v) == 3)
    leaf = o[(o.index(centre) + 1) % len(o)]
    ex = extremal(star, leaf, centre)
    assert ex.w is None and ex.x is not None
    assert ex.pair == (leaf, ex.x)


def test_solver_on_small_graphs():
    assert not solve_cop_number_at_most(cycle(4), 1)
    assert solve_cop_number_at_most(cycle(4), 2)
    assert solve_cop_number_at_most(path(5), 1)
    assert solve_cop_number_at_most(complete(5), 1)
    assert not solve_cop_number_at_most(empty(3), 2)
    with pytest.raises(SizeCapExceeded):
        solve_cop_number_at_most(cycle(13), 2)


@settings(max_examples=60, deadline=None, derandomize=True)
@given(st.integers(1, 7), st.integers(0, 10_000))
def test_one_cop_solver_matches_dismantlability(n, seed):
    rng = random.Random(seed)
    vs = [str(i) for i in range(n)]
    es = [e for e in itertools.combinations(vs, 2) if rng.random() < 0.45]
    g = Graph(vs, es)
    if not g.is_connected():
        return
    assert solve_cop_number_at_most(g, 1) == dismantlable(g)


@pytest.mark.parametrize("name", sorted(connected_strict()))
def test_two_cops_catch_the_optimal_robber(name):
    d = connected_strict()[name]
    g = derive_graph(d)
    assert solve_cop_number_at_most(g, 2)
    out = play(d, robber_policy("optimal", g))
    assert out.captured and out.moves <= 4 * len(d.nodes)


def robber_at_each_cop_turn(out):
    r = out.transcript[0]["robber"]
    for step in out.transcript[1:]:
        if "robber" in step:
            r = step["robber"]
        else:
            yield r


def check_locks(d, out):
    g = derive_graph(d)
    cops_seq = [tuple(s["cops"]) for s in out.transcript[1:] if "cops" in s]
    robbers = list(robber_at_each_cop_turn(out))
    prev = None
    for cops, r, ph in zip(cops_seq, robbers, out.phases):
        if ph.case == "endgame":
            assert r in cops
            continue
        size = len(ph.locked_interval)
        assert prev is None or size <= prev
        prev = size
        holders = (ph.anchors[0],) if ph.case == "block" else cops
        assert set(holders) <= set(cops)
        assert is_locked(g, holders, r, ph.locked_interval)


@pytest.mark.parametrize("policy", ["greedy", "random:1", "random:9"])
def test_locks_hold_and_shrink_on_fixtures(policy):
    for name, d in connected_strict().items():
        out = play(d, robber_policy(policy, derive_graph(d)))
        assert out.captured, name
        check_locks(d, out)


@settings(max_examples=30, deadline=None, derandomize=True)
@given(st.integers(3, 7), st.integers(0, 10_000), st.integers(0, 3))
def test_random_tree_like_games(leaves, seed, extra):
    d = F.random_tree_like(leaves, seed, extra_nodes=extra)
    g = derive_graph(d)
    if not g.is_connected() or len(g) > 12:
        return
    for policy in ("optimal", f"random:{seed}"):
        out = play(d, robber_policy(policy, g))
        assert out.captured and out.moves <= 4 * len(g)
        check_locks(d, out)


def test_play_rejects_disconnected():
    with pytest.raises(DiagramError):
        play(F.isolated(3), robber_policy("greedy", derive_graph(F.isolated(3))))


def test_cop_strategy_step():
    d = F.outer_cycle(6)
    o = list(d.outer_order.order)
    g = derive_graph(d)
    u, v = g.sorted_edges()[0]
    state = GameState((u, v), o[(o.index(u) + 3) % 6], "cops")
    s = TwoCopStrategy(d)
    a, b = (u, v) if state.robber in node_interval(d, u, v) else (v, u)
    phase = StrategyPhase(tuple(node_interval(d, a, b)), (a, b), "pair")
    cops, nxt = cop_strategy_step(d, phase, state, s)
    assert all(c == x or g.has_edge(c, x) for c, x in zip(state.cops, cops))
    assert len(nxt.locked_interval) < len(phase.locked_interval)
    far = StrategyPhase((o[(o.index(u) + 1) % 6],), (a, b), "pair")
    with pytest.raises(StrategyError):
        cop_strategy_step(d, far, state)


def test_interactive_robber_reads_moves():
    d = F.k5_soc()
    answers = iter(["nowhere", "x", "x", "x"])
    said = []
    robber = InteractiveRobber(ask=lambda _: next(answers), say=said.append)
    out = play(d, robber)
    assert out.captured
    assert any("not a legal choice" in s for s in said)


def test_unknown_policy():
    with pytest.raises(ValueError):
        robber_policy("sneaky", cycle(4))


def test_outcome_json():
    d = F.outer_path(5)
    out = play(d, robber_policy("greedy", derive_graph(d)))
    js = out.to_json()
    assert js["captured"] and js["moves"] == out.moves
    assert len(js["phases"]) == out.moves
