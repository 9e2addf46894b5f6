import itertools
import random

import pytest
from helpers import C3_ONLY, C6, F1, P5, STRATEGIES, T2, cycle_mix

from cycsec.graph import EQ_TOL, VIOLATION_TOL, SupportGraph
from cycsec.oracle import best_endpoint_slack, oracle_enumerate
from cycsec.repository import QRepository
from cycsec.shrink import ShrinkRule, Strategy, rule_applicable, run_strategy, shrink_update


def test_c1_on_t2():
    assert rule_applicable(SupportGraph(T2()), ShrinkRule.C1, 1) == ((1, 2), 3)


def test_c2_on_p5_where_c1_fails():
    g = SupportGraph(P5())
    assert rule_applicable(g, ShrinkRule.C2, 3) == ((3, 4), 2)
    assert rule_applicable(g, ShrinkRule.C1, 3) is None


def test_s2_after_contraction():
    g = SupportGraph(T2())
    s = g.contract({1, 2})
    S, witness = rule_applicable(g, ShrinkRule.S2, s)
    assert set(S) == {s, 3} and witness is None


def test_c3_only_instance():
    g = SupportGraph(C3_ONLY())
    for u in g.vertices():
        for rule in (ShrinkRule.C1, ShrinkRule.C2, ShrinkRule.S1, ShrinkRule.S2):
            assert rule_applicable(g, rule, u) is None
    S, t = rule_applicable(g, ShrinkRule.C3, 1)
    assert set(S) == {1, 2, 3} and t == 7
    # safe shrinking keeps the (absent) violation status
    assert not oracle_enumerate(C3_ONLY()).violated
    g2 = SupportGraph(C3_ONLY())
    run_strategy(g2, Strategy.C1C2C3, None, random.Random(0))
    assert g2.rule_counters["C3"] >= 1


def test_shrink_update_t2_saves_triangle():
    g = SupportGraph(T2())
    repo = QRepository(g.universe)
    shrink_update(g, (1, 2), repo)
    assert repo.sets() == [frozenset({1, 2, 3})]
    assert repo.slack({1, 2, 3}) == pytest.approx(-2.0)


def test_shrink_update_c6_heap():
    g = SupportGraph(C6())
    repo = QRepository(g.universe)
    s = shrink_update(g, (1, 2), repo)
    assert len(repo) == 0
    assert g.in_heap == {s, 3, 6}


def test_shrink_update_f1_saves_nothing():
    g = SupportGraph(F1())
    repo = QRepository(g.universe)
    shrink_update(g, (1, 2), repo)
    assert len(repo) == 0


def test_run_strategy_t2_s1s2():
    g = SupportGraph(T2())
    repo = QRepository(g.universe)
    rep = run_strategy(g, Strategy.S1S2, repo, random.Random(0))
    assert (rep.n_vertices, rep.n_edges) == (2, 0)
    assert repo.sets() == [frozenset({1, 2, 3})]
    assert rep.counts == {"S1": 2, "S2": 2}


def test_run_strategy_f1_s1s2():
    g = SupportGraph(F1())
    repo = QRepository(g.universe)
    rep = run_strategy(g, Strategy.S1S2, repo, random.Random(0))
    assert (rep.n_vertices, rep.n_edges) == (1, 0)
    assert len(repo) == 0
    assert rep.counts == {"S1": 3, "S2": 2}


def test_run_strategy_c6_c1():
    g = SupportGraph(C6())
    repo = QRepository(g.universe)
    rep = run_strategy(g, Strategy.C1, repo, random.Random(0))
    assert (rep.n_vertices, rep.n_edges) == (2, 1)
    assert [xe for _, _, xe in g.edges()] == [pytest.approx(2.0)]
    assert len(repo) == 0
    assert rep.counts == {"C1": 4}


@pytest.mark.parametrize("seed", range(10))
def test_f1_final_size_independent_of_heap_order(seed):
    g = SupportGraph(F1())
    run_strategy(g, Strategy.S1S2, QRepository(g.universe), random.Random(seed))
    assert (len(g), g.n_edges()) == (1, 0)


def test_strategy_rule_sets():
    assert Strategy.NO.rules == frozenset()
    assert Strategy.S1S2.rules == {ShrinkRule.S1, ShrinkRule.S2}
    # C3 never sits next to an S rule
    for s in Strategy:
        assert not (ShrinkRule.C3 in s.rules and s.rules & {ShrinkRule.S1, ShrinkRule.S2})


def _points(k, seed=0):
    rng = random.Random(seed)
    return [cycle_mix(rng) for _ in range(k)]


@pytest.mark.parametrize("strategy", ["C1", "C1C2", "C1C2C3", "S1"])
def test_safe_rules_preserve_violation(strategy):
    for i, p in enumerate(_points(200)):
        g = SupportGraph(p)
        run_strategy(g, strategy, None, random.Random(i))
        before = oracle_enumerate(p).violated
        after = oracle_enumerate(g).violated
        assert before == after, i


def test_s1s2_is_subcycle_safe():
    for i, p in enumerate(_points(200)):
        g = SupportGraph(p)
        repo = QRepository(g.universe)
        run_strategy(g, Strategy.S1S2, repo, random.Random(i))
        if oracle_enumerate(p).violated:
            shrunk = oracle_enumerate(g, g.m).violated
            assert shrunk or len(repo) > 0, i


@pytest.mark.parametrize("strategy", ["C1", "C1C2", "C1C2C3", "S1"])
def test_value_inheritance(strategy):
    for i, p in enumerate(_points(100, seed=1)):
        g = SupportGraph(p)
        run_strategy(g, strategy, None, random.Random(i))
        for v in g.vertices():
            assert g.m[v] == pytest.approx(g.y[v], abs=EQ_TOL)
            assert all(abs(p.y_of(o) - g.y[v]) <= 1e-9 for o in g.members[v])


def test_dominance_of_c2_and_s1_over_c1():
    sites = {True: 0, False: 0}
    for i, p in enumerate(_points(100, seed=2)):
        g = SupportGraph(p)
        for u in g.vertices():
            hit = rule_applicable(g, ShrinkRule.C1, u)
            if hit is None:
                continue
            (_, v), t = hit
            assert rule_applicable(g, ShrinkRule.S1, u) is not None
            # the C1 scan only looks at x_vt; with an edge ut the site has
            # x(t : S) > c and is covered by S1 alone
            plain = t not in g.adj[u]
            sites[plain] += 1
            if plain:
                assert rule_applicable(g, ShrinkRule.C2, u) is not None
    assert sites[True] > 0 and sites[False] > 0


def test_saved_sets_violated_on_original():
    found = 0
    for i, p in enumerate(_points(200, seed=3)):
        for strategy in STRATEGIES:
            g = SupportGraph(p)
            repo = QRepository(g.universe)
            run_strategy(g, strategy, repo, random.Random(i))
            for Q in repo:
                found += 1
                assert best_endpoint_slack(p, Q) < -VIOLATION_TOL
    assert found > 0


def test_report_counts_match_graph_counters():
    p = _points(1, seed=9)[0]
    g = SupportGraph(p)
    rep = run_strategy(g, Strategy.S1S2, QRepository(g.universe), random.Random(0))
    assert g.rule_counters == rep.counts
    assert rep.removed_vertices == len(p.support()) - len(g)


def test_strategy_name_round_trip():
    for a, b in itertools.product(Strategy, repeat=2):
        assert (Strategy(a.value) == b) == (a is b)
