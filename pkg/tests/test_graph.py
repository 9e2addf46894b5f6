import random

import pytest
from helpers import C6, F1, T2, cycle_mix

from cycsec.errors import DomainError, InputError
from cycsec.graph import SEC, FractionalPoint, SupportGraph, contract, cut_value, expand, sec_slack, validate_point


def test_validate_clean_tour():
    assert validate_point(C6()).ok


def test_validate_lowered_edge_reports_two_vertices():
    p = T2()
    x = dict(p.x)
    x[(1, 2)] = 0.5
    diag = validate_point(FractionalPoint(6, p.y, x))
    assert sorted(v for v, _ in diag.degree_violations) == [1, 2]
    assert all(r == pytest.approx(-0.5) for _, r in diag.degree_violations)


def test_validate_f1_clean():
    assert validate_point(F1()).ok


def test_validate_logical_and_bounds():
    p = FractionalPoint(3, {1: 0.5, 2: 1.5, 3: 1.0}, {(1, 2): 0.75})
    diag = validate_point(p)
    assert (1, (1, 2), pytest.approx(0.25)) in [(v, e, pytest.approx(ex)) for v, e, ex in diag.logical_violations]
    assert diag.bound_violations == [(2, 1.5)]


@pytest.mark.parametrize(
    "bad",
    [
        lambda: FractionalPoint(3, {1: 1.0}, {(1, 1): 0.5}),
        lambda: FractionalPoint(3, {1: 1.0}, {(1, 4): 0.5}),
        lambda: FractionalPoint(3, {1: -1.0}, {}),
    ],
)
def test_structural_errors(bad):
    with pytest.raises(InputError):
        bad()


def test_duplicate_edge_records():
    with pytest.raises(InputError):
        FractionalPoint.from_edges(3, {1: 1.0, 2: 1.0}, [(1, 2, 0.5), (2, 1, 0.5)])


@pytest.mark.parametrize("point,Q,value", [(T2, {1, 2, 3}, 0.0), (C6, {1, 2, 3}, 2.0), (F1, {1, 2, 3}, 1.0)])
def test_cut_value_examples(point, Q, value):
    assert cut_value(point(), Q) == pytest.approx(value, abs=1e-12)
    assert cut_value(SupportGraph(point()), Q) == pytest.approx(value, abs=1e-12)


@pytest.mark.parametrize("Q", [set(), {1, 2, 3, 4, 5, 6}])
def test_cut_value_rejects_trivial_sets(Q):
    with pytest.raises(DomainError):
        cut_value(T2(), Q)


@pytest.mark.parametrize("point,slack", [(T2, -2.0), (C6, 0.0), (F1, 0.0)])
def test_sec_slack_examples(point, slack):
    assert sec_slack(point(), {1, 2, 3}, 1, 4) == pytest.approx(slack, abs=1e-12)


def test_sec_slack_endpoint_errors():
    with pytest.raises(DomainError):
        sec_slack(T2(), {1, 2, 3}, 4, 5)
    with pytest.raises(DomainError):
        sec_slack(T2(), {1, 2, 3}, 1, 2)
    with pytest.raises(DomainError):
        SEC(frozenset({1, 2}), 3, 4, 0.0)


def test_contract_examples():
    g = SupportGraph(T2())
    s = contract(g, {1, 2})
    assert g.y[s] == pytest.approx(1.0)
    assert dict(g.adj[s]) == {3: pytest.approx(2.0)}

    g = SupportGraph(F1())
    s = contract(g, {1, 2})
    assert g.y[s] == pytest.approx(1.0)
    assert dict(g.adj[s]) == {3: pytest.approx(1.5), 6: pytest.approx(0.5)}

    g = SupportGraph(C6())
    s = contract(g, {1, 2})
    assert g.y[s] == pytest.approx(1.0)
    assert dict(g.adj[s]) == {3: pytest.approx(1.0), 6: pytest.approx(1.0)}


def test_contract_errors():
    g = SupportGraph(T2())
    with pytest.raises(DomainError):
        contract(g, {1})
    s = contract(g, {1, 2})
    with pytest.raises(DomainError):
        contract(g, {1, s})


def test_expand_examples():
    g = SupportGraph(T2())
    s = contract(g, {1, 2})
    s2 = contract(g, {s, 3})
    assert expand(g, {s2}) == {1, 2, 3}
    assert expand(g, {4}) == {4}
    assert expand(g, {s2, 5}) == {1, 2, 3, 5}


def test_contract_keeps_m_and_heap_consistent():
    g = SupportGraph(F1())
    g.push(1)
    g.push(4)
    s = contract(g, {1, 4})
    assert g.m[s] == 1.0
    assert 1 not in g.in_heap and 4 in g.universe
    assert g.pop() is None


def _random_subsets(rng, verts, k):
    for _ in range(k):
        size = rng.randint(1, len(verts) - 1)
        yield set(rng.sample(verts, size))


def test_cut_identity_on_random_subsets():
    # x(delta(S)) = 2 y(S) - 2 x(E(S)) whenever the degree equations hold
    rng = random.Random(3)
    checked = 0
    while checked < 1000:
        p = cycle_mix(rng)
        verts = p.support()
        if len(verts) < 2:
            continue
        for S in _random_subsets(rng, verts, 20):
            inner = sum(xe for (u, v), xe in p.x.items() if u in S and v in S)
            lhs = cut_value(p, S)
            assert lhs == pytest.approx(2 * sum(p.y_of(v) for v in S) - 2 * inner, abs=1e-9)
            checked += 1


def test_contraction_preserves_degree_identity():
    rng = random.Random(5)
    for _ in range(50):
        g = SupportGraph(cycle_mix(rng))
        while len(g) > 2:
            a = rng.choice(g.vertices())
            nbrs = list(g.neighbors(a))
            b = rng.choice(nbrs) if nbrs else rng.choice([v for v in g.vertices() if v != a])
            contract(g, {a, b})
            for v in g.vertices():
                assert sum(g.adj[v].values()) == pytest.approx(2 * g.y[v], abs=1e-12)


def test_cut_value_survives_round_trip():
    rng = random.Random(11)
    for _ in range(50):
        p = cycle_mix(rng)
        g = SupportGraph(p)
        verts = g.vertices()
        if len(verts) < 4:
            continue
        a, b = rng.sample(verts, 2)
        s = contract(g, {a, b})
        live = g.vertices()
        Q = set(rng.sample(live, rng.randint(1, len(live) - 1)))
        assert cut_value(g, Q) == pytest.approx(cut_value(p, expand(g, Q)), abs=1e-12)
        assert s in g


def test_slack_symmetry():
    rng = random.Random(17)
    for _ in range(100):
        p = cycle_mix(rng)
        verts = p.support()
        Q = set(rng.sample(verts, rng.randint(1, len(verts) - 1)))
        comp = set(verts) - Q
        u, v = rng.choice(sorted(Q)), rng.choice(sorted(comp))
        assert sec_slack(p, Q, u, v) == pytest.approx(sec_slack(p, comp, v, u), abs=1e-12)
