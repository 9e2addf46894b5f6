import random

import pytest
from helpers import F1, K2, T2, cycle_mix, small_synthetic
from hypothesis import given, settings
from hypothesis import strategies as st

from cycsec.errors import DomainError, ParseError
from cycsec.graph import FractionalPoint, validate_point
from cycsec.instance import (
    SyntheticParams,
    convert_records,
    generate_synthetic,
    load_instance,
    parse_instance,
    save_instance,
    write_instance,
)
from cycsec.oracle import oracle_enumerate


def _same(a: FractionalPoint, b: FractionalPoint) -> bool:
    return (a.n_vertices, a.depot, a.y, a.x) == (b.n_vertices, b.depot, b.y, b.x)


@pytest.mark.parametrize("point", [T2, F1, K2])
def test_round_trip_fixtures(point):
    p = point()
    text = write_instance(p)
    assert _same(parse_instance(text), p)
    assert write_instance(parse_instance(text)) == text


def test_f1_edges_and_header():
    text = write_instance(F1())
    assert text.startswith("CYCSEC 1\n")
    assert len(parse_instance(text).x) == 7


def test_k2_body():
    assert write_instance(K2()).splitlines() == ["CYCSEC 1", "VERTICES 2", "DEPOT 0", "Y 2", "1 0.35", "2 0.35", "EDGES 1", "1 2 0.7"]


@st.composite
def points(draw):
    n = draw(st.integers(2, 9))
    vals = st.floats(min_value=1e-12, max_value=1.0, allow_nan=False, allow_subnormal=False)
    verts = draw(st.lists(st.integers(1, n), unique=True, min_size=1))
    y = {v: draw(vals) for v in verts}
    pairs = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    x = {e: draw(vals) for e in chosen}
    depot = draw(st.one_of(st.none(), st.integers(1, n)))
    return FractionalPoint(n, y, x, depot)


@settings(max_examples=200, deadline=None)
@given(points())
def test_round_trip_exact(p):
    q = parse_instance(write_instance(p))
    assert _same(p, q)


def test_file_round_trip(tmp_path):
    p = cycle_mix(random.Random(4))
    path = tmp_path / "p.cycsec"
    save_instance(path, p)
    assert _same(load_instance(path), p)
    assert b"\r" not in path.read_bytes()


def test_comments_and_blank_lines():
    text = "# header comment\nCYCSEC 1\n\nVERTICES 2  # two\nDEPOT 1\nY 2\n1 0.35\n2 0.35\nEDGES 1\n1 2 0.7 # edge\n"
    p = parse_instance(text)
    assert p.depot == 1 and p.x == {(1, 2): 0.7}


GOOD = write_instance(T2()).splitlines()


def _with(lineno: int, new: str | None) -> str:
    lines = list(GOOD)
    if new is None:
        del lines[lineno - 1]
    else:
        lines[lineno - 1] = new
    return "\n".join(lines) + "\n"


@pytest.mark.parametrize(
    "text,line",
    [
        (_with(1, "CYCSEC 2"), 1),
        (_with(1, "HELLO 1"), 1),
        (_with(2, "VERTICES x"), 2),
        (_with(13, "2 1 0.5"), 13),
        (_with(12, "4 4 1.0"), 12),
        (_with(5, "9 1.0"), 5),
        (_with(11, "EDGES 7"), None),
        (_with(7, "2 1.0 3"), 7),
        (_with(8, "3 abc"), 8),
    ],
)
def test_parse_errors_carry_lines(text, line):
    with pytest.raises(ParseError) as err:
        parse_instance(text, "bad.cycsec")
    assert err.value.line is not None
    if line is not None:
        assert err.value.line == line
    assert "bad.cycsec" in str(err.value)


def test_trailing_records_rejected():
    with pytest.raises(ParseError):
        parse_instance("\n".join(GOOD) + "\n5 6 0.1\n")


def test_duplicate_y():
    with pytest.raises(ParseError) as err:
        parse_instance(_with(6, "1 1.0"))
    assert err.value.line == 6


def test_converter_stub():
    p = convert_records(6, T2().y, [(u, v, xe) for (u, v), xe in T2().x.items()], depot=2)
    assert p.depot == 2 and p.x == T2().x


def test_generator_two_clusters_disconnected():
    p = generate_synthetic(SyntheticParams(n=6, clusters=2, cycles_per_cluster=1, seed=7))
    assert oracle_enumerate(p).max_violation >= 2 - 1e-9


def test_generator_single_cluster_no_violation():
    p = generate_synthetic(SyntheticParams(n=6, clusters=1, cycles_per_cluster=2, seed=1))
    assert oracle_enumerate(p).max_violation == 0.0


def test_generator_triangle():
    p = generate_synthetic(SyntheticParams(n=3, clusters=1, cycles_per_cluster=1))
    assert validate_point(p).ok
    assert p.x == {(1, 2): pytest.approx(1.0), (1, 3): pytest.approx(1.0), (2, 3): pytest.approx(1.0)}


@pytest.mark.parametrize(
    "params",
    [
        SyntheticParams(n=5, clusters=2),
        SyntheticParams(n=6, clusters=0),
        SyntheticParams(n=6, cycles_per_cluster=0),
        SyntheticParams(n=6, mix="other"),
        SyntheticParams(n=6, perturbation=1.5),
        SyntheticParams(n=6, drop=1.0),
        SyntheticParams(n=6, reversal_rate=-0.1),
    ],
)
def test_generator_rejects_bad_params(params):
    with pytest.raises(DomainError):
        generate_synthetic(params)


def test_generated_points_validate_and_repeat():
    for i in range(100):
        params = small_synthetic(i)
        p = generate_synthetic(params)
        assert validate_point(p).ok, i
        assert _same(p, generate_synthetic(params))
    big = SyntheticParams(n=300, clusters=3, cycles_per_cluster=3, perturbation=0.3, seed=2)
    assert validate_point(generate_synthetic(big)).ok
