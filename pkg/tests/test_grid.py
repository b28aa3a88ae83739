import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lvdcflow import (
    Branch,
    Droop,
    GridSpec,
    Power,
    Resistance,
    Voltage,
    parse_grid,
    render_grid,
    scale_loads,
    validate,
)
from lvdcflow.synthetic import random_grid
from lvdcflow.errors import (
    DisconnectedGraph,
    DuplicateNodeError,
    GridError,
    MissingPowerTerminal,
    MissingVoltageTerminal,
    NonPositiveResistance,
    ParseError,
    SelfLoopError,
    UndeclaredNodeError,
)

from conftest import FEEDER10


def test_parse_table_case(feeder):
    assert len(feeder) == 10
    assert len(feeder.branches) == 9
    expected = {
        1: Voltage(1.0),
        2: Resistance(0.0),
        3: Power(-0.8),
        4: Power(-1.3),
        5: Power(0.5),
        6: Resistance(1 / 2.0),
        7: Resistance(0.0),
        8: Power(0.3),
        9: Power(-0.7),
        10: Resistance(1 / 1.25),
    }
    assert feeder.kinds == expected
    assert feeder.branches[0] == Branch(1, 2, 0.005)
    assert feeder.branches[-1] == Branch(3, 10, 0.0015)


def test_parse_minimal():
    spec = parse_grid("slack 1 1.0\n1 2 0.1 P -1.0\n")
    assert spec.kinds == {1: Voltage(1.0), 2: Power(-1.0)}
    assert spec.branches == (Branch(1, 2, 0.1),)


def test_parse_droop_and_untyped_branches():
    text = """
    slack 1 1.0
    1 2 0.01 DROOP -0.5 0.2
    2 3 0.02 STEP   # comment
    1 3 0.03        # mesh chord, untyped
    3 2 0.04 -
    """
    spec = parse_grid(text)
    assert spec.kind(2) == Droop(-0.5, 0.2)
    assert spec.kind(3) == Resistance(0.0)
    assert len(spec.branches) == 4


def test_self_loop_rejected():
    with pytest.raises(SelfLoopError) as err:
        parse_grid("slack 1 1.0\n1 2 0.1 P 1.0\n3 3 0.1 P 1.0\n")
    assert err.value.line == 3


@pytest.mark.parametrize(
    "text, error, line",
    [
        ("slack 1 1.0\n1 2 0.1 P -1\n1 2 0.1 P -1\n", DuplicateNodeError, 3),
        ("slack 1 1.0\nslack 1 1.0\n", DuplicateNodeError, 2),
        ("slack 1 1.0\n5 2 0.1 P -1\n", UndeclaredNodeError, 2),
        ("1 2 0.1 P -1\n", UndeclaredNodeError, 1),
        ("slack 1 1.0\n1 2 x P -1\n", ParseError, 2),
        ("slack 1 1.0\n1 2 0.1 Q -1\n", ParseError, 2),
        ("slack 1 1.0\n1 2 0.1 P\n", ParseError, 2),
        ("slack 1 1.0\n1 2 0.1 DROOP -1 0\n", ParseError, 2),
        ("slack 1 -1.0\n", ParseError, 1),
        ("slack 1\n", ParseError, 1),
        ("\n\nslack 1 1.0\n1 2 0.1 R 0\n", ParseError, 4),
    ],
)
def test_parse_errors_carry_line(text, error, line):
    with pytest.raises(error) as err:
        parse_grid(text)
    assert err.value.line == line
    assert f"line {line}" in str(err.value)


def test_validate_table_partition(feeder):
    pg = validate(feeder)
    assert pg.v_nodes == (1,)
    assert pg.r_nodes == (2, 6, 7, 10)
    assert pg.p_nodes == (3, 4, 5, 8, 9)


def test_validate_droop_goes_to_p():
    pg = validate(parse_grid("slack 1 1\n1 2 0.1 DROOP 0.1 0.5\n2 3 0.1 STEP\n"))
    assert pg.p_nodes == (2,)
    assert pg.r_nodes == (3,)


def test_only_voltage_nodes():
    spec = GridSpec(((1, Voltage(1.0)), (2, Voltage(1.0))), (Branch(1, 2, 0.1),))
    with pytest.raises(MissingPowerTerminal):
        validate(spec)


def test_missing_voltage_terminal():
    spec = GridSpec(((1, Power(1.0)), (2, Power(-1.0))), (Branch(1, 2, 0.1),))
    with pytest.raises(MissingVoltageTerminal):
        validate(spec)


def test_disconnected(feeder):
    spec = GridSpec(feeder.nodes, feeder.branches[1:])
    with pytest.raises(DisconnectedGraph):
        validate(spec)


@pytest.mark.parametrize("r", [0.0, -0.1])
def test_non_positive_resistance(r):
    spec = parse_grid(f"slack 1 1\n1 2 {r} P -1\n")
    with pytest.raises(NonPositiveResistance):
        validate(spec)


def test_gridspec_invariants():
    with pytest.raises(DuplicateNodeError):
        GridSpec(((1, Voltage(1.0)), (1, Power(0.0))), ())
    with pytest.raises(UndeclaredNodeError):
        GridSpec(((1, Voltage(1.0)),), (Branch(1, 2, 0.1),))
    with pytest.raises(GridError):
        Resistance(-1.0)
    with pytest.raises(GridError):
        Droop(1.0, 0.0)


def test_scale_identity(feeder):
    assert scale_loads(feeder, 1.0) == feeder


def test_scale_values(feeder):
    assert scale_loads(feeder, 20).kind(4).p == pytest.approx(-26.0)
    assert scale_loads(feeder, 0.5).kind(5).p == pytest.approx(0.25)
    # non-power kinds untouched
    assert scale_loads(feeder, 3).kind(6) == feeder.kind(6)


def test_scale_loads_only(feeder):
    scaled = scale_loads(feeder, 2.0, loads_only=True)
    assert scaled.kind(5).p == 0.5
    assert scaled.kind(4).p == -2.6


def test_scale_rejects_non_positive(feeder):
    with pytest.raises(ValueError):
        scale_loads(feeder, 0.0)


@settings(max_examples=200, deadline=None)
@given(
    a=st.floats(0.01, 100, allow_nan=False),
    b=st.floats(0.01, 100, allow_nan=False),
)
def test_scale_composes(a, b):
    spec = parse_grid(FEEDER10.read_text())
    once = scale_loads(spec, a * b)
    twice = scale_loads(scale_loads(spec, a), b)
    assert once.branches == twice.branches
    for (n1, k1), (n2, k2) in zip(once.nodes, twice.nodes):
        assert n1 == n2 and type(k1) is type(k2)
        if isinstance(k1, (Power, Droop)):
            assert k1.p == pytest.approx(k2.p, rel=1e-15, abs=0)
        else:
            assert k1 == k2


def _partition(pg):
    return pg.v_nodes, pg.r_nodes, pg.p_nodes


def _same_kinds(a_spec, b_spec):
    for node in a_spec.node_ids:
        a, b = a_spec.kind(node), b_spec.kind(node)
        assert type(a) is type(b)
        assert vars(a) == pytest.approx(vars(b), rel=1e-15)


def test_render_round_trip_table(feeder):
    again = parse_grid(render_grid(feeder))
    assert _partition(validate(again)) == _partition(validate(feeder))
    _same_kinds(feeder, again)


@settings(max_examples=100, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    n=st.integers(2, 12),
    extra=st.integers(0, 4),
    slacks=st.integers(1, 2),
)
def test_render_round_trip_random(seed, n, extra, slacks):
    if n < slacks + 1:
        n = slacks + 1
    spec = random_grid(n, np.random.default_rng(seed), extra_branches=extra, n_slack=slacks)
    again = parse_grid(render_grid(spec))
    pg, pg2 = validate(spec), validate(again)
    assert _partition(pg2) == _partition(pg)
    assert set(pg.v_nodes + pg.r_nodes + pg.p_nodes) == set(spec.node_ids)
    assert len(pg.v_nodes) + len(pg.r_nodes) + len(pg.p_nodes) == len(spec)
    assert sorted((b.r for b in again.branches)) == sorted(b.r for b in spec.branches)
    _same_kinds(spec, again)
