import numpy as np
import pytest

from lvdcflow import SolverConfig, SweepConfig, certify, critical_multiplier, empirical_critical_load, load_sweep, parse_grid, prepare, scale_loads, solve
from lvdcflow.errors import NoDivergenceFound
from lvdcflow.oracle import newton_solve
from lvdcflow.sweep import rows_to_csv


@pytest.fixture(scope="module")
def table_rows():
    from lvdcflow import load_grid
    from conftest import FEEDER10

    return load_sweep(load_grid(FEEDER10), SweepConfig())


def _row(rows, m):
    return next(r for r in rows if abs(r.m - m) < 1e-9)


def test_multipliers():
    ms = SweepConfig().multipliers()
    assert len(ms) == 200
    assert ms[0] == 0.1 and ms[-1] == 20.0 and ms[9] == 1.0
    assert list(SweepConfig(1, 2, 0.5).multipliers()) == [1.0, 1.5, 2.0]
    with pytest.raises(ValueError):
        SweepConfig(m_start=0)
    with pytest.raises(ValueError):
        SweepConfig(m_step=0)


def test_reported_points(table_rows):
    assert abs(_row(table_rows, 1.0).iterations - 4) <= 1
    assert abs(_row(table_rows, 10.0).iterations - 10) <= 3
    last = _row(table_rows, 20.0)
    assert last.converged
    assert abs(last.iterations - 47) <= 15
    assert last.alpha == pytest.approx(0.9501, abs=0.001)


def test_staircase_shape(table_rows):
    its = [r.iterations for r in table_rows]
    assert all(a <= b for a, b in zip(its, its[1:]))
    vmin = [r.min_voltage for r in table_rows]
    assert all(a >= b for a, b in zip(vmin, vmin[1:]))
    base = _row(table_rows, 1.0).alpha
    for r in table_rows:
        assert r.alpha == pytest.approx(r.m * base, rel=1e-12)


def test_certified_rows_converge(table_rows):
    for r in table_rows:
        if r.alpha < 1 and not r.left_ball:
            assert r.converged


def test_parallel_matches_serial(feeder):
    cfg = SweepConfig(0.5, 5.0, 0.5)
    assert load_sweep(feeder, cfg, jobs=2) == load_sweep(feeder, cfg)


def test_warm_start_not_slower(feeder):
    cold = load_sweep(feeder, SweepConfig(1.0, 20.0, 1.0))
    warm = load_sweep(feeder, SweepConfig(1.0, 20.0, 1.0, warm_start=True))
    assert all(w.converged for w in warm)
    assert sum(w.iterations for w in warm) < sum(c.iterations for c in cold)
    np.testing.assert_allclose([w.min_voltage for w in warm], [c.min_voltage for c in cold], atol=1e-5)


def test_loads_only_leaves_generation(feeder):
    rows = load_sweep(feeder, SweepConfig(2.0, 2.0, 1.0, loads_only=True))
    prep = prepare(scale_loads(feeder, 2.0, loads_only=True))
    assert rows[0].alpha == pytest.approx(certify(prep.rs, prep.p).alpha_global)


def test_csv(table_rows):
    text = rows_to_csv(table_rows[:2])
    lines = text.splitlines()
    assert lines[0] == "m,alpha,iterations,converged,min_voltage,left_ball"
    assert lines[1].startswith("1.0000000000e-01,")
    assert lines[1].split(",")[2:4] == ["3", "true"]


def test_empirical_limit_two_node(two_node):
    m = empirical_critical_load(two_node)
    assert m == pytest.approx(2.5, abs=1e-3)
    assert m <= 2.5


def test_empirical_limit_table(feeder):
    m = empirical_critical_load(feeder, m_hint=20.0)
    assert m >= 20.0


def test_no_divergence_for_zero_power():
    spec = parse_grid("slack 1 1.0\n1 2 0.1 P 0\n")
    with pytest.raises(NoDivergenceFound):
        empirical_critical_load(spec)
    with pytest.raises(NoDivergenceFound):
        empirical_critical_load(spec, m_hint=5.0)


@pytest.mark.parametrize("case", ["feeder", "two_node"])
def test_certificate_limit_versus_solvability(case, feeder, two_node):
    """m* = 1/alpha does not bound the solvable range from below.

    Past the empirical limit alpha is still < 1 but the fixed point has left
    the v_min ball, which the certificate presumes. Below the limit every
    point whose solution stays inside the ball is certified and converges.
    """
    spec = {"feeder": feeder, "two_node": two_node}[case]
    prep = prepare(spec)
    m_star = critical_multiplier(prep.rs, prep.p)
    m_emp = empirical_critical_load(spec)
    assert m_emp < m_star
    near = prepare(scale_loads(spec, m_emp))
    v = solve(near.rs, near.p, SolverConfig(tolerance=1e-10, max_iterations=100000)).v_p
    assert v.min() < 0.55
    exact = newton_solve(near.rs, near.p, v, tol=1e-11).v
    assert exact.min() < 0.55
