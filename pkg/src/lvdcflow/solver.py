"""Successive approximations for constant-power terminal voltages."""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import kernels
from .certificate import VoltageBall
from .errors import ZeroVoltageEntry
from .grid import PartitionedGrid
from .network import ReducedSystem, power_vector, recover_vr

# voltages below this are treated as the singularity of P / V
ZERO_VOLTAGE = 1e-12
BLOWUP_STEP = 1e6


class Method(str, enum.Enum):
    JACOBI = "jacobi"
    GAUSS_SEIDEL = "gauss-seidel"


@dataclass(frozen=True)
class SolverConfig:
    tolerance: float = 1e-6
    max_iterations: int = 1000
    method: Method = Method.JACOBI
    initial: Union[float, np.ndarray] = 1.0
    ball: VoltageBall = VoltageBall()
    keep_history: bool = False

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if int(self.max_iterations) < 1:
            raise ValueError("max_iterations must be >= 1")
        object.__setattr__(self, "method", Method(self.method))

    def initial_point(self, n: int) -> np.ndarray:
        if np.ndim(self.initial) == 0:
            return np.full(n, float(self.initial))
        v0 = np.array(self.initial, dtype=float)
        if v0.shape != (n,):
            raise ValueError(f"initial point has shape {v0.shape}, expected ({n},)")
        return v0


@dataclass
class SolveResult:
    v_p: np.ndarray
    v_r: np.ndarray
    iterations: int
    status: str
    left_ball: bool
    step_norms: list[float]
    residual_norm: float
    losses: Optional[float] = None
    slack_power: Optional[float] = None
    p_nodes: tuple = ()
    r_nodes: tuple = ()
    v_nodes: tuple = ()
    v_v: Optional[np.ndarray] = None
    history: list[np.ndarray] = field(default_factory=list, repr=False)

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    @property
    def node_voltages(self) -> dict[int, float]:
        out = {}
        if self.v_v is not None:
            out.update(zip(self.v_nodes, map(float, self.v_v)))
        out.update(zip(self.r_nodes, map(float, self.v_r)))
        out.update(zip(self.p_nodes, map(float, self.v_p)))
        return dict(sorted(out.items()))


def apply_map_T(rs: ReducedSystem, p, v) -> np.ndarray:
    """``B^-1 (P / V - J)`` via the stored factorization."""
    v = np.asarray(v, dtype=float)
    if np.any(np.abs(v) < ZERO_VOLTAGE):
        raise ZeroVoltageEntry("map is undefined at zero voltage")
    return rs.solve(np.asarray(p, dtype=float) / v - rs.J)


def residual(rs: ReducedSystem, p, v) -> np.ndarray:
    """Power mismatch ``p - v * (J + B v)`` at each constant-power node."""
    v = np.asarray(v, dtype=float)
    return np.asarray(p, dtype=float) - v * rs.currents(v)


def solve(rs: ReducedSystem, p, cfg: SolverConfig = SolverConfig()) -> SolveResult:
    """Iterate the fixed-point map from ``cfg.initial``.

    Stops when the max-norm step drops below ``cfg.tolerance``. The returned
    ``status`` is ``"converged"``, ``"diverged"`` (blow-up, a voltage hitting
    zero, or growing steps at the iteration limit) or ``"max_iterations"``.
    Leaving the voltage ball is recorded in ``left_ball`` but never stops
    the iteration.
    """
    p = np.ascontiguousarray(p, dtype=float)
    v = np.ascontiguousarray(cfg.initial_point(len(rs)))
    if np.any(np.abs(v) < ZERO_VOLTAGE):
        raise ZeroVoltageEntry("initial point has a zero entry")

    ball = cfg.ball
    steps: list[float] = []
    history = [v.copy()] if cfg.keep_history else []
    left_ball = False
    status = "max_iterations"
    gauss_seidel = cfg.method is Method.GAUSS_SEIDEL

    for _ in range(int(cfg.max_iterations)):
        if gauss_seidel:
            step = kernels.gauss_seidel_sweep(rs.B, rs.J, p, v)
        else:
            new = apply_map_T(rs, p, v)
            step = kernels.max_abs_diff(new, v)
            v = new
        steps.append(step)
        if cfg.keep_history:
            history.append(v.copy())
        if not np.all(np.isfinite(v)) or not np.isfinite(step) or step > BLOWUP_STEP:
            status = "diverged"
            break
        if np.any(np.abs(v) < ZERO_VOLTAGE):
            status = "diverged"
            break
        if not ball.contains(v):
            left_ball = True
        if step < cfg.tolerance:
            status = "converged"
            break
    else:
        if len(steps) > 1 and steps[-1] > steps[0]:
            status = "diverged"

    result = SolveResult(
        v_p=v,
        v_r=np.zeros(0),
        iterations=len(steps),
        status=status,
        left_ball=left_ball,
        step_norms=steps,
        residual_norm=float(np.max(np.abs(residual(rs, p, v)), initial=0.0)),
        p_nodes=rs.p_nodes,
        history=history,
    )
    if rs.blocks is not None and np.all(np.isfinite(v)):
        _attach_network_state(result, rs)
    return result


def _attach_network_state(result: SolveResult, rs: ReducedSystem) -> None:
    blocks = rs.blocks
    pg = blocks.pg
    v_r = recover_vr(rs.recovery, rs.v_v, result.v_p)
    full = np.concatenate([rs.v_v, v_r, result.v_p])
    slack_currents = blocks.G[: blocks.nv] @ full
    result.v_r = v_r
    result.v_v = rs.v_v
    result.v_nodes, result.r_nodes = pg.v_nodes, pg.r_nodes
    result.losses = kernels.branch_losses(
        blocks.branch_src, blocks.branch_dst, blocks.branch_g, full
    )
    result.slack_power = float(rs.v_v @ slack_currents)


def power_balance(result: SolveResult, pg: PartitionedGrid, rs: ReducedSystem) -> float:
    """Slack supply plus scheduled injections minus shunt consumption and losses.

    Shunt consumption covers resistance loads and droop shunts. At an exact
    power-flow solution the value is zero; otherwise it equals the summed
    power mismatch of the constant-power nodes.
    """
    if result.losses is None:
        raise ValueError("result carries no network state (reduced system built without blocks)")
    blocks = rs.blocks
    shunt_r = float(blocks.d_rr @ result.v_r**2)
    shunt_p = float(rs.shunt @ result.v_p**2)
    p = power_vector(pg)
    return result.slack_power + float(np.sum(p)) - shunt_r - shunt_p - result.losses


def write_trace(result: SolveResult, path) -> None:
    """Per-iteration CSV: ``k, step_norm, v_<node>...``; needs ``keep_history``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "step_norm"] + [f"v_{n}" for n in result.p_nodes])
        for k, step in enumerate(result.step_norms, start=1):
            row = [k, f"{step:.10e}"]
            if k < len(result.history):
                row += [f"{x:.10e}" for x in result.history[k]]
            writer.writerow(row)
