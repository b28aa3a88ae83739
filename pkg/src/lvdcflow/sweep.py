"""Uniform load scaling: iterations and certificate versus loading."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial
from typing import Optional

import numpy as np

from .certificate import certify, critical_multiplier
from .errors import NoDivergenceFound, ZeroLoad
from .grid import GridSpec, scale_loads
from .network import prepare
from .solver import SolverConfig, solve


@dataclass(frozen=True)
class SweepConfig:
    m_start: float = 0.1
    m_end: float = 20.0
    m_step: float = 0.1
    solver: SolverConfig = field(default_factory=SolverConfig)
    loads_only: bool = False
    warm_start: bool = False

    def __post_init__(self):
        if not 0 < self.m_start <= self.m_end:
            raise ValueError("need 0 < m_start <= m_end")
        if not self.m_step > 0:
            raise ValueError("m_step must be positive")

    def multipliers(self) -> np.ndarray:
        count = int(np.floor((self.m_end - self.m_start) / self.m_step + 1e-9)) + 1
        return np.round(self.m_start + self.m_step * np.arange(count), 12)


@dataclass(frozen=True)
class SweepRow:
    m: float
    alpha: float
    iterations: int
    converged: bool
    min_voltage: float
    left_ball: bool


def _sweep_point(spec: GridSpec, cfg: SweepConfig, m: float, initial=None) -> tuple[SweepRow, np.ndarray]:
    prep = prepare(scale_loads(spec, m, loads_only=cfg.loads_only))
    cert = certify(prep.rs, prep.p, cfg.solver.ball)
    solver_cfg = cfg.solver
    if initial is not None:
        solver_cfg = replace(solver_cfg, initial=initial)
    result = solve(prep.rs, prep.p, solver_cfg)
    row = SweepRow(
        m=float(m),
        alpha=cert.alpha_global,
        iterations=result.iterations,
        converged=result.converged,
        min_voltage=float(np.min(result.v_p)),
        left_ball=result.left_ball,
    )
    return row, result.v_p if result.converged else None


def _cold_point(spec, cfg, m):
    return _sweep_point(spec, cfg, m)[0]


def load_sweep(spec: GridSpec, cfg: SweepConfig = SweepConfig(), jobs: int = 1) -> list[SweepRow]:
    """Solve at every multiplier in ``cfg``; rows come back ordered by ``m``.

    Points are solved from the configured initial point unless
    ``cfg.warm_start`` is set, in which case each point starts from the
    previous converged solution and ``jobs`` is ignored.
    """
    ms = cfg.multipliers()
    if cfg.warm_start:
        rows, previous = [], None
        for m in ms:
            row, v = _sweep_point(spec, cfg, m, previous)
            rows.append(row)
            previous = v if v is not None else previous
        return rows
    work = partial(_cold_point, spec, cfg)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(work, ms, chunksize=max(1, len(ms) // (4 * jobs))))
    return [work(m) for m in ms]


def rows_to_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["m", "alpha", "iterations", "converged", "min_voltage", "left_ball"])
    for r in rows:
        writer.writerow(
            [
                f"{r.m:.10e}",
                f"{r.alpha:.10e}",
                r.iterations,
                str(r.converged).lower(),
                f"{r.min_voltage:.10e}",
                str(r.left_ball).lower(),
            ]
        )
    return buf.getvalue()


def empirical_critical_load(
    spec: GridSpec,
    cfg: SolverConfig = SolverConfig(),
    m_hint: Optional[float] = None,
    width: float = 1e-3,
    loads_only: bool = False,
) -> float:
    """Largest load multiplier at which the solver still converges.

    The bracket is found by doubling from ``m_hint`` (default: the
    certificate's critical multiplier) up to ``10 * m_hint``, then bisected
    to ``width``.
    """

    def converges(m):
        prep = prepare(scale_loads(spec, m, loads_only=loads_only))
        return solve(prep.rs, prep.p, cfg).converged

    if not converges(1.0):
        raise ValueError("solver does not converge at nominal load")
    if m_hint is None:
        prep = prepare(spec)
        try:
            m_hint = critical_multiplier(prep.rs, prep.p, cfg.ball)
        except ZeroLoad:
            raise NoDivergenceFound("grid carries no constant-power load") from None

    limit = 10.0 * m_hint
    lo, hi = 1.0, max(m_hint, 1.0)
    while converges(hi):
        if hi >= limit:
            raise NoDivergenceFound(f"solver still converges at m = {hi:g}")
        lo, hi = hi, min(2.0 * hi, limit)
    while hi - lo >= width:
        mid = 0.5 * (lo + hi)
        if converges(mid):
            lo = mid
        else:
            hi = mid
    return lo
