"""Reference solutions used to check the fixed-point solver.

None of these share code with :mod:`lvdcflow.solver` beyond the reduced
matrices themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

import numpy as np
from scipy.spatial.distance import pdist

from .errors import MaxIterations, SingularJacobian
from .network import ReducedSystem
from .solver import SolverConfig, solve


class NewtonSolution(NamedTuple):
    v: np.ndarray
    iterations: int


def newton_jacobian(rs: ReducedSystem, v) -> np.ndarray:
    """d/dv of ``v * (J + B v) - p``."""
    return np.diag(rs.J + rs.B @ v) + v[:, None] * rs.B


def newton_solve(rs: ReducedSystem, p, v0, tol: float = 1e-10, max_iterations: int = 50) -> NewtonSolution:
    """Newton-Raphson on the power mismatch with the analytic Jacobian.

    Converged when the largest power mismatch is below ``tol``.
    """
    p = np.asarray(p, dtype=float)
    v = np.array(v0, dtype=float)
    if np.any(v == 0):
        raise ValueError("initial point has a zero entry")
    for k in range(max_iterations + 1):
        F = v * (rs.J + rs.B @ v) - p
        if np.max(np.abs(F)) < tol:
            return NewtonSolution(v, k)
        if k == max_iterations:
            break
        try:
            dv = np.linalg.solve(newton_jacobian(rs, v), F)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobian(str(exc)) from None
        if not np.all(np.isfinite(dv)):
            raise SingularJacobian("non-finite Newton step")
        v = v - dv
    raise MaxIterations(f"Newton did not converge in {max_iterations} iterations")


def analytic_two_node(r: float, p: float, v_set: float) -> Optional[float]:
    """High-voltage root of ``v**2 - v_set*v - r*p = 0``; ``None`` if infeasible."""
    if not (r > 0 and v_set > 0):
        raise ValueError("need r > 0 and v_set > 0")
    disc = v_set * v_set + 4.0 * r * p
    if disc < 0:
        return None
    return 0.5 * (v_set + math.sqrt(disc))


@dataclass(frozen=True)
class OracleReport:
    newton_v_p: np.ndarray
    newton_iterations: int
    fixed_point_v_p: np.ndarray
    agreement_norm: float
    multistart_spread: float
    starts: int
    converged_starts: int

    def passed(self, agreement: float = 1e-8, spread: float = 1e-6) -> bool:
        return (
            self.converged_starts == self.starts
            and self.agreement_norm < agreement
            and self.multistart_spread < spread
        )


def random_starts(n: int, K: int, seed: int, v_min: float, v_max: float) -> np.ndarray:
    """``K`` points uniform on the box, drawn from numpy's PCG64 with ``seed``."""
    rng = np.random.default_rng(seed)
    return rng.uniform(v_min, v_max, size=(K, n))


def multistart_probe(rs: ReducedSystem, p, cfg: SolverConfig = SolverConfig(), K: int = 100, seed: int = 0) -> OracleReport:
    """Solve from ``K`` random starts in the ball and from ``cfg``'s own start.

    The spread is the largest pairwise max-norm distance among converged
    starts; the Newton oracle is compared against the ``cfg`` start.
    """
    if K < 2:
        raise ValueError("need at least two starts")
    ball = cfg.ball
    starts = random_starts(len(rs), K, seed, ball.v_min, ball.v_max)
    finals = []
    for v0 in starts:
        res = solve(rs, p, replace(cfg, initial=v0, keep_history=False))
        if res.converged:
            finals.append(res.v_p)
    spread = float(np.max(pdist(np.array(finals), "chebyshev"))) if len(finals) > 1 else 0.0

    reference = solve(rs, p, cfg)
    newton = newton_solve(rs, p, cfg.initial_point(len(rs)))
    return OracleReport(
        newton_v_p=newton.v,
        newton_iterations=newton.iterations,
        fixed_point_v_p=reference.v_p,
        agreement_norm=float(np.max(np.abs(newton.v - reference.v_p))),
        multistart_spread=spread,
        starts=K,
        converged_starts=len(finals),
    )
