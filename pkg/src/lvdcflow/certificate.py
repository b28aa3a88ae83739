"""A-priori contraction certificate for the constant-power fixed-point map.

On the voltage ball ``v_min <= V <= v_max`` the map
``T(V) = B^-1 (P / V - J)`` satisfies

    |T(V) - T(U)| <= alpha |V - U|,   alpha = |B^-1| |P| / v_min**2

with ``|.|`` the largest-absolute-entry norm. ``alpha`` is evaluated before
any iteration runs. A node-wise variant pairs each injection with its own
Thevenin resistance: ``max_k |P_k| r_kk / v_min**2``. It never exceeds the
global value; the global one sets the ``contractive`` flag.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroLoad
from .network import ReducedSystem


@dataclass(frozen=True)
class VoltageBall:
    v_min: float = 0.55
    v_max: float = 1.5

    def __post_init__(self):
        if not 0 < self.v_min < self.v_max:
            raise ValueError(f"need 0 < v_min < v_max, got {self.v_min}, {self.v_max}")

    def contains(self, v) -> bool:
        v = np.asarray(v)
        return bool(np.all((v >= self.v_min) & (v <= self.v_max)))


@dataclass(frozen=True)
class Certificate:
    alpha_global: float
    alpha_nodal: float
    worst_node: int
    ball: VoltageBall

    @property
    def contractive(self) -> bool:
        return self.alpha_global < 1.0


def matrix_max_norm(M) -> float:
    """Largest absolute entry of a matrix or vector."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        raise ValueError("max norm of an empty array is undefined")
    return float(np.max(np.abs(M)))


def certify(rs: ReducedSystem, p, ball: VoltageBall = VoltageBall()) -> Certificate:
    p = np.asarray(p, dtype=float)
    if p.shape != (len(rs),):
        raise ValueError(f"power vector has shape {p.shape}, system has {len(rs)} nodes")
    vmin2 = ball.v_min**2
    alpha_global = matrix_max_norm(rs.inverse) * matrix_max_norm(p) / vmin2
    nodal = np.abs(p) * rs.r_diag / vmin2
    k = int(np.argmax(nodal))
    return Certificate(alpha_global, float(nodal[k]), rs.p_nodes[k], ball)


def critical_multiplier(rs: ReducedSystem, p, ball: VoltageBall = VoltageBall()) -> float:
    """Uniform load multiplier at which ``alpha_global`` reaches 1."""
    alpha = certify(rs, p, ball).alpha_global
    if alpha == 0.0:
        raise ZeroLoad("all constant-power injections are zero")
    return 1.0 / alpha
