"""Conductance matrix assembly and elimination of resistance nodes.

Node blocks are ordered V, R, P. Eliminating the R block leaves the
reduced relation between constant-power voltages and their injected
currents::

    I_P = J_P + B_PP @ V_P

where ``B_PP`` is the Schur complement of ``G_RR + D_RR`` and ``J_P``
collects the contribution of the fixed slack voltages.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Optional

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from . import kernels
from .errors import SingularReduction
from .grid import Droop, GridSpec, PartitionedGrid, validate


@dataclass(frozen=True, eq=False)
class ConductanceBlocks:
    """Full Laplacian ``G`` in V/R/P block order plus the shunt vectors.

    ``G`` has no shunts; load conductances of R nodes live in ``d_rr`` and
    droop shunts in ``droop_g``.
    """

    pg: PartitionedGrid
    G: np.ndarray
    d_rr: np.ndarray
    droop_g: np.ndarray
    branch_src: np.ndarray
    branch_dst: np.ndarray
    branch_g: np.ndarray

    @property
    def nv(self):
        return len(self.pg.v_nodes)

    @property
    def nr(self):
        return len(self.pg.r_nodes)

    @property
    def n_p(self):
        return len(self.pg.p_nodes)

    def _slice(self, block):
        nv, nr = self.nv, self.nr
        return {"V": slice(0, nv), "R": slice(nv, nv + nr), "P": slice(nv + nr, None)}[block]

    def block(self, rows: str, cols: str) -> np.ndarray:
        return self.G[self._slice(rows), self._slice(cols)]

    G_VV = property(lambda self: self.block("V", "V"))
    G_VR = property(lambda self: self.block("V", "R"))
    G_VP = property(lambda self: self.block("V", "P"))
    G_RV = property(lambda self: self.block("R", "V"))
    G_RR = property(lambda self: self.block("R", "R"))
    G_RP = property(lambda self: self.block("R", "P"))
    G_PV = property(lambda self: self.block("P", "V"))
    G_PR = property(lambda self: self.block("P", "R"))
    G_PP = property(lambda self: self.block("P", "P"))

    @property
    def D_RR(self) -> np.ndarray:
        return np.diag(self.d_rr)

    @property
    def v_set(self) -> np.ndarray:
        return np.array([self.pg.grid.kind(n).v_set for n in self.pg.v_nodes])


def build_blocks(pg: PartitionedGrid) -> ConductanceBlocks:
    order = pg.order
    index = {node: i for i, node in enumerate(order)}
    branches = pg.grid.branches
    src = np.array([index[b.from_node] for b in branches], dtype=np.int64)
    dst = np.array([index[b.to_node] for b in branches], dtype=np.int64)
    g = np.array([b.g for b in branches], dtype=float)
    G = kernels.assemble_laplacian(len(order), src, dst, g)

    grid = pg.grid
    d_rr = np.array([grid.kind(n).g for n in pg.r_nodes], dtype=float)
    droop_g = np.array(
        [grid.kind(n).g if isinstance(grid.kind(n), Droop) else 0.0 for n in pg.p_nodes],
        dtype=float,
    )
    return ConductanceBlocks(pg, G, d_rr, droop_g, src, dst, g)


@dataclass(frozen=True, eq=False)
class RecoveryOperator:
    """``V_R = M_V @ V_V + M_P @ V_P``."""

    M_V: np.ndarray
    M_P: np.ndarray


def recover_vr(op: RecoveryOperator, v_v, v_p) -> np.ndarray:
    v_v = np.asarray(v_v, dtype=float)
    v_p = np.asarray(v_p, dtype=float)
    if v_v.shape != (op.M_V.shape[1],) or v_p.shape != (op.M_P.shape[1],):
        raise ValueError(
            f"expected V_V of length {op.M_V.shape[1]} and V_P of length {op.M_P.shape[1]}, "
            f"got {v_v.shape} and {v_p.shape}"
        )
    return op.M_V @ v_v + op.M_P @ v_p


class ReducedSystem:
    """Reduced constant-power system ``I_P = J + B @ V_P``.

    ``B`` already includes droop shunt conductances on its diagonal; the
    network part alone is ``B - diag(shunt)``. The Cholesky factor of ``B``
    is computed once and shared read-only.
    """

    def __init__(self, B, J, p_nodes=None, shunt=None, recovery=None, blocks=None, v_v=None):
        self.B = np.ascontiguousarray(B, dtype=float)
        self.J = np.ascontiguousarray(J, dtype=float)
        n = self.J.shape[0]
        if self.B.shape != (n, n):
            raise ValueError(f"B has shape {self.B.shape}, J has length {n}")
        self.p_nodes = tuple(p_nodes) if p_nodes is not None else tuple(range(1, n + 1))
        self.shunt = np.zeros(n) if shunt is None else np.asarray(shunt, dtype=float)
        self.recovery = recovery
        self.blocks = blocks
        self.v_v = None if v_v is None else np.asarray(v_v, dtype=float)
        try:
            self.factorization = cho_factor(self.B)
        except LinAlgError as exc:
            raise SingularReduction(f"reduced matrix is not positive definite: {exc}") from None

    def __len__(self):
        return self.J.shape[0]

    def solve(self, rhs) -> np.ndarray:
        """Apply ``B^-1`` through the stored factorization."""
        return cho_solve(self.factorization, rhs)

    @cached_property
    def inverse(self) -> np.ndarray:
        return self.solve(np.eye(len(self)))

    @cached_property
    def r_diag(self) -> np.ndarray:
        """Thevenin resistances seen from each constant-power node."""
        return np.diag(self.inverse).copy()

    def currents(self, v_p) -> np.ndarray:
        """Total current drawn from each P node, shunt included."""
        return self.J + self.B @ v_p

    def network_currents(self, v_p) -> np.ndarray:
        """Current injected into the branch network at each P node."""
        return self.J + self.B @ v_p - self.shunt * v_p

    def permuted(self, perm) -> "ReducedSystem":
        perm = np.asarray(perm)
        return ReducedSystem(
            self.B[np.ix_(perm, perm)],
            self.J[perm],
            [self.p_nodes[i] for i in perm],
            self.shunt[perm],
        )


def reduce(blocks: ConductanceBlocks, v_set=None) -> tuple[ReducedSystem, RecoveryOperator]:
    """Eliminate the resistance nodes.

    Raises
    ------
    SingularReduction
        ``G_RR + D_RR`` (or the resulting ``B_PP``) is not positive definite.
    """
    v_set = blocks.v_set if v_set is None else np.asarray(v_set, dtype=float)
    G_PV, G_PP = blocks.G_PV, blocks.G_PP
    if blocks.nr:
        inner = blocks.G_RR + np.diag(blocks.d_rr)
        try:
            fac = cho_factor(inner)
        except LinAlgError as exc:
            raise SingularReduction(f"G_RR + D_RR is singular: {exc}") from None
        X_V = cho_solve(fac, blocks.G_RV)
        X_P = cho_solve(fac, blocks.G_RP)
        B = G_PP - blocks.G_PR @ X_P
        J_map = G_PV - blocks.G_PR @ X_V
        recovery = RecoveryOperator(-X_V, -X_P)
    else:
        B = G_PP.copy()
        J_map = G_PV
        recovery = RecoveryOperator(np.zeros((0, blocks.nv)), np.zeros((0, blocks.n_p)))
    B = 0.5 * (B + B.T) + np.diag(blocks.droop_g)
    rs = ReducedSystem(
        B,
        J_map @ v_set,
        blocks.pg.p_nodes,
        shunt=blocks.droop_g,
        recovery=recovery,
        blocks=blocks,
        v_v=v_set,
    )
    return rs, recovery


def power_vector(pg: PartitionedGrid) -> np.ndarray:
    """Scheduled injections of the P-partition nodes, in partition order."""
    return np.array([pg.grid.kind(n).p for n in pg.p_nodes], dtype=float)


class Prepared(NamedTuple):
    pg: PartitionedGrid
    blocks: ConductanceBlocks
    rs: ReducedSystem
    p: np.ndarray


def prepare(spec: GridSpec, v_set: Optional[np.ndarray] = None) -> Prepared:
    """Validate, assemble and reduce ``spec`` in one call."""
    pg = validate(spec)
    blocks = build_blocks(pg)
    rs, _ = reduce(blocks, v_set)
    return Prepared(pg, blocks, rs, power_vector(pg))


def dump_matrices(rs: ReducedSystem, path) -> None:
    """Write B_PP, J_P and r_diag as labeled row-major text blocks."""
    def block(label, arr):
        arr = np.atleast_2d(arr)
        rows = [" ".join(f"{x:.12e}" for x in row) for row in arr]
        return [f"# {label} {arr.shape[0]}x{arr.shape[1]}"] + rows

    lines = ["# p_nodes " + " ".join(str(n) for n in rs.p_nodes)]
    lines += block("B_PP", rs.B)
    lines += block("J_P", rs.J)
    lines += block("r_diag", rs.r_diag)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


__all__ = [
    "ConductanceBlocks",
    "Prepared",
    "RecoveryOperator",
    "ReducedSystem",
    "build_blocks",
    "dump_matrices",
    "power_vector",
    "prepare",
    "recover_vr",
    "reduce",
]
