"""Power flow for low-voltage DC grids with constant-power terminals.

Typical use::

    from lvdcflow import load_grid, prepare, certify, solve

    prep = prepare(load_grid("cases/feeder10.grid"))
    cert = certify(prep.rs, prep.p)
    result = solve(prep.rs, prep.p)
"""

from .certificate import Certificate, VoltageBall, certify, critical_multiplier, matrix_max_norm
from .grid import (
    Branch,
    Droop,
    GridSpec,
    PartitionedGrid,
    Power,
    Resistance,
    Voltage,
    load_grid,
    parse_grid,
    render_grid,
    scale_loads,
    validate,
)
from .kernels import BACKEND
from .network import (
    ConductanceBlocks,
    RecoveryOperator,
    ReducedSystem,
    build_blocks,
    power_vector,
    prepare,
    recover_vr,
    reduce,
)
from .oracle import OracleReport, analytic_two_node, multistart_probe, newton_solve
from .solver import Method, SolveResult, SolverConfig, apply_map_T, power_balance, residual, solve
from .sweep import SweepConfig, SweepRow, empirical_critical_load, load_sweep

__version__ = "0.1.0"
