"""Command line front end: ``lvdcflow {solve,certify,sweep,verify} GRID``.

Exit codes: 0 success, 1 verification failed, 2 invalid input (I/O, parse
or validation error), 3 non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace

import numpy as np

from .certificate import VoltageBall, certify, critical_multiplier
from .errors import GridError, SolverError, ZeroLoad
from .grid import load_grid, scale_loads
from .network import dump_matrices, prepare
from .oracle import multistart_probe
from .solver import Method, SolverConfig, solve, write_trace
from .sweep import SweepConfig, load_sweep, rows_to_csv

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_INVALID, EXIT_NOT_CONVERGED = 0, 1, 2, 3
VERIFY_DEFAULT_TOL = 1e-10


def dumps(obj, indent=2, _level=0) -> str:
    """JSON with every float written as ``%.10e``; NaN and inf become null."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return f"{float(obj):.10e}" if math.isfinite(obj) else "null"
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def _positive(kind):
    def parse(text):
        value = kind(text)
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value

    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("grid", help="grid file")
    common.add_argument("--tol", type=_positive(float), default=None,
                        help="step tolerance in pu (default 1e-6; verify: 1e-10)")
    common.add_argument("--max-iter", type=_positive(int), default=1000)
    common.add_argument("--method", choices=[m.value for m in Method], default="jacobi")
    common.add_argument("--v-min", type=_positive(float), default=0.55)
    common.add_argument("--v-max", type=_positive(float), default=1.5)
    common.add_argument("--flat-start", type=_positive(float), default=1.0, metavar="V")
    common.add_argument("--load", type=_positive(float), default=1.0, metavar="M",
                        help="uniform multiplier on constant-power injections")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--dump-matrices", metavar="PATH")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="lvdcflow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_solve = sub.add_parser("solve", parents=[common], help="solve the power flow")
    p_solve.add_argument("--trace", metavar="PATH", help="per-iteration CSV")
    sub.add_parser("certify", parents=[common], help="contraction constant, no solve")
    p_sweep = sub.add_parser("sweep", parents=[common], help="load-scaling sweep as CSV")
    p_sweep.add_argument("--from", dest="m_from", type=_positive(float), default=0.1)
    p_sweep.add_argument("--to", dest="m_to", type=_positive(float), default=20.0)
    p_sweep.add_argument("--step", type=_positive(float), default=0.1)
    p_sweep.add_argument("--jobs", type=_positive(int), default=1)
    p_sweep.add_argument("--scale-loads-only", action="store_true",
                         help="scale only consuming terminals (p < 0)")
    p_sweep.add_argument("--warm-start", action="store_true")
    p_verify = sub.add_parser("verify", parents=[common], help="Newton and multistart checks")
    p_verify.add_argument("--starts", type=int, default=100)
    return parser


def _config(args, default_tol=1e-6) -> SolverConfig:
    return SolverConfig(
        tolerance=args.tol if args.tol is not None else default_tol,
        max_iterations=args.max_iter,
        method=Method(args.method),
        initial=args.flat_start,
        ball=VoltageBall(args.v_min, args.v_max),
    )


def _certificate_dict(rs, p, ball) -> dict:
    cert = certify(rs, p, ball)
    try:
        m_star = critical_multiplier(rs, p, ball)
    except ZeroLoad:
        m_star = None
    return {
        "alpha_global": cert.alpha_global,
        "alpha_nodal": cert.alpha_nodal,
        "worst_node": cert.worst_node,
        "contractive": cert.contractive,
        "v_min": ball.v_min,
        "v_max": ball.v_max,
        "critical_multiplier": m_star,
    }


def _emit(text: str, out) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = load_grid(args.grid)
        if args.command != "sweep" and args.load != 1.0:
            spec = scale_loads(spec, args.load)
        cfg = _config(args, VERIFY_DEFAULT_TOL if args.command == "verify" else 1e-6)
        prep = prepare(spec)
    except (OSError, GridError, ValueError) as exc:
        print(f"lvdcflow: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.dump_matrices:
        dump_matrices(prep.rs, args.dump_matrices)

    try:
        if args.command == "certify":
            _emit(dumps(_certificate_dict(prep.rs, prep.p, cfg.ball)) + "\n", args.out)
            return EXIT_OK

        if args.command == "solve":
            if args.trace:
                cfg = replace(cfg, keep_history=True)
            result = solve(prep.rs, prep.p, cfg)
            if args.trace:
                write_trace(result, args.trace)
            payload = {
                "grid": args.grid,
                "method": cfg.method.value,
                "converged": result.converged,
                "status": result.status,
                "iterations": result.iterations,
                "residual_norm": result.residual_norm,
                "left_ball": result.left_ball,
                "losses": result.losses,
                "slack_power": result.slack_power,
                "voltages": {str(k): v for k, v in result.node_voltages.items()},
                "certificate": _certificate_dict(prep.rs, prep.p, cfg.ball),
            }
            _emit(dumps(payload) + "\n", args.out)
            if not result.converged:
                print(f"lvdcflow: no convergence ({result.status})", file=sys.stderr)
                return EXIT_NOT_CONVERGED
            return EXIT_OK

        if args.command == "sweep":
            sweep_cfg = SweepConfig(args.m_from, args.m_to, args.step, cfg,
                                    loads_only=args.scale_loads_only, warm_start=args.warm_start)
            rows = load_sweep(spec, sweep_cfg, jobs=args.jobs)
            _emit(rows_to_csv(rows), args.out)
            return EXIT_OK

        if args.command == "verify":
            report = multistart_probe(prep.rs, prep.p, cfg, K=args.starts, seed=args.seed)
            payload = {
                "newton_v_p": list(report.newton_v_p),
                "newton_iterations": report.newton_iterations,
                "agreement_norm": report.agreement_norm,
                "multistart_spread": report.multistart_spread,
                "starts": report.starts,
                "converged_starts": report.converged_starts,
                "seed": args.seed,
                "tolerance": cfg.tolerance,
            }
            _emit(dumps(payload) + "\n", args.out)
            return EXIT_OK if report.passed() else EXIT_VERIFY_FAILED
    except (ValueError, GridError) as exc:
        print(f"lvdcflow: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SolverError as exc:
        print(f"lvdcflow: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    raise AssertionError(args.command)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
