"""Compiled versus pure-Python kernels.

    python benchmarks/bench_kernels.py [--sizes 50 200 800] [--repeat 5]

Times a batch of Gauss-Seidel sweeps and one Laplacian assembly on random
radial feeders. Both backends are imported directly, so the result does not
depend on LVDCFLOW_PURE_PYTHON.
"""

import argparse
import timeit

import numpy as np

from lvdcflow import _pykernels, prepare
from lvdcflow.synthetic import radial_feeder

try:
    from lvdcflow import _kernels
except ImportError:
    _kernels = None


def _gs_case(n, rng):
    prep = prepare(radial_feeder(n, rng))
    rs = prep.rs
    return (np.ascontiguousarray(rs.B), np.ascontiguousarray(rs.J),
            np.ascontiguousarray(prep.p, dtype=float))


def _time(fn, repeat):
    number, _ = timeit.Timer(fn).autorange()
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def bench(sizes, repeat, sweeps=10, seed=0):
    rng = np.random.default_rng(seed)
    backends = {"python": _pykernels}
    if _kernels is not None:
        backends["cython"] = _kernels
    rows = []
    for n in sizes:
        B, J, p = _gs_case(n, rng)
        spec = radial_feeder(n, rng)
        blocks = prepare(spec).blocks
        src, dst, g = blocks.branch_src, blocks.branch_dst, blocks.branch_g
        n_all = blocks.G.shape[0]
        for name, mod in backends.items():
            def gs():
                v = np.ones(len(p))
                for _ in range(sweeps):
                    mod.gauss_seidel_sweep(B, J, p, v)

            t_gs = _time(gs, repeat)
            t_lap = _time(lambda: mod.assemble_laplacian(n_all, src, dst, g), repeat)
            rows.append((n, name, t_gs, t_lap))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 200, 800])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sweeps", type=int, default=10)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled extension not built; timing the Python backend only")
    rows = bench(args.sizes, args.repeat, args.sweeps)
    print(f"{'n':>6} {'backend':>8} {'gs x' + str(args.sweeps) + ' [ms]':>14} {'laplacian [ms]':>15}")
    base = {}
    for n, name, t_gs, t_lap in rows:
        print(f"{n:>6} {name:>8} {1e3 * t_gs:>14.3f} {1e3 * t_lap:>15.3f}")
        base.setdefault(n, {})[name] = (t_gs, t_lap)
    for n, times in base.items():
        if "cython" in times:
            (pg, pl), (cg, cl) = times["python"], times["cython"]
            print(f"n={n}: speedup gs {pg / cg:.1f}x, laplacian {pl / cl:.1f}x")


if __name__ == "__main__":
    main()
