"""Kernel backend selection.

The compiled extension is used when it was built; otherwise, or when
``LVDCFLOW_PURE_PYTHON`` is set to a non-empty value, the numpy fallback is
used. ``BACKEND`` names the active one.
"""

import os

import numpy as np

if os.environ.get("LVDCFLOW_PURE_PYTHON"):
    from . import _pykernels as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        from . import _pykernels as _impl

        BACKEND = "python"
    else:
        BACKEND = "cython"


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def _i64(a):
    return np.ascontiguousarray(a, dtype=np.int64)


def gauss_seidel_sweep(B, J, p, v):
    """Sweep ``v`` in place; ``v`` must already be a contiguous float64 array."""
    return _impl.gauss_seidel_sweep(B, J, p, v)


def assemble_laplacian(n, src, dst, g):
    return _impl.assemble_laplacian(int(n), _i64(src), _i64(dst), _f64(g))


def branch_losses(src, dst, g, v):
    return float(_impl.branch_losses(_i64(src), _i64(dst), _f64(g), _f64(v)))


def max_abs_diff(a, b):
    return float(_impl.max_abs_diff(_f64(a), _f64(b)))
