"""Pure-Python fallback for ``lvdcflow._kernels``."""

import numpy as np


def gauss_seidel_sweep(B, J, p, v):
    """One in-place sweep in ascending index order; returns max |step|."""
    worst = 0.0
    for k in range(v.shape[0]):
        off = B[k] @ v - B[k, k] * v[k]
        new = (p[k] / v[k] - J[k] - off) / B[k, k]
        step = abs(new - v[k])
        if step > worst or step != step:
            worst = step
        v[k] = new
    return float(worst)


def assemble_laplacian(n, src, dst, g):
    G = np.zeros((n, n))
    np.add.at(G, (src, src), g)
    np.add.at(G, (dst, dst), g)
    np.add.at(G, (src, dst), -g)
    np.add.at(G, (dst, src), -g)
    return G


def branch_losses(src, dst, g, v):
    dv = v[src] - v[dst]
    return float(np.sum(g * dv * dv))


def max_abs_diff(a, b):
    return float(np.max(np.abs(a - b), initial=0.0))
