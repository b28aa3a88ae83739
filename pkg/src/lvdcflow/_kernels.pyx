# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Signatures mirror ``lvdcflow._pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


def gauss_seidel_sweep(const double[:, ::1] B, const double[::1] J,
                       const double[::1] p, double[::1] v):
    """One in-place sweep in ascending index order; returns max |step|."""
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t k, j
    cdef double acc, new, step, worst = 0.0
    for k in range(n):
        acc = 0.0
        for j in range(n):
            if j != k:
                acc += B[k, j] * v[j]
        new = (p[k] / v[k] - J[k] - acc) / B[k, k]
        step = fabs(new - v[k])
        if step > worst or step != step:
            worst = step
        v[k] = new
    return worst


def assemble_laplacian(Py_ssize_t n, const cnp.int64_t[::1] src,
                       const cnp.int64_t[::1] dst, const double[::1] g):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] G = out
    cdef Py_ssize_t e, i, j
    for e in range(src.shape[0]):
        i = src[e]
        j = dst[e]
        G[i, i] += g[e]
        G[j, j] += g[e]
        G[i, j] -= g[e]
        G[j, i] -= g[e]
    return out


def branch_losses(const cnp.int64_t[::1] src, const cnp.int64_t[::1] dst,
                  const double[::1] g, const double[::1] v):
    cdef Py_ssize_t e
    cdef double dv, total = 0.0
    for e in range(src.shape[0]):
        dv = v[src[e]] - v[dst[e]]
        total += g[e] * dv * dv
    return total


def max_abs_diff(const double[::1] a, const double[::1] b):
    cdef Py_ssize_t k
    cdef double d, worst = 0.0
    for k in range(a.shape[0]):
        d = fabs(a[k] - b[k])
        if d > worst or d != d:
            worst = d
    return worst
