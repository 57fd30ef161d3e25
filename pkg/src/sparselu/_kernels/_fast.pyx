# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: Walsh-Hadamard butterflies and the one-entry-
per-column sign-embedding gather/scatter loops.

These are the reference definitions; ``_py`` mirrors them with
vectorized numpy.  All loops accumulate in ascending source-column
order, so both lanes produce the same floating point sums up to
reassociation-free rounding.
"""

import numpy as np

cimport cython
from libc.stdint cimport int64_t

ctypedef fused value_t:
    double
    double complex

BACKEND = "compiled"


def fwht_rows(double[:, ::1] x):
    """In-place Walsh-Hadamard transform of every row of ``x``.

    ``x`` must be C-contiguous float64 with a power-of-two number of
    columns.  No normalization is applied.
    """
    cdef Py_ssize_t m = x.shape[0], n = x.shape[1]
    cdef Py_ssize_t i, j, start, h
    cdef double a, b
    for i in range(m):
        h = 1
        while h < n:
            for start in range(0, n, 2 * h):
                for j in range(start, start + h):
                    a = x[i, j]
                    b = x[i, j + h]
                    x[i, j] = a + b
                    x[i, j + h] = a - b
            h *= 2


def sem_gather_dense(const value_t[::1, :] a, const int64_t[::1] row_of,
                     const double[::1] sign, value_t[::1, :] out):
    """out[:, row_of[j]] += sign[j] * a[:, j] for every column j."""
    cdef Py_ssize_t m = a.shape[0], n = a.shape[1]
    cdef Py_ssize_t i, j, t
    cdef double s
    for j in range(n):
        t = row_of[j]
        s = sign[j]
        for i in range(m):
            out[i, t] = out[i, t] + s * a[i, j]


def sem_gather_csc(const value_t[::1] data, const int64_t[::1] indices,
                   const int64_t[::1] indptr, const int64_t[::1] row_of,
                   const double[::1] sign, value_t[::1, :] out):
    """CSC variant of :func:`sem_gather_dense`; cost O(nnz)."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t j, p, t
    cdef double s
    for j in range(n):
        t = row_of[j]
        s = sign[j]
        for p in range(indptr[j], indptr[j + 1]):
            out[indices[p], t] = out[indices[p], t] + s * data[p]


def sem_scatter_dense(const value_t[::1, :] a, const int64_t[::1] row_of,
                      const double[::1] sign, value_t[::1, :] out):
    """out[row_of[i], :] += sign[i] * a[i, :] for every row i."""
    cdef Py_ssize_t m = a.shape[0], n = a.shape[1]
    cdef Py_ssize_t i, j
    for j in range(n):
        for i in range(m):
            out[row_of[i], j] = out[row_of[i], j] + sign[i] * a[i, j]


def sem_scatter_csc(const value_t[::1] data, const int64_t[::1] indices,
                    const int64_t[::1] indptr, const int64_t[::1] row_of,
                    const double[::1] sign, value_t[::1, :] out):
    """CSC variant of :func:`sem_scatter_dense`; cost O(nnz)."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t i, j, p
    for j in range(n):
        for p in range(indptr[j], indptr[j + 1]):
            i = indices[p]
            out[row_of[i], j] = out[row_of[i], j] + sign[i] * data[p]
