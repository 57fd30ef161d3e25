"""Pure numpy implementations of the hot kernels.

Selected by ``sparselu._kernels`` when the compiled extension is absent
or when ``SPARSELU_BACKEND=python`` is set.  Semantics match the
compiled versions; see that module for the reference loop definitions.
"""

import numpy as np

BACKEND = "python"


def fwht_rows(x):
    """In-place Walsh-Hadamard transform of every row of ``x``.

    ``x`` must be C-contiguous float64 with a power-of-two number of
    columns.  No normalization is applied.
    """
    m, n = x.shape
    h = 1
    while h < n:
        y = x.reshape(m, -1, 2, h)
        a = y[..., 0, :] + y[..., 1, :]
        b = y[..., 0, :] - y[..., 1, :]
        y[..., 0, :] = a
        y[..., 1, :] = b
        h *= 2


def sem_gather_dense(a, row_of, sign, out):
    """out[:, row_of[j]] += sign[j] * a[:, j] for every column j."""
    acc = np.zeros((out.shape[1], a.shape[0]), dtype=out.dtype)
    np.add.at(acc, row_of, (a * sign).T)
    out += acc.T


def sem_gather_csc(data, indices, indptr, row_of, sign, out):
    """CSC variant of :func:`sem_gather_dense`; cost O(nnz)."""
    n = indptr.size - 1
    l = out.shape[1]
    cols = np.repeat(np.arange(n), np.diff(indptr))
    flat = indices * l + row_of[cols]
    w = data * sign[cols]
    size = out.shape[0] * l
    if np.iscomplexobj(out):
        acc = np.bincount(flat, weights=w.real, minlength=size).astype(out.dtype)
        acc += 1j * np.bincount(flat, weights=w.imag, minlength=size)
    else:
        acc = np.bincount(flat, weights=w, minlength=size)
    out += acc.reshape(out.shape)


def sem_scatter_dense(a, row_of, sign, out):
    """out[row_of[i], :] += sign[i] * a[i, :] for every row i."""
    acc = np.zeros(out.shape, dtype=out.dtype)
    np.add.at(acc, row_of, a * sign[:, None])
    out += acc


def sem_scatter_csc(data, indices, indptr, row_of, sign, out):
    """CSC variant of :func:`sem_scatter_dense`; cost O(nnz)."""
    n = indptr.size - 1
    cols = np.repeat(np.arange(n), np.diff(indptr))
    flat = row_of[indices] * n + cols
    w = data * sign[indices]
    size = out.shape[0] * n
    if np.iscomplexobj(out):
        acc = np.bincount(flat, weights=w.real, minlength=size).astype(out.dtype)
        acc += 1j * np.bincount(flat, weights=w.imag, minlength=size)
    else:
        acc = np.bincount(flat, weights=w, minlength=size)
    out += acc.reshape(out.shape)
