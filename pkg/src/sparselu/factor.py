"""Deterministic dense factorizations: pivoted rectangular LU (row and
column variants), left pseudo-inverse, singular values and tail energy.

Pivot selection is deterministic everywhere (ties broken by the lowest
index), so factorizations are reproducible across thread counts.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

from .errors import ParameterError, ShapeError, SingularMatrixError
from .matrix import Matrix, Permutation

#: a pivot column/row whose largest modulus is below this times the
#: input Frobenius norm is left uneliminated (zero multipliers), so
#: exactly low-rank inputs factor cleanly instead of dividing noise.
PIVOT_RTOL = 1e-14

#: relative rank-deficiency threshold of the left pseudo-inverse
RANK_RTOL = 1e-10


class PivotedLU:
    """Row-pivoted factorization P B = L U with unit lower-trapezoidal
    L (subdiagonal moduli <= 1) and square upper-triangular U."""

    __slots__ = ("P", "L", "U")

    def __init__(self, P: Permutation, L: Matrix, U: Matrix):
        self.P = P
        self.L = L
        self.U = U


class ColPivotedLU:
    """Column-pivoted factorization M Q = L U with unit lower-triangular
    L and upper-trapezoidal U."""

    __slots__ = ("Q", "L", "U")

    def __init__(self, Q: Permutation, L: Matrix, U: Matrix):
        self.Q = Q
        self.L = L
        self.U = U


def lu_row_pivot(b: Matrix) -> PivotedLU:
    """Gaussian elimination with partial row pivoting of a tall matrix.

    At step i the pivot is the largest-modulus entry of the working
    column (ties: smallest row index).  When the whole working column is
    below ``PIVOT_RTOL`` times ||b||_F the step eliminates nothing and
    the corresponding U row stays (numerically) zero.
    """
    m, k = b.shape
    if m < k:
        raise ShapeError(f"need rows >= cols, got {m} x {k}")
    w = np.array(b.to_dense(), order="F")
    perm = np.arange(m)
    thresh = PIVOT_RTOL * np.linalg.norm(w)
    for i in range(k):
        p = i + int(np.argmax(np.abs(w[i:, i])))
        if p != i:
            w[[i, p], :] = w[[p, i], :]
            perm[[i, p]] = perm[[p, i]]
        piv = w[i, i]
        if abs(piv) > thresh:
            w[i + 1:, i] /= piv
            w[i + 1:, i + 1:] -= np.outer(w[i + 1:, i], w[i, i + 1:])
        else:
            w[i + 1:, i] = 0.0
    lower = np.tril(w[:, :k], -1)
    lower[np.arange(k), np.arange(k)] = 1.0
    return PivotedLU(Permutation(perm), Matrix._owned(lower),
                     Matrix._owned(np.triu(w[:k, :k])))


def lu_col_pivot(mat: Matrix) -> ColPivotedLU:
    """Gaussian elimination with partial column pivoting of a wide
    matrix.

    At step i the pivot column maximizes the modulus within the working
    row (ties: smallest column index) and is swapped into position i;
    elimination below the diagonal then proceeds as usual, with the same
    near-zero handling as :func:`lu_row_pivot`.
    """
    k, n = mat.shape
    if k > n:
        raise ShapeError(f"need rows <= cols, got {k} x {n}")
    w = np.array(mat.to_dense(), order="F")
    q = np.arange(n)
    thresh = PIVOT_RTOL * np.linalg.norm(w)
    for i in range(k):
        p = i + int(np.argmax(np.abs(w[i, i:])))
        if p != i:
            w[:, [i, p]] = w[:, [p, i]]
            q[[i, p]] = q[[p, i]]
        piv = w[i, i]
        if abs(piv) > thresh:
            w[i + 1:, i] /= piv
            w[i + 1:, i + 1:] -= np.outer(w[i + 1:, i], w[i, i + 1:])
        else:
            w[i + 1:, i] = 0.0
    lower = np.tril(w[:, :k], -1)
    lower[np.arange(k), np.arange(k)] = 1.0
    return ColPivotedLU(Permutation(q), Matrix._owned(lower),
                        Matrix._owned(np.triu(w)))


def left_pseudo_inverse(mat: Matrix) -> Matrix:
    """Moore-Penrose left inverse of a tall full-column-rank matrix.

    Computed from a Householder QR factorization (never the normal
    equations).  Raises :class:`SingularMatrixError` when the singular
    value ratio drops below ``RANK_RTOL``.
    """
    p, q = mat.shape
    if p < q:
        raise ShapeError(f"need rows >= cols, got {p} x {q}")
    qf, rf = np.linalg.qr(mat.to_dense(), mode="reduced")
    sv = np.linalg.svd(rf, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] <= RANK_RTOL * sv[0]:
        cond = float("inf") if sv[-1] == 0.0 else float(sv[0] / sv[-1])
        raise SingularMatrixError(
            f"matrix is numerically rank deficient "
            f"(condition estimate {cond:.3e})", cond=cond)
    pinv = solve_triangular(rf, qf.conj().T)
    return Matrix._owned(pinv)


def singular_values(a: Matrix) -> np.ndarray:
    """Full singular spectrum, descending.  Dense LAPACK reduction;
    sparse input is densified first (this routine is the library's
    test oracle, sizes stay moderate)."""
    return np.linalg.svd(a.to_dense(), compute_uv=False)


def tail_energy(sigma, r) -> float:
    """sqrt of the energy past the first r singular values:
    sqrt(sum_{i>r} sigma_i^2).  ``tail_energy(sigma, 0)`` is the
    Frobenius norm of the matrix behind ``sigma``."""
    s = np.asarray(sigma, dtype=np.float64)
    if s.ndim != 1:
        raise ParameterError("sigma must be a 1-d array")
    if np.any(s[1:] > s[:-1]):
        raise ParameterError("sigma must be non-increasing")
    if not 0 <= r <= s.size:
        raise ParameterError(f"r must lie in [0, {s.size}], got {r}")
    return float(np.sqrt(np.sum(s[int(r):] ** 2)))
