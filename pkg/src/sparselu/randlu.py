"""Randomized low-rank pivoted LU, end to end.

``sparse_randomized_lu`` runs the two-stage sketched pipeline:

1. draw a composite sketch (sparse embedding + fast transform) of the
   column space and project the input onto it from the right,
2. row-pivoted LU of the projection,
3. draw a second composite sketch of the row space, reduce the lower
   factor and the row-permuted input through it,
4. solve the reduced system via a left pseudo-inverse and factor the
   result with column pivoting,
5. multiply the two lower factors together.

The output satisfies ``P A Q ~= L U`` with L lower-trapezoidal and U
upper-trapezoidal.  A rank-deficient second-stage reduction (a
probability-epsilon sketching failure; with exactly low-rank input it
is typically caused by the sparse stage hashing two of the lower
factor's unit columns to the same row) triggers a resample of both
sketches with fresh sub-seeds, up to three times.

``gaussian_randomized_lu`` is the same pipeline with both structured
sketches replaced by dense i.i.d. Gaussian matrices; it serves as the
accuracy/runtime baseline.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import (DecompositionError, ParameterError, ShapeError,
                     SingularMatrixError)
from .factor import left_pseudo_inverse, lu_col_pivot, lu_row_pivot
from .matrix import (COMPLEX, REAL, Matrix, Permutation, dtype_of_field,
                     frobenius_norm, matmul, permute_rows)
from .sketch import (CompositeSketch, apply_sketch_left, apply_sketch_right,
                     build_composite, norm_bound_C, transform_kind_for_field)

logger = logging.getLogger(__name__)

#: resamples allowed after the initial attempt
MAX_RESAMPLES = 3


@dataclass(frozen=True)
class RandLuParams:
    """Sketch sizes and tuning knobs of the randomized LU.

    ``k1``/``l1`` size the column-space sketch (output/inner dimension),
    ``k2``/``l2`` the row-space sketch.  ``epsilon`` and ``delta``
    parameterize theoretical-mode size selection and the error-factor
    bound; practical mode carries them along unused.
    """

    r: int
    k1: int
    l1: int
    k2: int
    l2: int
    epsilon: float = 0.5
    delta: float = 0.1
    seed: int = 0
    field: str = REAL

    def __post_init__(self):
        if self.r < 1:
            raise ParameterError("target rank must be positive")
        if not self.r <= self.k1 <= self.k2:
            raise ParameterError(
                f"need r <= k1 <= k2, got r={self.r}, k1={self.k1}, k2={self.k2}")
        if not self.k1 < self.l1:
            raise ParameterError(f"need k1 < l1, got k1={self.k1}, l1={self.l1}")
        if not self.k2 < self.l2:
            raise ParameterError(f"need k2 < l2, got k2={self.k2}, l2={self.l2}")
        if not 0.0 < self.epsilon < 1.0:
            raise ParameterError("epsilon must lie in (0, 1)")
        if not 0.0 < self.delta < 1.0:
            raise ParameterError("delta must lie in (0, 1)")
        if self.field not in (REAL, COMPLEX):
            raise ParameterError(f"unknown field {self.field!r}")

    def check_against(self, m, n):
        """Validate the dimension-dependent invariants for an m x n target."""
        if self.l1 > n:
            raise ParameterError(f"l1={self.l1} exceeds column count {n}")
        if self.l2 > m:
            raise ParameterError(f"l2={self.l2} exceeds row count {m}")
        if self.k2 > m:
            raise ParameterError(f"k2={self.k2} exceeds row count {m}")
        if self.k1 > m:
            raise ParameterError(f"k1={self.k1} exceeds row count {m}")


@dataclass
class RandLuResult:
    """Factors P, Q, L, U with per-stage wall-clock seconds.

    ``elapsed`` keys: ``sketch1`` (first sketch build + right
    projection), ``lu1`` (row-pivoted LU), ``sketch2`` (second sketch
    build + both left projections), ``pinv`` (pseudo-inverse and the
    reduced product), ``lu2`` (column-pivoted LU + final L product) and
    ``total``.  On resampling, stage times are those of the successful
    attempt while ``total`` spans the whole call.
    """

    P: Permutation
    Q: Permutation
    L: Matrix
    U: Matrix
    elapsed: dict = dc_field(default_factory=dict)


def default_params(r, m, n, field=REAL, seed=0, mode="practical",
                   epsilon=0.5, delta=0.1) -> RandLuParams:
    """Sketch sizes for an m x n target of approximation rank r.

    Practical mode uses additive oversampling and a 4x inner expansion:
    ``k1 = min(n-1, r+8)``, ``k2 = min(m-1, k1+8)``, ``l1 = min(n, 4 k1)``,
    ``l2 = min(m, 4 k2)``.  Theoretical mode sizes the stages from the
    subspace-embedding bounds governed by ``epsilon`` and ``delta``
    (clamped to the matrix dimensions); it is far more expensive and
    exists for validation runs.
    """
    if not 0.0 < epsilon < 1.0:
        raise ParameterError("epsilon must lie in (0, 1)")
    if not 0.0 < delta < 1.0:
        raise ParameterError("delta must lie in (0, 1)")
    if mode == "practical":
        if not 1 <= r <= min(m, n) / 2:
            raise ParameterError(
                f"need 1 <= r <= min(m,n)/2, got r={r} for {m} x {n}")
        k1 = min(n - 1, r + 8)
        k2 = min(m - 1, k1 + 8)
        l1 = min(n, 4 * k1)
        l2 = min(m, 4 * k2)
        if not r <= k1 < k2:
            raise ParameterError(
                f"degenerate size: clamped defaults collide "
                f"(r={r}, k1={k1}, k2={k2} for {m} x {n})")
    elif mode == "theoretical":
        if not 1 <= r <= min(m, n):
            raise ParameterError(f"need 1 <= r <= min(m,n), got r={r}")
        re = r / epsilon
        k1 = max(r + 1, math.ceil(re * math.log(max(re, 2.0))))
        l1 = max(k1 + 1,
                 math.ceil(r * r * math.log(max(re, 2.0)) ** 6 + re))
        l2 = math.ceil((r * r + r) / ((2 * epsilon - epsilon ** 2) ** 2 * delta))
        k2 = math.ceil(4.0 * (math.sqrt(r) + math.sqrt(8.0 * math.log(r * l2)))
                       ** 2 * math.log(max(r, 2.0)))
        # clamp to the target dimensions, keeping the stage orderings
        l1 = min(l1, n)
        l2 = min(l2, m)
        k1 = min(k1, l1 - 1, m)
        k2 = min(max(k2, k1), l2 - 1, m - 1)
        if not (r <= k1 <= k2 and k1 < l1 and k2 < l2):
            raise ParameterError(
                f"theoretical sizes do not fit a {m} x {n} matrix at r={r}")
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    return RandLuParams(r=int(r), k1=int(k1), l1=int(l1), k2=int(k2),
                        l2=int(l2), epsilon=epsilon, delta=delta,
                        seed=int(seed), field=field)


class _CompositeOps:
    """Structured sketch pair for one pipeline attempt."""

    def __init__(self, params, m, n, seed1, seed2):
        kind = transform_kind_for_field(params.field)
        self.omega1 = build_composite(params.k1, params.l1, n, kind, seed1)
        self.omega2 = build_composite(params.k2, params.l2, m, kind, seed2)

    def project_right(self, a):
        return apply_sketch_right(a, self.omega1)

    def project_left(self, a):
        return apply_sketch_left(self.omega2, a)


class _GaussianOps:
    """Dense Gaussian sketch pair, applied by plain matrix products."""

    def __init__(self, params, m, n, seed1, seed2):
        dtype = dtype_of_field(params.field)
        self.g1 = Matrix._owned(_gaussian(params.k1, n, dtype, seed1))
        self.g2 = Matrix._owned(_gaussian(params.k2, m, dtype, seed2))

    def project_right(self, a):
        return matmul(a, Matrix._owned(self.g1.raw.conj().T))

    def project_left(self, a):
        return matmul(self.g2, a)


def _gaussian(k, n, dtype, seed):
    g = np.random.Generator(np.random.Philox(seed))
    if dtype == np.complex128:
        return np.asfortranarray(
            (g.standard_normal((k, n)) + 1j * g.standard_normal((k, n)))
            / math.sqrt(2.0))
    return np.asfortranarray(g.standard_normal((k, n)))


def sparse_randomized_lu(a: Matrix, params: RandLuParams) -> RandLuResult:
    """Randomized pivoted LU with structured (sparse + fast transform)
    projections.  Deterministic for fixed ``params`` in single-threaded
    mode; attempt ``t`` draws its two sketches from sub-seeds
    ``seed + 2t`` and ``seed + 2t + 1``."""
    return _pipeline(a, params, _CompositeOps)


def gaussian_randomized_lu(a: Matrix, params: RandLuParams) -> RandLuResult:
    """Same pipeline as :func:`sparse_randomized_lu` with dense Gaussian
    projections applied by plain matrix products."""
    return _pipeline(a, params, _GaussianOps)


def _pipeline(a, params, make_ops):
    m, n = a.shape
    params.check_against(m, n)
    if a.field != params.field:
        raise ParameterError(
            f"params.field={params.field} but matrix field is {a.field}")
    t_start = time.perf_counter()
    last_err = None
    for attempt in range(1 + MAX_RESAMPLES):
        try:
            result = _attempt(a, params, make_ops, attempt)
            result.elapsed["total"] = time.perf_counter() - t_start
            return result
        except SingularMatrixError as err:
            last_err = err
            logger.warning(
                "rank-deficient reduced system (attempt %d/%d, cond %.3e); "
                "resampling sketches", attempt + 1, 1 + MAX_RESAMPLES, err.cond)
    raise DecompositionError(
        f"reduced system stayed rank deficient after {MAX_RESAMPLES} resamples "
        f"(last condition estimate {last_err.cond:.3e}); the sketch sizes "
        f"k2={params.k2}, l2={params.l2} are likely too small") from last_err


def _attempt(a, params, make_ops, attempt):
    m, n = a.shape
    elapsed = {}
    tic = time.perf_counter()
    ops = make_ops(params, m, n, params.seed + 2 * attempt,
                   params.seed + 2 * attempt + 1)
    b = ops.project_right(a)
    elapsed["sketch1"] = time.perf_counter() - tic

    tic = time.perf_counter()
    first = lu_row_pivot(b)
    elapsed["lu1"] = time.perf_counter() - tic

    tic = time.perf_counter()
    reduced_l = ops.project_left(first.L)
    pa = permute_rows(first.P, a)
    reduced_a = ops.project_left(pa)
    elapsed["sketch2"] = time.perf_counter() - tic

    tic = time.perf_counter()
    pinv = left_pseudo_inverse(reduced_l)
    core = matmul(pinv, reduced_a)
    elapsed["pinv"] = time.perf_counter() - tic

    tic = time.perf_counter()
    second = lu_col_pivot(core)
    lfinal = matmul(first.L, second.L)
    elapsed["lu2"] = time.perf_counter() - tic

    return RandLuResult(P=first.P, Q=second.Q, L=lfinal, U=second.U,
                        elapsed=elapsed)


def approximation_error(a: Matrix, res: RandLuResult,
                        block_cols: int = 256) -> float:
    """``||L U - P A Q||_F`` evaluated in column blocks, never
    materializing the permuted matrix or the full product."""
    m, n = a.shape
    if res.L.rows != m or res.U.cols != n or res.L.cols != res.U.rows \
            or res.P.size != m or res.Q.size != n:
        raise ShapeError(
            f"factors {res.L.shape} x {res.U.shape} do not match "
            f"target {a.shape}")
    perm = res.P.indices
    cols = res.Q.indices
    ldense = res.L.to_dense()
    udense = res.U.to_dense()
    acc = 0.0
    for start in range(0, n, block_cols):
        sel = cols[start:start + block_cols]
        prod = ldense @ udense[:, start:start + block_cols]
        if a.is_sparse:
            block = a.raw[:, sel].toarray()[perm, :]
        else:
            block = a.raw[np.ix_(perm, sel)]
        acc += float(np.sum(np.abs(prod - block) ** 2))
    return math.sqrt(acc)


def theoretical_error_factor(epsilon, n, k2) -> float:
    """Worst-case multiplier on the rank-r tail energy implied by the
    two-stage analysis: ``1.48 (1+eps) (C(n,k2) / (0.4 (1-eps)) + 1)``."""
    if not 0.0 < epsilon < 1.0:
        raise ParameterError("epsilon must lie in (0, 1)")
    return 1.48 * (1.0 + epsilon) * (
        norm_bound_C(n, k2) / (0.4 * (1.0 - epsilon)) + 1.0)
