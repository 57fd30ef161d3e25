"""Random projection operators: sparse sign embeddings, subsampled fast
trigonometric transforms, and their composition.

Three operator families live here.

* :class:`SparseEmbedding` -- a k x n map with exactly one nonzero per
  column, value +-1, row chosen uniformly.  Applies to a vector in O(n)
  and to a sparse matrix in O(nnz).
* :class:`FastTransformSketch` -- a k x l map built from a random
  unit-modulus diagonal, a unitary fast transform (FFT over complex128,
  Walsh-Hadamard over float64) and a random subsample of k distinct
  output coordinates, rescaled by sqrt(pad/k) so that full sampling is
  an isometry.
* :class:`CompositeSketch` -- the product of the two: the sparse stage
  crushes n down to l cheaply, the transform stage mixes and reduces
  l down to k.

All randomness comes from the counter-based Philox generator, seeded
per object, so sketches are reproducible across platforms and can be
reconstructed from (dims, kind, seed) alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import _kernels as kernels
from .errors import ParameterError, ShapeError
from .matrix import COMPLEX, REAL, Matrix

#: seed offset separating the transform stage's stream from the sparse
#: stage's inside one composite sketch
STAGE_SEED_OFFSET = 1 << 32

FOURIER = "fourier"
HADAMARD = "hadamard"


def _rng(seed):
    return np.random.Generator(np.random.Philox(seed))


def _next_pow2(n):
    return 1 << (int(n) - 1).bit_length()


def transform_kind_for_field(field):
    """Transform flavor matching an element field: Walsh-Hadamard for
    real64 input, FFT for complex128."""
    if field == REAL:
        return HADAMARD
    if field == COMPLEX:
        return FOURIER
    raise ParameterError(f"unknown field {field!r}")


@dataclass(frozen=True, eq=False)
class SparseEmbedding:
    """Sparse sign embedding: column j carries the single entry
    ``sign[j]`` in row ``row_of[j]``."""

    out_dim: int
    in_dim: int
    row_of: np.ndarray
    sign: np.ndarray
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.out_dim <= self.in_dim:
            raise ParameterError(
                f"need 1 <= out_dim <= in_dim, got {self.out_dim}, {self.in_dim}")
        row_of = np.ascontiguousarray(self.row_of, dtype=np.int64)
        sign = np.ascontiguousarray(self.sign, dtype=np.float64)
        if row_of.shape != (self.in_dim,) or sign.shape != (self.in_dim,):
            raise ShapeError("row_of and sign must have length in_dim")
        if row_of.min() < 0 or row_of.max() >= self.out_dim:
            raise ParameterError("row_of entries must lie in [0, out_dim)")
        if not np.all(np.abs(sign) == 1.0):
            raise ParameterError("sign entries must be +-1")
        row_of.flags.writeable = False
        sign.flags.writeable = False
        object.__setattr__(self, "row_of", row_of)
        object.__setattr__(self, "sign", sign)

    @property
    def shape(self):
        return (self.out_dim, self.in_dim)

    def row_counts(self):
        """Number of stored entries in each output row."""
        return np.bincount(self.row_of, minlength=self.out_dim)

    def materialize(self) -> Matrix:
        """The embedding as a dense float64 matrix."""
        a = np.zeros((self.out_dim, self.in_dim), order="F")
        a[self.row_of, np.arange(self.in_dim)] = self.sign
        return Matrix._owned(a)


def build_sem(k, n, seed) -> SparseEmbedding:
    """Draw a k x n sparse sign embedding.

    Row choices are i.i.d. uniform over the k rows, signs i.i.d.
    uniform +-1; the draw is a pure function of ``seed``.
    """
    if not 1 <= k <= n:
        raise ParameterError(f"need 1 <= k <= n, got k={k}, n={n}")
    g = _rng(seed)
    row_of = g.integers(0, k, size=n)
    sign = (g.integers(0, 2, size=n) * 2 - 1).astype(np.float64)
    return SparseEmbedding(int(k), int(n), row_of, sign, seed=int(seed))


def sem_singular_values(s: SparseEmbedding) -> np.ndarray:
    """All ``out_dim`` singular values of ``s``, descending.

    Computed exactly from the row occupancy counts: S S* is diagonal
    with the counts on the diagonal, so the spectrum is their square
    roots.  No numerical factorization is involved.
    """
    return np.sort(np.sqrt(s.row_counts().astype(np.float64)))[::-1]


def norm_bound_C(n, k) -> float:
    """High-probability bound on the largest singular value of a k x n
    sparse sign embedding: sqrt(n/k + sqrt(2 (n/k) ln k)).

    The bound is the square root of the classical balls-into-bins
    estimate of the maximal row occupancy; it is asymptotic in k and
    has no safety margin at moderate k (see the Monte-Carlo tests).
    """
    if k < 2:
        raise ParameterError(f"need k >= 2, got {k}")
    if k > n:
        raise ParameterError(f"need k <= n, got k={k}, n={n}")
    ratio = n / k
    return math.sqrt(ratio + math.sqrt(2.0 * ratio * math.log(k)))


@dataclass(frozen=True, eq=False)
class FastTransformSketch:
    """Subsampled fast transform: scale * Sample(T(diag(phase) x), idx)
    with T the unitary FFT (fourier) or Walsh-Hadamard/sqrt(pad)
    (hadamard) of length ``pad``.

    Inputs of length ``in_dim`` are zero-padded up to ``pad``; hadamard
    requires ``pad`` to be the next power of two, fourier uses
    ``pad == in_dim``.  ``scale = sqrt(pad / out_dim)`` makes the fully
    sampled sketch an isometry.
    """

    out_dim: int
    in_dim: int
    phase: np.ndarray
    sample_idx: np.ndarray
    pad: int
    scale: float
    kind: str
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (FOURIER, HADAMARD):
            raise ParameterError(f"unknown transform kind {self.kind!r}")
        if not 1 <= self.in_dim <= self.pad:
            raise ParameterError("need 1 <= in_dim <= pad")
        if not 1 <= self.out_dim <= self.pad:
            raise ParameterError("need 1 <= out_dim <= pad")
        if self.kind == HADAMARD and self.pad & (self.pad - 1):
            raise ParameterError("hadamard transform length must be a power of two")
        dtype = np.float64 if self.kind == HADAMARD else np.complex128
        phase = np.ascontiguousarray(self.phase, dtype=dtype)
        idx = np.ascontiguousarray(self.sample_idx, dtype=np.int64)
        if phase.shape != (self.in_dim,):
            raise ShapeError("phase must have length in_dim")
        if not np.allclose(np.abs(phase), 1.0, rtol=0, atol=1e-12):
            raise ParameterError("phase entries must have unit modulus")
        if idx.shape != (self.out_dim,) or np.unique(idx).size != self.out_dim:
            raise ParameterError("sample_idx must hold out_dim distinct indices")
        if idx.min() < 0 or idx.max() >= self.pad:
            raise ParameterError("sample_idx entries must lie in [0, pad)")
        phase.flags.writeable = False
        idx.flags.writeable = False
        object.__setattr__(self, "phase", phase)
        object.__setattr__(self, "sample_idx", idx)

    @property
    def shape(self):
        return (self.out_dim, self.in_dim)

    @property
    def field(self):
        return REAL if self.kind == HADAMARD else COMPLEX

    def materialize(self) -> Matrix:
        """The sketch as a dense out_dim x in_dim matrix."""
        t = _transform_matrix(self.kind, self.pad)
        a = self.scale * t[self.sample_idx, :self.in_dim] * self.phase
        return Matrix._owned(a)


def _transform_matrix(kind, pad):
    if kind == HADAMARD:
        from scipy.linalg import hadamard

        return hadamard(pad).astype(np.float64) / math.sqrt(pad)
    from scipy.linalg import dft

    return dft(pad, scale="sqrtn")


def build_fast_transform(k, l, kind, seed) -> FastTransformSketch:
    """Draw a k x l subsampled fast transform.

    Fourier phases are uniform on the complex unit circle; hadamard
    phases are uniform +-1.  The k output coordinates are sampled
    without replacement from the ``pad`` transform outputs.
    """
    if kind not in (FOURIER, HADAMARD):
        raise ParameterError(f"unknown transform kind {kind!r}")
    if l < 1:
        raise ParameterError(f"need l >= 1, got {l}")
    pad = _next_pow2(l) if kind == HADAMARD else int(l)
    if not 1 <= k <= pad:
        raise ParameterError(f"need 1 <= k <= {pad}, got k={k}")
    g = _rng(seed)
    if kind == HADAMARD:
        phase = (g.integers(0, 2, size=l) * 2 - 1).astype(np.float64)
    else:
        phase = np.exp(2j * np.pi * g.random(size=l))
    sample_idx = g.permutation(pad)[:k]
    return FastTransformSketch(int(k), int(l), phase, sample_idx, pad,
                               math.sqrt(pad / k), kind, seed=int(seed))


@dataclass(frozen=True, eq=False)
class CompositeSketch:
    """Two-stage sketch: the sparse stage followed by the fast
    transform stage."""

    sem: SparseEmbedding
    fast: FastTransformSketch

    def __post_init__(self):
        if self.fast.in_dim != self.sem.out_dim:
            raise ShapeError(
                f"stage mismatch: transform expects {self.fast.in_dim} inputs, "
                f"embedding produces {self.sem.out_dim}")

    @property
    def out_dim(self):
        return self.fast.out_dim

    @property
    def in_dim(self):
        return self.sem.in_dim

    @property
    def shape(self):
        return (self.out_dim, self.in_dim)

    def materialize(self) -> Matrix:
        a = self.fast.materialize().to_dense() @ self.sem.materialize().to_dense()
        return Matrix._owned(a)


def build_composite(k, l, n, kind, seed) -> CompositeSketch:
    """Draw a k x n composite sketch with inner dimension l.

    The sparse stage uses ``seed`` directly, the transform stage uses
    ``seed + STAGE_SEED_OFFSET`` so the two streams never overlap.
    """
    return CompositeSketch(
        build_sem(l, n, seed),
        build_fast_transform(k, l, kind, seed + STAGE_SEED_OFFSET),
    )


# ---------------------------------------------------------------------------
# application


def apply_sem_adjoint_right(a: Matrix, s: SparseEmbedding) -> Matrix:
    """``a @ s.T`` without materializing ``s``.

    Column t of the result is the signed sum of the columns of ``a``
    that the embedding hashes to row t.  Costs O(nnz) for sparse input,
    O(rows*cols) for dense.
    """
    if s.in_dim != a.cols:
        raise ShapeError(f"embedding expects {s.in_dim} columns, got {a.cols}")
    out = np.zeros((a.rows, s.out_dim), dtype=a.dtype, order="F")
    if a.is_sparse:
        raw = a.raw
        kernels.sem_gather_csc(raw.data, raw.indices, raw.indptr,
                               s.row_of, s.sign, out)
    else:
        kernels.sem_gather_dense(a.raw, s.row_of, s.sign, out)
    return Matrix._owned(out)


def _sem_mul_left(s: SparseEmbedding, a: Matrix) -> np.ndarray:
    # s @ a as a dense (out_dim, cols) array
    out = np.zeros((s.out_dim, a.cols), dtype=a.dtype, order="F")
    if a.is_sparse:
        raw = a.raw
        kernels.sem_scatter_csc(raw.data, raw.indices, raw.indptr,
                                s.row_of, s.sign, out)
    else:
        kernels.sem_scatter_dense(a.raw, s.row_of, s.sign, out)
    return out


def _check_kind(f: FastTransformSketch, field):
    if f.field != field:
        raise ParameterError(
            f"{f.kind} sketch cannot be applied to {field} data")


def _fast_adjoint_right(b: np.ndarray, f: FastTransformSketch) -> np.ndarray:
    # b @ f*; per row: conjugate phases, inverse unitary transform, sample
    m = b.shape[0]
    mult = f.scale
    if f.kind == HADAMARD:
        x = np.zeros((m, f.pad))
        x[:, :f.in_dim] = b * f.phase
        kernels.fwht_rows(x)
        mult = f.scale / math.sqrt(f.pad)
    else:
        x = np.zeros((m, f.pad), dtype=np.complex128)
        x[:, :f.in_dim] = b * np.conj(f.phase)
        x = np.fft.ifft(x, axis=1, norm="ortho")
    return x[:, f.sample_idx] * mult


def _fast_mul_left(m: np.ndarray, f: FastTransformSketch) -> np.ndarray:
    # f @ m; per column: phases, forward unitary transform, sample
    c = m.shape[1]
    if f.kind == HADAMARD:
        x = np.zeros((c, f.pad))
        x[:, :f.in_dim] = m.T * f.phase
        kernels.fwht_rows(x)
        return np.asfortranarray((x[:, f.sample_idx] * (f.scale / math.sqrt(f.pad))).T)
    x = np.zeros((f.pad, c), dtype=np.complex128)
    x[:f.in_dim, :] = m * f.phase[:, None]
    y = np.fft.fft(x, axis=0, norm="ortho")
    return np.asfortranarray(y[f.sample_idx, :] * f.scale)


def apply_fast_adjoint_right(b: Matrix, f: FastTransformSketch) -> Matrix:
    """``b @ f*``: entrywise conjugated phases, the length-``pad``
    unitary fast transform of every row, then the sampled coordinates
    times ``scale``.  Runtime O(rows * pad * log pad)."""
    if f.in_dim != b.cols:
        raise ShapeError(f"sketch expects {f.in_dim} columns, got {b.cols}")
    _check_kind(f, b.field)
    return Matrix._owned(_fast_adjoint_right(b.to_dense(), f))


def apply_sketch_right(a: Matrix, omega: CompositeSketch) -> Matrix:
    """``a @ omega*`` in two stages; O(nnz(a) + rows * pad * log pad)."""
    if omega.in_dim != a.cols:
        raise ShapeError(f"sketch expects {omega.in_dim} columns, got {a.cols}")
    _check_kind(omega.fast, a.field)
    b = apply_sem_adjoint_right(a, omega.sem)
    return Matrix._owned(_fast_adjoint_right(b.raw, omega.fast))


def apply_sketch_left(omega: CompositeSketch, a: Matrix) -> Matrix:
    """``omega @ a``: signed rows of ``a`` scattered into the inner
    dimension, then the fast transform down every column."""
    if omega.in_dim != a.rows:
        raise ShapeError(f"sketch expects {omega.in_dim} rows, got {a.rows}")
    _check_kind(omega.fast, a.field)
    sa = _sem_mul_left(omega.sem, a)
    return Matrix._owned(_fast_mul_left(sa, omega.fast))


# ---------------------------------------------------------------------------
# statistical validation


def empirical_embedding_quality(sketch, u: Matrix, trials, seed):
    """Extreme singular values of ``sketch_t @ u`` over freshly drawn
    sketches.

    ``sketch`` fixes the family (type, dimensions, transform kind);
    trial t redraws it with seed ``seed + t``.  ``u`` must have
    orthonormal columns.  Returns a (trials, 2) array whose rows are
    (sigma_min, sigma_max).
    """
    from .factor import singular_values

    if trials < 1:
        raise ParameterError("need at least one trial")
    ud = u.to_dense()
    gram = ud.conj().T @ ud
    if np.max(np.abs(gram - np.eye(u.cols))) > 1e-10:
        raise ParameterError("columns of u are not orthonormal")

    if isinstance(sketch, SparseEmbedding):
        if sketch.in_dim != u.rows:
            raise ShapeError("embedding dimension does not match u")
        draw = lambda s: build_sem(sketch.out_dim, sketch.in_dim, s)
        apply_ = lambda sk: _sem_mul_left(sk, u)
    elif isinstance(sketch, FastTransformSketch):
        if sketch.in_dim != u.rows:
            raise ShapeError("sketch dimension does not match u")
        _check_kind(sketch, u.field)
        draw = lambda s: build_fast_transform(sketch.out_dim, sketch.in_dim,
                                              sketch.kind, s)
        apply_ = lambda sk: _fast_mul_left(ud, sk)
    elif isinstance(sketch, CompositeSketch):
        if sketch.in_dim != u.rows:
            raise ShapeError("sketch dimension does not match u")
        _check_kind(sketch.fast, u.field)
        draw = lambda s: build_composite(sketch.out_dim, sketch.sem.out_dim,
                                         sketch.in_dim, sketch.fast.kind, s)
        apply_ = lambda sk: _fast_mul_left(_sem_mul_left(sk.sem, u), sk.fast)
    else:
        raise ParameterError(f"unknown sketch family {type(sketch).__name__}")

    out = np.empty((trials, 2))
    for t in range(trials):
        sv = singular_values(Matrix._owned(apply_(draw(seed + t))))
        out[t, 0] = sv[-1]
        out[t, 1] = sv[0]
    return out
