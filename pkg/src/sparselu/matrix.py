"""Dense and sparse matrix storage, permutations, norms and products.

Matrices are immutable after construction.  Dense storage is column
ordered (Fortran layout) and sparse storage is compressed sparse column,
because every hot kernel in this library walks columns.  Only float64
and complex128 elements are supported; NaN and Inf are rejected at
construction so that pivot selection downstream is always well defined.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse import csc_array, issparse

from .errors import ShapeError

REAL = "real64"
COMPLEX = "complex128"

_FIELD_DTYPES = {REAL: np.float64, COMPLEX: np.complex128}


def field_of_dtype(dtype):
    """Map a numpy dtype to the element field name it belongs to."""
    if np.issubdtype(dtype, np.complexfloating):
        return COMPLEX
    return REAL


def dtype_of_field(field):
    try:
        return _FIELD_DTYPES[field]
    except KeyError:
        raise ValueError(f"unknown field {field!r}") from None


def _coerce_dtype(dtype):
    if np.issubdtype(dtype, np.complexfloating):
        return np.complex128
    if np.issubdtype(dtype, np.number) or np.issubdtype(dtype, np.bool_):
        return np.float64
    raise ValueError(f"unsupported element dtype {dtype}")


class Matrix:
    """A rows x cols matrix over float64 or complex128.

    Wraps either a Fortran-ordered ndarray or a scipy CSC array; both
    are frozen read-only.  Construction always copies caller data.
    """

    __slots__ = ("_a", "rows", "cols")

    def __init__(self, data):
        if issparse(data):
            a = csc_array(data, copy=True)
            if a.shape[0] < 1 or a.shape[1] < 1:
                raise ShapeError("matrix dimensions must be positive")
            a = a.astype(_coerce_dtype(a.dtype), copy=False)
            a.sum_duplicates()
            a.sort_indices()
            # int64 indices keep the compiled kernels free of casts
            a.indices = np.ascontiguousarray(a.indices, dtype=np.int64)
            a.indptr = np.ascontiguousarray(a.indptr, dtype=np.int64)
            if a.nnz and not np.all(np.isfinite(a.data)):
                raise ValueError("matrix entries must be finite")
            _freeze_sparse(a)
        else:
            arr = np.asarray(data)
            if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
                raise ShapeError("expected a 2-d array with positive dimensions")
            a = np.array(arr, dtype=_coerce_dtype(arr.dtype), order="F")
            if not np.all(np.isfinite(a)):
                raise ValueError("matrix entries must be finite")
            a.flags.writeable = False
        self._a = a
        self.rows, self.cols = a.shape

    @classmethod
    def dense(cls, data):
        """Build a dense matrix from an array-like."""
        if issparse(data):
            data = data.toarray()
        return cls(np.asarray(data))

    @classmethod
    def sparse(cls, data):
        """Build a CSC sparse matrix from a scipy sparse or array-like."""
        if not issparse(data):
            data = csc_array(np.atleast_2d(np.asarray(data)))
        return cls(data)

    @classmethod
    def _owned(cls, arr):
        # internal: wrap a freshly computed ndarray without re-copying
        self = object.__new__(cls)
        a = np.asfortranarray(arr, dtype=_coerce_dtype(arr.dtype))
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix entries must be finite")
        if a.flags.writeable:
            a.flags.writeable = False
        self._a = a
        self.rows, self.cols = a.shape
        return self

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def dtype(self):
        return self._a.dtype

    @property
    def field(self):
        return field_of_dtype(self._a.dtype)

    @property
    def is_sparse(self):
        return issparse(self._a)

    @property
    def nnz(self):
        return int(self._a.nnz) if self.is_sparse else self.rows * self.cols

    @property
    def raw(self):
        """Underlying (read-only) ndarray or CSC array."""
        return self._a

    def to_dense(self):
        """Column-ordered ndarray of the entries.  A read-only view for
        dense storage, a fresh array for sparse storage."""
        if self.is_sparse:
            return np.asfortranarray(self._a.toarray(order="F"))
        return self._a

    def to_sparse(self):
        if self.is_sparse:
            return self._a
        return csc_array(self._a)

    def __repr__(self):
        kind = "sparse" if self.is_sparse else "dense"
        return f"Matrix({self.rows}x{self.cols}, {self.field}, {kind})"


def _freeze_sparse(a):
    a.data.flags.writeable = False
    a.indices.flags.writeable = False
    a.indptr.flags.writeable = False


class Permutation:
    """A bijection on {0, ..., size-1} stored as an index vector.

    Applied to rows as ``out[i, :] = a[indices[i], :]``; the same
    convention, transposed, applies to columns.
    """

    __slots__ = ("indices",)

    def __init__(self, indices):
        idx = np.array(indices, dtype=np.int64)
        if idx.ndim != 1 or idx.size < 1:
            raise ShapeError("permutation needs a non-empty 1-d index vector")
        if idx.min() < 0 or idx.max() >= idx.size or \
                not np.all(np.bincount(idx, minlength=idx.size) == 1):
            raise ValueError("indices are not a bijection on {0,...,size-1}")
        idx.flags.writeable = False
        self.indices = idx

    @classmethod
    def identity(cls, size):
        return cls(np.arange(size))

    @property
    def size(self):
        return int(self.indices.size)

    def inverse(self):
        inv = np.empty_like(self.indices)
        inv[self.indices] = np.arange(self.size)
        return Permutation(inv)

    def __eq__(self, other):
        return isinstance(other, Permutation) and np.array_equal(
            self.indices, other.indices)

    def __repr__(self):
        return f"Permutation(size={self.size})"


def frobenius_norm(a: Matrix) -> float:
    """Square root of the sum of squared entry moduli."""
    if a.is_sparse:
        return float(np.linalg.norm(a.raw.data)) if a.nnz else 0.0
    return float(np.linalg.norm(a.raw))


def permute_rows(p: Permutation, a: Matrix) -> Matrix:
    """Row i of the result is row ``p.indices[i]`` of ``a``."""
    if p.size != a.rows:
        raise ShapeError(f"permutation size {p.size} != row count {a.rows}")
    if a.is_sparse:
        return Matrix(a.raw[p.indices, :])
    return Matrix._owned(a.raw[p.indices, :])


def permute_cols(a: Matrix, q: Permutation) -> Matrix:
    """Column t of the result is column ``q.indices[t]`` of ``a``."""
    if q.size != a.cols:
        raise ShapeError(f"permutation size {q.size} != column count {a.cols}")
    if a.is_sparse:
        return Matrix(a.raw[:, q.indices])
    return Matrix._owned(a.raw[:, q.indices])


def matmul(a: Matrix, b: Matrix) -> Matrix:
    """Matrix product; any mix of dense and sparse operands.

    A sparse operand contributes cost proportional to its stored entry
    count.  Mixed real/complex operands promote to complex128.
    """
    if a.cols != b.rows:
        raise ShapeError(f"inner dimensions differ: {a.shape} x {b.shape}")
    out = a.raw @ b.raw
    if issparse(out):
        return Matrix(out)
    return Matrix._owned(out)
