"""Matrix Market reader and writer.

Supports the two layouts this library exchanges: ``array`` (dense,
column-major values) and ``coordinate`` (sparse triplets), over the
``real`` and ``complex`` fields, ``general`` symmetry only.  Values are
written with 17 significant digits so float64 entries round-trip
bit-exactly.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse import csc_array

from .errors import MatrixMarketError
from .matrix import Matrix

_BANNER = "%%MatrixMarket"


def mm_read(path) -> Matrix:
    """Read a Matrix Market file.

    ``coordinate`` files produce sparse matrices (duplicate entries are
    summed), ``array`` files produce dense ones.  Malformed input raises
    :class:`MatrixMarketError` carrying the offending line number.
    """
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise MatrixMarketError("empty file", line=0)

    header = lines[0].split()
    if len(header) != 5 or header[0] != _BANNER or header[1].lower() != "matrix":
        raise MatrixMarketError(
            f"malformed header, expected '{_BANNER} matrix <format> <field> "
            f"<symmetry>'", line=1)
    layout, field, symmetry = (tok.lower() for tok in header[2:])
    if layout not in ("coordinate", "array"):
        raise MatrixMarketError(f"unsupported format {layout!r}", line=1)
    if field not in ("real", "complex"):
        raise MatrixMarketError(f"unsupported field {field!r}", line=1)
    if symmetry != "general":
        raise MatrixMarketError(f"unsupported symmetry {symmetry!r}", line=1)

    vals_per_entry = 2 if field == "complex" else 1

    lineno = 1
    for lineno in range(2, len(lines) + 1):
        stripped = lines[lineno - 1].strip()
        if stripped and not stripped.startswith("%"):
            break
    else:
        raise MatrixMarketError("missing size line", line=len(lines))

    size_tokens = lines[lineno - 1].split()
    want = 3 if layout == "coordinate" else 2
    if len(size_tokens) != want:
        raise MatrixMarketError(
            f"size line needs {want} integers, got {len(size_tokens)}",
            line=lineno)
    try:
        sizes = [int(tok) for tok in size_tokens]
    except ValueError:
        raise MatrixMarketError("size line entries must be integers",
                                line=lineno) from None
    if sizes[0] < 1 or sizes[1] < 1 or (layout == "coordinate" and sizes[2] < 0):
        raise MatrixMarketError("matrix dimensions must be positive",
                                line=lineno)
    m, n = sizes[0], sizes[1]

    entries = []
    entry_lines = []
    for k in range(lineno + 1, len(lines) + 1):
        stripped = lines[k - 1].strip()
        if not stripped or stripped.startswith("%"):
            continue
        entries.append(stripped.split())
        entry_lines.append(k)

    if layout == "coordinate":
        nnz = sizes[2]
        if len(entries) != nnz:
            raise MatrixMarketError(
                f"expected {nnz} entries, found {len(entries)}",
                line=entry_lines[-1] if entries else lineno)
        rows = np.empty(nnz, dtype=np.int64)
        cols = np.empty(nnz, dtype=np.int64)
        vals = np.empty(nnz, dtype=np.complex128 if field == "complex"
                        else np.float64)
        for t, (toks, ln) in enumerate(zip(entries, entry_lines)):
            if len(toks) != 2 + vals_per_entry:
                raise MatrixMarketError(
                    f"entry needs {2 + vals_per_entry} fields, got {len(toks)}",
                    line=ln)
            try:
                i, j = int(toks[0]), int(toks[1])
                v = _parse_value(toks[2:], field)
            except ValueError:
                raise MatrixMarketError("could not parse entry", line=ln) \
                    from None
            if not (1 <= i <= m and 1 <= j <= n):
                raise MatrixMarketError(
                    f"index ({i},{j}) outside {m}x{n}", line=ln)
            rows[t], cols[t], vals[t] = i - 1, j - 1, v
        return Matrix(csc_array((vals, (rows, cols)), shape=(m, n)))

    count = m * n
    if len(entries) != count:
        raise MatrixMarketError(
            f"expected {count} values, found {len(entries)}",
            line=entry_lines[-1] if entries else lineno)
    flat = np.empty(count, dtype=np.complex128 if field == "complex"
                    else np.float64)
    for t, (toks, ln) in enumerate(zip(entries, entry_lines)):
        if len(toks) != vals_per_entry:
            raise MatrixMarketError(
                f"value line needs {vals_per_entry} fields, got {len(toks)}",
                line=ln)
        try:
            flat[t] = _parse_value(toks, field)
        except ValueError:
            raise MatrixMarketError("could not parse value", line=ln) from None
    return Matrix(flat.reshape((m, n), order="F"))


def _parse_value(tokens, field):
    if field == "complex":
        return complex(float(tokens[0]), float(tokens[1]))
    return float(tokens[0])


def mm_write(a: Matrix, path) -> None:
    """Write ``a`` in Matrix Market form: ``array`` for dense storage,
    ``coordinate`` for sparse."""
    field = "complex" if a.field == "complex128" else "real"
    layout = "coordinate" if a.is_sparse else "array"
    out = [f"{_BANNER} matrix {layout} {field} general"]
    if a.is_sparse:
        raw = a.raw
        out.append(f"{a.rows} {a.cols} {raw.nnz}")
        indptr, indices, data = raw.indptr, raw.indices, raw.data
        for j in range(a.cols):
            for p in range(indptr[j], indptr[j + 1]):
                out.append(f"{indices[p] + 1} {j + 1} {_fmt(data[p], field)}")
    else:
        out.append(f"{a.rows} {a.cols}")
        flat = a.raw.ravel(order="F")
        out.extend(_fmt(v, field) for v in flat)
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(out))
        fh.write("\n")


def _fmt(v, field):
    if field == "complex":
        return f"{v.real:.17g} {v.imag:.17g}"
    return f"{v:.17g}"
