"""Benchmark harness: spectrum-controlled test matrices, experiment
configs, operation-count estimates and CSV/JSONL emission.

An experiment config is a flat key/value text file::

    # one line per matrix; either a spectrum spec or a Matrix Market file
    matrix = step_exp n=1000 r=50 seed=7
    matrix = exp_decay n=500 seed=3
    matrix = file inputs/web.mtx
    ranks = 50 100 200
    algorithms = sparse_lu gaussian_lu svd_oracle
    seeds = 0 1 2
    mode = practical
    format = csv
    output = results.csv

``ranks``, ``algorithms`` and ``seeds`` are whitespace-separated lists;
``mode``, ``format`` and ``output`` are optional (defaults: practical,
csv, no file).  Lines starting with ``#`` are comments.  For every
(matrix, rank, algorithm, seed) cell one :class:`BenchRecord` is
produced; a cell whose decomposition fails even after resampling is
recorded with ``error = nan`` instead of aborting the run.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import DecompositionError, ParameterError, ShapeError
from .factor import singular_values, tail_energy
from .matrix import REAL, Matrix, dtype_of_field
from .mmio import mm_read
from .randlu import (RandLuParams, approximation_error, default_params,
                     gaussian_randomized_lu, sparse_randomized_lu)

ALGORITHMS = ("sparse_lu", "gaussian_lu", "svd_oracle")

#: a tail energy at or below this is reported as the exact-rank case
#: (ratio undefined) instead of producing astronomical quotients
EXACT_RANK_FLOOR = 1e-300

CSV_HEADER = ("algorithm,matrix,n,m,r,k1,l1,k2,l2,seed,error,delta_r,ratio,"
              "t_sketch1,t_lu1,t_sketch2,t_pinv,t_lu2,t_total")

_TIMING_KEYS = ("sketch1", "lu1", "sketch2", "pinv", "lu2", "total")


@dataclass(frozen=True)
class SpectrumSpec:
    """Singular value profile of a synthetic test matrix.

    ``step_exp``: the first r values are 1, the rest fall log-linearly
    from e^-10 to e^-200 (an explicit numerical-rank step).
    ``exp_decay``: all n values fall log-linearly from 1 to e^-100.
    ``custom``: caller-provided positive non-increasing values.
    """

    kind: str
    n: int
    r: int = 0
    values: tuple = ()
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError("spectrum size must be positive")
        if self.kind == "step_exp":
            if not 1 <= self.r < self.n:
                raise ParameterError(
                    f"step_exp needs 1 <= r < n, got r={self.r}, n={self.n}")
        elif self.kind == "exp_decay":
            pass
        elif self.kind == "custom":
            vals = np.asarray(self.values, dtype=np.float64)
            if vals.shape != (self.n,):
                raise ParameterError("custom spectrum needs n values")
            if np.any(vals <= 0) or np.any(vals[1:] > vals[:-1]):
                raise ParameterError(
                    "custom spectrum must be positive and non-increasing")
            object.__setattr__(self, "values", tuple(float(v) for v in vals))
        else:
            raise ParameterError(f"unknown spectrum kind {self.kind!r}")

    def sigma(self) -> np.ndarray:
        """The spectrum as a descending float64 array of length n."""
        if self.kind == "step_exp":
            tail = np.exp(np.linspace(-10.0, -200.0, self.n - self.r))
            return np.concatenate([np.ones(self.r), tail])
        if self.kind == "exp_decay":
            return np.exp(np.linspace(0.0, -100.0, self.n))
        return np.asarray(self.values, dtype=np.float64)

    def describe(self) -> str:
        if self.kind == "step_exp":
            return f"step_exp(n={self.n},r={self.r},seed={self.seed})"
        if self.kind == "exp_decay":
            return f"exp_decay(n={self.n},seed={self.seed})"
        return f"custom(n={self.n},seed={self.seed})"


@dataclass
class BenchRecord:
    """One experiment cell: what ran, how wrong it was, how long it took.

    ``ratio`` is ``error / delta_r`` or ``None`` when the cell is an
    exact-rank case (``delta_r <= EXACT_RANK_FLOOR``) or failed.
    """

    algorithm: str
    matrix: str
    n: int
    m: int
    r: int
    k1: int
    l1: int
    k2: int
    l2: int
    seed: int
    error: float
    delta_r: float
    ratio: float | None
    timings: dict = dc_field(default_factory=dict)

    def row(self):
        vals = [self.algorithm, self.matrix, self.n, self.m, self.r,
                self.k1, self.l1, self.k2, self.l2, self.seed,
                _fmt_float(self.error), _fmt_float(self.delta_r),
                "" if self.ratio is None else _fmt_float(self.ratio)]
        vals.extend(_fmt_float(self.timings.get(k, 0.0)) for k in _TIMING_KEYS)
        return vals

    def json_obj(self):
        obj = {
            "algorithm": self.algorithm, "matrix": self.matrix,
            "n": self.n, "m": self.m, "r": self.r,
            "k1": self.k1, "l1": self.l1, "k2": self.k2, "l2": self.l2,
            "seed": self.seed, "error": self.error, "delta_r": self.delta_r,
            "ratio": self.ratio,
        }
        for key in _TIMING_KEYS:
            obj[f"t_{key}"] = self.timings.get(key, 0.0)
        return obj


def _fmt_float(x):
    return f"{x:.17g}"


def gen_test_matrix(spec: SpectrumSpec, m=None, field=REAL) -> Matrix:
    """Dense m x n matrix with the prescribed singular values.

    Both singular vector factors are orthonormalized seeded Gaussian
    draws, so the generated spectrum matches ``spec.sigma()`` to
    orthogonalization accuracy.  ``m`` defaults to n and may exceed it.
    """
    n = spec.n
    m = n if m is None else int(m)
    if m < n:
        raise ShapeError(f"need m >= n, got m={m}, n={n}")
    sig = spec.sigma()
    dtype = dtype_of_field(field)
    g = np.random.Generator(np.random.Philox(spec.seed))
    w = _orthonormal(g, m, n, dtype)
    z = _orthonormal(g, n, n, dtype)
    return Matrix._owned((w * sig) @ z.conj().T)


def _orthonormal(g, rows, cols, dtype):
    draw = g.standard_normal((rows, cols))
    if dtype == np.complex128:
        draw = draw + 1j * g.standard_normal((rows, cols))
    q, _ = np.linalg.qr(draw)
    return q


# ---------------------------------------------------------------------------
# experiment configs


@dataclass
class ExperimentConfig:
    matrices: list
    ranks: list
    algorithms: list
    seeds: list
    mode: str = "practical"
    fmt: str = "csv"
    output: str | None = None


def parse_config(text) -> ExperimentConfig:
    """Parse the flat key/value experiment format described in the
    module docstring.  Raises :class:`ParameterError` on schema
    violations."""
    matrices = []
    fields = {}
    for lineno, rawline in enumerate(str(text).splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"config line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        key, value = key.strip().lower(), value.strip()
        if key == "matrix":
            matrices.append(_parse_matrix_source(value, lineno))
        elif key in ("ranks", "seeds"):
            try:
                fields[key] = [int(tok) for tok in value.split()]
            except ValueError:
                raise ParameterError(
                    f"config line {lineno}: {key} must be integers") from None
        elif key == "algorithms":
            algos = value.split()
            unknown = [a for a in algos if a not in ALGORITHMS]
            if unknown:
                raise ParameterError(
                    f"config line {lineno}: unknown algorithms {unknown}")
            fields["algorithms"] = algos
        elif key in ("mode", "format", "output"):
            fields[key] = value
        else:
            raise ParameterError(f"config line {lineno}: unknown key {key!r}")

    if not matrices:
        fields.setdefault("ranks", [])
    for required in ("ranks", "algorithms", "seeds"):
        if matrices and required not in fields:
            raise ParameterError(f"config is missing {required!r}")
    mode = fields.get("mode", "practical")
    if mode not in ("practical", "theoretical"):
        raise ParameterError(f"unknown mode {mode!r}")
    fmt = fields.get("format", "csv")
    if fmt not in ("csv", "jsonl"):
        raise ParameterError(f"unknown format {fmt!r}")
    return ExperimentConfig(
        matrices=matrices,
        ranks=fields.get("ranks", []),
        algorithms=fields.get("algorithms", []),
        seeds=fields.get("seeds", []),
        mode=mode,
        fmt=fmt,
        output=fields.get("output"),
    )


def _parse_matrix_source(value, lineno):
    tokens = value.split()
    if not tokens:
        raise ParameterError(f"config line {lineno}: empty matrix spec")
    kind, opts = tokens[0], tokens[1:]
    if kind == "file":
        if len(opts) != 1:
            raise ParameterError(
                f"config line {lineno}: matrix = file needs exactly one path")
        return opts[0]
    kv = {}
    for tok in opts:
        if "=" not in tok:
            raise ParameterError(
                f"config line {lineno}: expected key=value, got {tok!r}")
        k, _, v = tok.partition("=")
        try:
            kv[k] = int(v)
        except ValueError:
            raise ParameterError(
                f"config line {lineno}: {k} must be an integer") from None
    try:
        return SpectrumSpec(kind=kind, n=kv.pop("n", 0), r=kv.pop("r", 0),
                            seed=kv.pop("seed", 0))
    except ParameterError as err:
        raise ParameterError(f"config line {lineno}: {err}") from None


def parse_config_file(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def run_experiment(config: ExperimentConfig) -> list:
    """Run every (matrix, rank, algorithm, seed) cell of the config.

    Cells are independent; records come back in the deterministic
    (matrix, rank, algorithm, seed) order.  The reference spectrum of
    each matrix is computed once and shared by all its cells.
    """
    records = []
    for source in config.matrices:
        if isinstance(source, SpectrumSpec):
            a = gen_test_matrix(source)
            name = source.describe()
            tic = time.perf_counter()
            sigma = singular_values(a)
            svd_seconds = time.perf_counter() - tic
        else:
            a = mm_read(source)
            name = str(source)
            tic = time.perf_counter()
            sigma = singular_values(a)
            svd_seconds = time.perf_counter() - tic
        for r in config.ranks:
            for algorithm in config.algorithms:
                for seed in config.seeds:
                    records.append(_run_cell(a, name, sigma, svd_seconds,
                                             r, algorithm, seed, config.mode))
    return records


def _run_cell(a, name, sigma, svd_seconds, r, algorithm, seed, mode):
    m, n = a.shape
    delta = tail_energy(sigma, min(r, sigma.size))
    if algorithm == "svd_oracle":
        # the optimal-reference row: its error IS the tail energy
        ratio = 1.0 if delta > EXACT_RANK_FLOOR else None
        return BenchRecord(algorithm, name, n, m, r, 0, 0, 0, 0, seed,
                           error=delta, delta_r=delta, ratio=ratio,
                           timings={"total": svd_seconds})
    params = default_params(r, m, n, field=a.field, seed=seed, mode=mode)
    runner = sparse_randomized_lu if algorithm == "sparse_lu" \
        else gaussian_randomized_lu
    try:
        res = runner(a, params)
        error = approximation_error(a, res)
        timings = res.elapsed
    except DecompositionError:
        error = float("nan")
        timings = {}
    ratio = error / delta if delta > EXACT_RANK_FLOOR \
        and not math.isnan(error) else None
    return BenchRecord(algorithm, name, n, m, r, params.k1, params.l1,
                       params.k2, params.l2, seed, error=error, delta_r=delta,
                       ratio=ratio, timings=timings)


# ---------------------------------------------------------------------------
# cost model


def estimate_cost(m, n, nnz, params: RandLuParams, sparse=False) -> dict:
    """Itemized operation-count estimate of one decomposition run.

    Unit-constant counts per pipeline stage; the two stages that read
    the whole matrix charge ``nnz`` instead of ``m*n`` when ``sparse``.
    Logarithms are base 2 (the transforms are radix-2).
    """
    if m < 1 or n < 1 or nnz < 0:
        raise ParameterError("sizes must be positive")
    k1, l1, k2, l2 = params.k1, params.l1, params.k2, params.l2
    read_a = float(nnz if sparse else m * n)
    lg1 = math.log2(k1) if k1 > 1 else 0.0
    lg2 = math.log2(k2) if k2 > 1 else 0.0
    terms = {
        "omega1_build": float(n + l1 * k1),
        "project_right": read_a + m * l1 * lg1,
        "lu1": float(m * k1 * k1),
        "omega2_build": float(m + l2 * k2),
        "omega2_l1_pinv": m * k1 + k1 * l2 * lg2 + k2 * k1 * k1,
        "project_left": read_a + n * l2 * lg2 + k2 * k1 * n,
        "lu2": float(k2 * k2 * n),
        "final_product": float(m * k1 * k1),
    }
    terms["total"] = sum(terms.values())
    return terms


# ---------------------------------------------------------------------------
# emission


def emit_results(records, path, fmt="csv") -> None:
    """Write records as CSV (fixed header, 17-significant-digit floats,
    standard quoting) or JSONL (one object per line)."""
    if fmt == "csv":
        import csv

        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER.split(","))
            for rec in records:
                writer.writerow(rec.row())
    elif fmt == "jsonl":
        with open(path, "w", encoding="utf-8") as fh:
            for rec in records:
                fh.write(json.dumps(rec.json_obj()))
                fh.write("\n")
    else:
        raise ParameterError(f"unknown format {fmt!r}")
