"""Command-line interface.

Subcommands: ``gen`` (write a synthetic test matrix), ``run`` (execute
an experiment config), ``cost`` (print the operation-count estimate),
``decompose`` (factor a Matrix Market file).  Exit codes: 0 success,
1 configuration/usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .bench import (SpectrumSpec, emit_results, estimate_cost,
                    gen_test_matrix, parse_config_file, run_experiment)
from .errors import (DecompositionError, MatrixMarketError, ParameterError,
                     ShapeError, SingularMatrixError)
from .matrix import Matrix, frobenius_norm
from .mmio import mm_read, mm_write
from .randlu import approximation_error, default_params, sparse_randomized_lu

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # bad arguments are configuration errors (exit 1), not argparse's 2
    def error(self, message):
        raise _UsageError(message)


def _build_parser():
    parser = _Parser(prog="sparselu",
                     description="randomized low-rank LU decomposition")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a spectrum-controlled matrix")
    gen.add_argument("kind", choices=("step_exp", "exp_decay", "custom"))
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--m", type=int, default=None,
                     help="row count (default: n)")
    gen.add_argument("--r", type=int, default=0,
                     help="step rank (step_exp only)")
    gen.add_argument("--values", default=None,
                     help="comma-separated spectrum (custom only)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output .mtx path")

    run = sub.add_parser("run", help="run an experiment config")
    run.add_argument("config", help="experiment config file")
    run.add_argument("--format", choices=("csv", "jsonl"), default=None,
                     help="override the config's output format")
    run.add_argument("--out", default=None,
                     help="override the config's output path")
    run.add_argument("--threads", type=int, default=None)

    cost = sub.add_parser("cost", help="print the operation-count estimate")
    cost.add_argument("--m", type=int, required=True)
    cost.add_argument("--n", type=int, required=True)
    cost.add_argument("--r", type=int, required=True)
    cost.add_argument("--nnz", type=int, default=None)
    cost.add_argument("--sparse", action="store_true")
    cost.add_argument("--mode", choices=("practical", "theoretical"),
                      default="practical")
    cost.add_argument("--seed", type=int, default=0)

    dec = sub.add_parser("decompose", help="factor a Matrix Market file")
    dec.add_argument("input", help="input .mtx path")
    dec.add_argument("--r", type=int, required=True)
    dec.add_argument("--out-dir", default=".",
                     help="directory for P.mtx, Q.mtx, L.mtx, U.mtx")
    dec.add_argument("--seed", type=int, default=0)
    dec.add_argument("--mode", choices=("practical", "theoretical"),
                     default="practical")
    dec.add_argument("--threads", type=int, default=None)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        with _thread_limit(getattr(args, "threads", None)):
            return _dispatch(args)
    except (ParameterError, ShapeError, MatrixMarketError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (SingularMatrixError, DecompositionError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL


def _thread_limit(threads):
    import contextlib

    if threads is None:
        return contextlib.nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=threads)


def _dispatch(args):
    if args.command == "gen":
        return _cmd_gen(args)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "cost":
        return _cmd_cost(args)
    return _cmd_decompose(args)


def _cmd_gen(args):
    values = ()
    n = args.n
    if args.kind == "custom":
        if not args.values:
            raise ParameterError("custom spectra need --values")
        values = tuple(float(tok) for tok in args.values.split(","))
        n = len(values)
    spec = SpectrumSpec(kind=args.kind, n=n, r=args.r, values=values,
                        seed=args.seed)
    a = gen_test_matrix(spec, m=args.m)
    mm_write(a, args.out)
    print(f"wrote {a.rows} x {a.cols} matrix ({spec.describe()}) to {args.out}")
    return EXIT_OK


def _cmd_run(args):
    config = parse_config_file(args.config)
    if args.format:
        config.fmt = args.format
    if args.out:
        config.output = args.out
    records = run_experiment(config)
    if config.output:
        emit_results(records, config.output, config.fmt)
        print(f"wrote {len(records)} records to {config.output}")
    else:
        from .bench import CSV_HEADER

        if config.fmt == "csv":
            import csv

            writer = csv.writer(sys.stdout, lineterminator="\n")
            writer.writerow(CSV_HEADER.split(","))
            for rec in records:
                writer.writerow(rec.row())
        else:
            import json

            for rec in records:
                print(json.dumps(rec.json_obj()))
    failed = sum(1 for rec in records if np.isnan(rec.error))
    if failed:
        print(f"warning: {failed} cells failed after resampling",
              file=sys.stderr)
    return EXIT_OK


def _cmd_cost(args):
    nnz = args.nnz if args.nnz is not None else args.m * args.n
    params = default_params(args.r, args.m, args.n, seed=args.seed,
                            mode=args.mode)
    terms = estimate_cost(args.m, args.n, nnz, params, sparse=args.sparse)
    print(f"sizes: m={args.m} n={args.n} nnz={nnz} "
          f"k1={params.k1} l1={params.l1} k2={params.k2} l2={params.l2}")
    width = max(len(name) for name in terms)
    for name, count in terms.items():
        print(f"  {name:<{width}}  {count:.6e}")
    return EXIT_OK


def _cmd_decompose(args):
    import os

    a = mm_read(args.input)
    params = default_params(args.r, a.rows, a.cols, field=a.field,
                            seed=args.seed, mode=args.mode)
    res = sparse_randomized_lu(a, params)
    os.makedirs(args.out_dir, exist_ok=True)
    # permutations go out as size x 1 arrays of (exact) float indices
    mm_write(Matrix(res.P.indices[:, None].astype(np.float64)),
             os.path.join(args.out_dir, "P.mtx"))
    mm_write(Matrix(res.Q.indices[:, None].astype(np.float64)),
             os.path.join(args.out_dir, "Q.mtx"))
    mm_write(res.L, os.path.join(args.out_dir, "L.mtx"))
    mm_write(res.U, os.path.join(args.out_dir, "U.mtx"))
    err = approximation_error(a, res)
    rel = err / frobenius_norm(a) if frobenius_norm(a) > 0 else 0.0
    print(f"decomposed {a.rows} x {a.cols} matrix at rank {params.r}: "
          f"|LU - PAQ|_F = {err:.6e} ({rel:.3e} relative), "
          f"{res.elapsed['total']:.3f}s")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
