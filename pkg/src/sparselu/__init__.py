"""Randomized low-rank pivoted LU decomposition via sparse sign
embeddings composed with subsampled fast trigonometric transforms."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .bench import (BenchRecord, ExperimentConfig, SpectrumSpec, emit_results,
                    estimate_cost, gen_test_matrix, parse_config,
                    parse_config_file, run_experiment)
from .errors import (DecompositionError, MatrixMarketError, ParameterError,
                     ShapeError, SingularMatrixError)
from .factor import (ColPivotedLU, PivotedLU, left_pseudo_inverse,
                     lu_col_pivot, lu_row_pivot, singular_values, tail_energy)
from .matrix import (COMPLEX, REAL, Matrix, Permutation, frobenius_norm,
                     matmul, permute_cols, permute_rows)
from .mmio import mm_read, mm_write
from .randlu import (RandLuParams, RandLuResult, approximation_error,
                     default_params, gaussian_randomized_lu,
                     sparse_randomized_lu, theoretical_error_factor)
from .sketch import (CompositeSketch, FastTransformSketch, SparseEmbedding,
                     apply_fast_adjoint_right, apply_sem_adjoint_right,
                     apply_sketch_left, apply_sketch_right, build_composite,
                     build_fast_transform, build_sem,
                     empirical_embedding_quality, norm_bound_C,
                     sem_singular_values, transform_kind_for_field)

__version__ = "0.1.0"

__all__ = [
    "BenchRecord",
    "COMPLEX",
    "ColPivotedLU",
    "CompositeSketch",
    "DecompositionError",
    "ExperimentConfig",
    "FastTransformSketch",
    "KERNEL_BACKEND",
    "Matrix",
    "MatrixMarketError",
    "ParameterError",
    "Permutation",
    "PivotedLU",
    "REAL",
    "RandLuParams",
    "RandLuResult",
    "ShapeError",
    "SingularMatrixError",
    "SparseEmbedding",
    "SpectrumSpec",
    "apply_fast_adjoint_right",
    "apply_sem_adjoint_right",
    "apply_sketch_left",
    "apply_sketch_right",
    "approximation_error",
    "build_composite",
    "build_fast_transform",
    "build_sem",
    "default_params",
    "emit_results",
    "empirical_embedding_quality",
    "estimate_cost",
    "frobenius_norm",
    "gaussian_randomized_lu",
    "gen_test_matrix",
    "left_pseudo_inverse",
    "lu_col_pivot",
    "lu_row_pivot",
    "matmul",
    "mm_read",
    "mm_write",
    "norm_bound_C",
    "parse_config",
    "parse_config_file",
    "permute_cols",
    "permute_rows",
    "run_experiment",
    "sem_singular_values",
    "singular_values",
    "sparse_randomized_lu",
    "tail_energy",
    "theoretical_error_factor",
    "transform_kind_for_field",
]
