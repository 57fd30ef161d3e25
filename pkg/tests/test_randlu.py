import logging

import numpy as np
import pytest

import sparselu.randlu as randlu_mod
from sparselu import (COMPLEX, DecompositionError, Matrix, ParameterError,
                      Permutation, RandLuParams, RandLuResult,
                      SingularMatrixError, approximation_error,
                      default_params, frobenius_norm, gaussian_randomized_lu,
                      norm_bound_C, sparse_randomized_lu,
                      theoretical_error_factor)


def _rank_r_matrix(m, n, r, seed):
    g = np.random.Generator(np.random.Philox(seed))
    return Matrix(g.standard_normal((m, r)) @ g.standard_normal((r, n)))


# ---------------------------------------------------------------------------
# parameter selection


def test_default_params_values():
    p = default_params(20, 1000, 1000, seed=3)
    assert (p.k1, p.k2, p.l1, p.l2) == (28, 36, 112, 144)
    assert p.epsilon == 0.5 and p.delta == 0.1 and p.seed == 3


def test_default_params_degenerate_size_rejected():
    with pytest.raises(ParameterError):
        default_params(1, 8, 8)


def test_default_params_rank_too_large():
    with pytest.raises(ParameterError):
        default_params(200, 300, 300)


def test_theoretical_mode_second_stage_inner_dim():
    # delta^-1 (r^2+r)/(2 eps - eps^2)^2 = 533.3... -> 534 before clamping
    p = default_params(5, 5000, 5000, mode="theoretical")
    assert p.l2 == 534


def test_theoretical_mode_fits_constraints():
    p = default_params(3, 2000, 2000, mode="theoretical")
    assert p.r <= p.k1 <= p.k2 < p.l2 <= 2000
    assert p.k1 < p.l1 <= 2000


def test_params_invariant_validation():
    with pytest.raises(ParameterError):
        RandLuParams(r=5, k1=4, l1=10, k2=6, l2=12)  # k1 < r
    with pytest.raises(ParameterError):
        RandLuParams(r=2, k1=4, l1=4, k2=6, l2=12)  # l1 <= k1
    with pytest.raises(ParameterError):
        RandLuParams(r=2, k1=4, l1=10, k2=3, l2=12)  # k2 < k1
    with pytest.raises(ParameterError):
        RandLuParams(r=2, k1=4, l1=10, k2=6, l2=6)  # l2 <= k2
    with pytest.raises(ParameterError):
        RandLuParams(r=2, k1=4, l1=10, k2=6, l2=12, epsilon=1.5)
    p = RandLuParams(r=2, k1=4, l1=10, k2=6, l2=12)
    with pytest.raises(ParameterError):
        p.check_against(11, 20)  # l2 > m


# ---------------------------------------------------------------------------
# the decomposition itself


def test_zero_matrix_zero_error():
    a = Matrix(np.zeros((60, 50)))
    params = RandLuParams(r=2, k1=3, l1=20, k2=4, l2=48, seed=1)
    res = sparse_randomized_lu(a, params)
    assert approximation_error(a, res) == 0.0
    assert np.all(res.U.to_dense() == 0.0)


def test_zero_matrix_gaussian():
    a = Matrix(np.zeros((40, 40)))
    params = RandLuParams(r=2, k1=3, l1=12, k2=4, l2=20, seed=1)
    res = gaussian_randomized_lu(a, params)
    assert approximation_error(a, res) == 0.0


@pytest.mark.parametrize("algorithm", [sparse_randomized_lu,
                                       gaussian_randomized_lu])
def test_exact_rank_recovery(algorithm):
    for seed in range(3):
        a = _rank_r_matrix(300, 300, 10, seed=seed)
        params = default_params(10, 300, 300, seed=100 + seed)
        res = algorithm(a, params)
        assert approximation_error(a, res) <= 1e-8 * frobenius_norm(a)


def test_exact_rank_recovery_sparse_input(rng):
    g = rng(77)
    d = g.standard_normal((200, 6)) @ g.standard_normal((6, 180))
    d[g.random((200, 180)) < 0.5] = 0.0
    a = Matrix.sparse(d)
    params = default_params(6, 200, 180, seed=11)
    res = sparse_randomized_lu(a, params)
    # masking changed the rank; compare against the dense run instead
    dense_res = sparse_randomized_lu(Matrix(d), params)
    assert approximation_error(a, res) == pytest.approx(
        approximation_error(Matrix(d), dense_res), rel=1e-10)


def test_complex_field_pipeline(rng):
    g = rng(21)
    x = g.standard_normal((100, 5)) + 1j * g.standard_normal((100, 5))
    y = g.standard_normal((5, 90)) + 1j * g.standard_normal((5, 90))
    a = Matrix(x @ y)
    params = default_params(5, 100, 90, field=COMPLEX, seed=2)
    res = sparse_randomized_lu(a, params)
    assert approximation_error(a, res) <= 1e-8 * frobenius_norm(a)


def test_result_shape_invariants():
    a = _rank_r_matrix(120, 100, 8, seed=5)
    params = default_params(8, 120, 100, seed=9)
    res = sparse_randomized_lu(a, params)
    ld = res.L.to_dense()
    assert ld.shape == (120, params.k1)
    assert res.U.shape == (params.k1, 100)
    # lower-trapezoidal with unit diagonal
    k1 = params.k1
    assert np.max(np.abs(np.triu(ld[:k1, :k1], 1))) == 0.0
    np.testing.assert_allclose(np.diagonal(ld[:k1, :k1]), 1.0, atol=1e-13)
    assert np.all(np.isfinite(ld))
    assert set(res.elapsed) == {"sketch1", "lu1", "sketch2", "pinv", "lu2",
                                "total"}


def test_determinism_bit_identical():
    a = _rank_r_matrix(150, 140, 7, seed=3)
    params = default_params(7, 150, 140, seed=31)
    r1 = sparse_randomized_lu(a, params)
    r2 = sparse_randomized_lu(a, params)
    assert np.array_equal(r1.P.indices, r2.P.indices)
    assert np.array_equal(r1.Q.indices, r2.Q.indices)
    np.testing.assert_array_equal(r1.L.to_dense(), r2.L.to_dense())
    np.testing.assert_array_equal(r1.U.to_dense(), r2.U.to_dense())


def test_field_mismatch_rejected():
    a = Matrix(np.zeros((40, 40)))
    params = RandLuParams(r=2, k1=3, l1=12, k2=4, l2=20, field=COMPLEX)
    with pytest.raises(ParameterError):
        sparse_randomized_lu(a, params)


def test_params_checked_against_matrix():
    a = Matrix(np.zeros((30, 30)))
    params = RandLuParams(r=2, k1=3, l1=40, k2=4, l2=20)
    with pytest.raises(ParameterError):
        sparse_randomized_lu(a, params)


def test_resample_recovers_from_singular_reduction(monkeypatch, caplog):
    real_pinv = randlu_mod.left_pseudo_inverse
    calls = {"n": 0}

    def flaky(mat):
        calls["n"] += 1
        if calls["n"] <= 2:
            raise SingularMatrixError("forced", cond=float("inf"))
        return real_pinv(mat)

    monkeypatch.setattr(randlu_mod, "left_pseudo_inverse", flaky)
    a = _rank_r_matrix(100, 100, 5, seed=8)
    params = default_params(5, 100, 100, seed=77)
    with caplog.at_level(logging.WARNING, logger="sparselu.randlu"):
        res = sparse_randomized_lu(a, params)
    assert calls["n"] == 3
    assert sum("resampling" in rec.message for rec in caplog.records) == 2
    assert approximation_error(a, res) <= 1e-8 * frobenius_norm(a)


def test_decomposition_error_after_exhausted_resamples(monkeypatch):
    def always_singular(mat):
        raise SingularMatrixError("forced", cond=float("inf"))

    monkeypatch.setattr(randlu_mod, "left_pseudo_inverse", always_singular)
    a = _rank_r_matrix(80, 80, 4, seed=9)
    params = default_params(4, 80, 80, seed=5)
    with pytest.raises(DecompositionError):
        sparse_randomized_lu(a, params)


# ---------------------------------------------------------------------------
# error measurement


def test_approximation_error_zero_case():
    a = Matrix(np.zeros((20, 20)))
    params = RandLuParams(r=2, k1=3, l1=10, k2=4, l2=16, seed=4)
    res = sparse_randomized_lu(a, params)
    assert approximation_error(a, res) == 0.0


def test_approximation_error_hand_case():
    res = RandLuResult(
        P=Permutation.identity(2), Q=Permutation.identity(2),
        L=Matrix([[1.0], [0.0]]), U=Matrix([[1.0, 0.0]]))
    assert approximation_error(Matrix([[1.0, 0.0], [0.0, 0.0]]), res) == 0.0


def test_approximation_error_matches_naive(rng):
    g = rng(22)
    a = Matrix(g.standard_normal((50, 40)))
    params = default_params(6, 50, 40, seed=13)
    res = sparse_randomized_lu(a, params)
    naive = np.linalg.norm(
        res.L.to_dense() @ res.U.to_dense()
        - a.to_dense()[res.P.indices][:, res.Q.indices])
    got = approximation_error(a, res)
    assert got == pytest.approx(naive, rel=1e-12)
    # independent of the streaming block width
    assert approximation_error(a, res, block_cols=7) == pytest.approx(
        naive, rel=1e-12)


def test_approximation_error_sparse_matches_dense(rng):
    g = rng(23)
    d = g.standard_normal((60, 45))
    d[g.random((60, 45)) < 0.7] = 0.0
    params = default_params(5, 60, 45, seed=6)
    res = sparse_randomized_lu(Matrix(d), params)
    dense_err = approximation_error(Matrix(d), res)
    sparse_err = approximation_error(Matrix.sparse(d), res)
    assert sparse_err == pytest.approx(dense_err, rel=1e-12)


# ---------------------------------------------------------------------------
# theoretical error factor


def test_error_factor_value():
    # 1.48 * 1.5 * (C(5000,100)/0.2 + 1)
    assert theoretical_error_factor(0.5, 5000, 100) == pytest.approx(
        96.05, abs=0.1)


def test_error_factor_small_epsilon_limit():
    c = norm_bound_C(5000, 100)
    want = 1.48 * (c / 0.4 + 1.0)
    assert theoretical_error_factor(1e-12, 5000, 100) == pytest.approx(
        want, rel=1e-9)


def test_error_factor_monotone_in_epsilon():
    grid = np.linspace(0.05, 0.95, 19)
    vals = [theoretical_error_factor(e, 2000, 50) for e in grid]
    assert np.all(np.diff(vals) > 0)


def test_error_factor_domain():
    with pytest.raises(ParameterError):
        theoretical_error_factor(0.0, 100, 10)
    with pytest.raises(ParameterError):
        theoretical_error_factor(0.5, 100, 1)
