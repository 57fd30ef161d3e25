import json
import math

import numpy as np
import pytest

import sparselu.bench as bench_mod
from sparselu import (DecompositionError, Matrix, ParameterError, ShapeError,
                      SpectrumSpec, default_params, emit_results,
                      estimate_cost, gen_test_matrix, mm_write, parse_config,
                      run_experiment, singular_values, tail_energy)
from sparselu.bench import CSV_HEADER, BenchRecord


# ---------------------------------------------------------------------------
# spectra


def test_step_exp_spectrum_shape():
    sig = SpectrumSpec("step_exp", n=200, r=20).sigma()
    assert np.all(sig[:20] == 1.0)
    assert sig[20] == pytest.approx(np.exp(-10.0), rel=1e-14)
    assert sig[-1] == pytest.approx(np.exp(-200.0), rel=1e-14)
    assert np.all(np.diff(sig) <= 0)


def test_exp_decay_spectrum_constant_ratio():
    sig = SpectrumSpec("exp_decay", n=100).sigma()
    assert sig[0] == 1.0
    assert sig[-1] == pytest.approx(np.exp(-100.0), rel=1e-12)
    ratios = sig[1:] / sig[:-1]
    assert np.max(np.abs(ratios - ratios[0])) <= 1e-10


def test_custom_spectrum_validation():
    SpectrumSpec("custom", n=3, values=(3.0, 2.0, 2.0))
    with pytest.raises(ParameterError):
        SpectrumSpec("custom", n=3, values=(1.0, 2.0, 3.0))
    with pytest.raises(ParameterError):
        SpectrumSpec("custom", n=3, values=(1.0, 0.0, 0.0))
    with pytest.raises(ParameterError):
        SpectrumSpec("custom", n=2, values=(1.0,))
    with pytest.raises(ParameterError):
        SpectrumSpec("step_exp", n=5, r=5)
    with pytest.raises(ParameterError):
        SpectrumSpec("wedge", n=5)


# ---------------------------------------------------------------------------
# matrix generation


def test_gen_one_by_one_custom():
    a = gen_test_matrix(SpectrumSpec("custom", n=1, values=(1.0,), seed=4))
    assert a.shape == (1, 1)
    assert abs(a.to_dense()[0, 0]) == pytest.approx(1.0, rel=1e-14)


def test_gen_step_exp_spectrum_realized():
    spec = SpectrumSpec("step_exp", n=200, r=20, seed=7)
    sv = singular_values(gen_test_matrix(spec))
    np.testing.assert_allclose(sv[:20], 1.0, rtol=1e-8)
    assert sv[20] == pytest.approx(np.exp(-10.0), rel=1e-8)


def test_gen_spectrum_matches_spec_within_float_resolution():
    # relative agreement where the values live above the eps floor,
    # absolute agreement (vs sigma_max) below it
    for spec in (SpectrumSpec("step_exp", n=120, r=10, seed=1),
                 SpectrumSpec("exp_decay", n=150, seed=2)):
        want = spec.sigma()
        got = singular_values(gen_test_matrix(spec))
        assert np.max(np.abs(got - want)) <= 1e-8 * want[0]
        big = want >= 1e-6 * want[0]
        np.testing.assert_allclose(got[big], want[big], rtol=1e-8)


def test_gen_rectangular():
    spec = SpectrumSpec("exp_decay", n=40, seed=3)
    a = gen_test_matrix(spec, m=70)
    assert a.shape == (70, 40)
    sv = singular_values(a)
    np.testing.assert_allclose(sv[:5], spec.sigma()[:5], rtol=1e-8)
    with pytest.raises(ShapeError):
        gen_test_matrix(spec, m=30)


def test_gen_complex_field():
    a = gen_test_matrix(SpectrumSpec("exp_decay", n=30, seed=5),
                        field="complex128")
    assert a.field == "complex128"
    np.testing.assert_allclose(singular_values(a)[0], 1.0, rtol=1e-8)


def test_gen_deterministic():
    spec = SpectrumSpec("step_exp", n=50, r=5, seed=11)
    a = gen_test_matrix(spec)
    b = gen_test_matrix(spec)
    np.testing.assert_array_equal(a.to_dense(), b.to_dense())


# ---------------------------------------------------------------------------
# cost model


def _cost_by_hand(m, n, nnz, k1, l1, k2, l2, sparse):
    read = nnz if sparse else m * n
    lg1, lg2 = math.log2(k1), math.log2(k2)
    return (n + l1 * k1) + (read + m * l1 * lg1) + m * k1 * k1 \
        + (m + l2 * k2) + (m * k1 + k1 * l2 * lg2 + k2 * k1 * k1) \
        + (read + n * l2 * lg2 + k2 * k1 * n) + k2 * k2 * n + m * k1 * k1


def test_cost_all_dims_one():
    params = default_params(1, 100, 100)
    terms = estimate_cost(1, 1, 1, params, sparse=False)
    assert math.isfinite(terms["total"])
    assert all(v >= 0 for v in terms.values())


def test_cost_matches_hand_sum():
    params = default_params(50, 5000, 5000)
    assert (params.k1, params.l1, params.k2, params.l2) == (58, 232, 66, 264)
    terms = estimate_cost(5000, 5000, 10**6, params, sparse=False)
    want = _cost_by_hand(5000, 5000, 10**6, 58, 232, 66, 264, sparse=False)
    assert terms["total"] == pytest.approx(want, rel=1e-12)


def test_cost_sparse_with_full_nnz_equals_dense():
    params = default_params(10, 400, 300)
    dense = estimate_cost(400, 300, 400 * 300, params, sparse=False)
    sparse = estimate_cost(400, 300, 400 * 300, params, sparse=True)
    assert dense == sparse


def test_cost_monotone():
    params = default_params(10, 400, 300)
    base = estimate_cost(400, 300, 5000, params, sparse=True)["total"]
    assert estimate_cost(500, 300, 5000, params, sparse=True)["total"] >= base
    assert estimate_cost(400, 400, 5000, params, sparse=True)["total"] >= base
    assert estimate_cost(400, 300, 9000, params, sparse=True)["total"] >= base
    bigger = default_params(12, 400, 300)
    assert estimate_cost(400, 300, 5000, bigger,
                         sparse=True)["total"] >= base


# ---------------------------------------------------------------------------
# experiment configs


def test_parse_empty_config():
    config = parse_config("")
    assert config.matrices == []
    assert run_experiment(config) == []


def test_parse_config_full():
    text = """
    # comment
    matrix = step_exp n=64 r=4 seed=9
    matrix = exp_decay n=32 seed=1
    ranks = 4 8
    algorithms = sparse_lu svd_oracle
    seeds = 0 1
    mode = practical
    format = jsonl
    output = out.jsonl
    """
    config = parse_config(text)
    assert len(config.matrices) == 2
    assert config.ranks == [4, 8]
    assert config.algorithms == ["sparse_lu", "svd_oracle"]
    assert config.seeds == [0, 1]
    assert config.fmt == "jsonl"
    assert config.output == "out.jsonl"


@pytest.mark.parametrize("text", [
    "matrix = step_exp n=64 r=4\nranks = 1\nalgorithms = qr\nseeds = 0",
    "matrix = step_exp n=64 r=4\nranks = x\nalgorithms = sparse_lu\nseeds = 0",
    "matrix = step_exp n=64 r=4\nranks = 1\nseeds = 0",
    "matrix = wedge n=64\nranks = 1\nalgorithms = sparse_lu\nseeds = 0",
    "mode = sideways",
    "format = xml",
    "bogus = 1",
    "matrix step_exp",
])
def test_parse_config_rejects(text):
    with pytest.raises(ParameterError):
        parse_config(text)


def test_run_experiment_zero_matrix_from_file(tmp_path):
    # sketching an all-zero matrix hits the resample path (the lower
    # factor is all unit columns), but the record still comes out clean
    path = tmp_path / "zero.mtx"
    mm_write(Matrix.sparse(np.zeros((200, 200))), path)
    config = parse_config(
        f"matrix = file {path}\nranks = 2\nalgorithms = sparse_lu\nseeds = 0")
    records = run_experiment(config)
    assert len(records) == 1
    rec = records[0]
    assert rec.error == 0.0
    assert rec.ratio is None  # exact-rank case
    assert rec.delta_r == 0.0


def test_run_experiment_grid_and_oracle(tmp_path):
    config = parse_config(
        "matrix = step_exp n=48 r=4 seed=2\n"
        "ranks = 4 6\n"
        "algorithms = sparse_lu gaussian_lu svd_oracle\n"
        "seeds = 0 1\n")
    records = run_experiment(config)
    assert len(records) == 12
    spec = SpectrumSpec("step_exp", n=48, r=4, seed=2)
    sigma = singular_values(gen_test_matrix(spec))
    for rec in records:
        delta = tail_energy(sigma, rec.r)
        assert rec.delta_r == pytest.approx(delta, rel=1e-10, abs=1e-300)
        if rec.algorithm == "svd_oracle":
            assert rec.error == rec.delta_r
        else:
            # the factors have rank up to k1, so the honest optimality
            # floor is the rank-k1 tail, not the rank-r one
            assert rec.error >= tail_energy(sigma, rec.k1) - 1e-9
            assert rec.ratio == pytest.approx(rec.error / rec.delta_r,
                                              rel=1e-15)


def test_run_experiment_reproducible():
    text = ("matrix = exp_decay n=40 seed=5\nranks = 3\n"
            "algorithms = sparse_lu\nseeds = 0 1 2\n")
    a = [rec.error for rec in run_experiment(parse_config(text))]
    b = [rec.error for rec in run_experiment(parse_config(text))]
    assert a == b


def test_run_experiment_failed_cell_recorded(monkeypatch):
    def boom(a, params):
        raise DecompositionError("forced")

    monkeypatch.setattr(bench_mod, "sparse_randomized_lu", boom)
    config = parse_config(
        "matrix = exp_decay n=32 seed=1\nranks = 2\n"
        "algorithms = sparse_lu\nseeds = 0\n")
    records = run_experiment(config)
    assert len(records) == 1
    assert math.isnan(records[0].error)
    assert records[0].ratio is None


# ---------------------------------------------------------------------------
# emission


def _record():
    return BenchRecord(
        algorithm="sparse_lu", matrix="step_exp(n=64,r=4,seed=9)",
        n=64, m=64, r=4, k1=12, l1=48, k2=20, l2=80, seed=3,
        error=1.234567890123456e-7, delta_r=3.33e-8,
        ratio=1.234567890123456e-7 / 3.33e-8,
        timings={"sketch1": 0.25, "lu1": 0.5, "sketch2": 0.125,
                 "pinv": 0.0625, "lu2": 0.03125, "total": 1.0})


def test_emit_empty_csv(tmp_path):
    path = tmp_path / "out.csv"
    emit_results([], path, "csv")
    assert path.read_text() == CSV_HEADER + "\n"


def test_emit_csv_roundtrip_bit_exact(tmp_path):
    import csv

    rec = _record()
    path = tmp_path / "out.csv"
    emit_results([rec], path, "csv")
    with open(path, newline="") as fh:
        header, row = list(csv.reader(fh))
    assert ",".join(header) == CSV_HEADER
    fields = dict(zip(header, row))
    assert fields["matrix"] == rec.matrix
    assert float(fields["error"]) == rec.error
    assert float(fields["delta_r"]) == rec.delta_r
    assert float(fields["t_total"]) == 1.0
    # ratio column recomputes from the same row
    assert float(fields["ratio"]) == pytest.approx(
        float(fields["error"]) / float(fields["delta_r"]), rel=1e-15)


def test_emit_jsonl_mirrors_fields(tmp_path):
    rec = _record()
    path = tmp_path / "out.jsonl"
    emit_results([rec], path, "jsonl")
    obj = json.loads(path.read_text().strip())
    assert obj["algorithm"] == "sparse_lu"
    assert obj["error"] == rec.error
    assert obj["t_sketch1"] == 0.25
    assert obj["ratio"] == rec.ratio


def test_emit_exact_rank_ratio_blank(tmp_path):
    import csv

    rec = _record()
    rec.ratio = None
    path = tmp_path / "out.csv"
    emit_results([rec], path, "csv")
    with open(path, newline="") as fh:
        _, row = list(csv.reader(fh))
    assert row[12] == ""
