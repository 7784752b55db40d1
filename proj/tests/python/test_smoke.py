"""Smoke tests for the python extension module."""

import math

import numpy as np
import pytest

try:
    import ustatboot as ub
except ImportError:
    import _ustatboot as ub


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)


def test_cov_ustat_matches_numpy(rng):
    data = rng.normal(size=(50, 4))
    out = ub.ustat(data, kernel="cov")
    np.testing.assert_allclose(out["matrix"], np.cov(data, rowvar=False), rtol=1e-10)
    assert out["n"] == 50
    assert out["d"] == 10


def test_mean_ustat(rng):
    data = rng.normal(size=(30, 3))
    out = ub.ustat(data, kernel="mean")
    np.testing.assert_allclose(out["u"], data.mean(axis=0), rtol=1e-12)


def test_kendall_entries_are_probabilities(rng):
    data = rng.normal(size=(40, 3))
    out = ub.ustat(data, kernel="kendall")
    assert ((out["u"] >= 0) & (out["u"] <= 1)).all()


def test_hajek_columns_sum_to_zero(rng):
    data = rng.normal(size=(25, 3))
    ghat = ub.hajek(data, kernel="cov")["ghat"]
    np.testing.assert_allclose(ghat.sum(axis=0), 0.0, atol=1e-10)


def test_multiplier_cov_is_psd(rng):
    data = rng.normal(size=(30, 3))
    gamma = ub.multiplier_cov(data, kernel="cov")
    eigvals = np.linalg.eigvalsh(gamma)
    assert eigvals.min() >= -1e-12 * max(eigvals.max(), 1.0)


def test_bootstrap_determinism(rng):
    data = rng.normal(size=(40, 3))
    a = ub.run_bootstrap(data, kernel="cov", method="mult", B=64, seed=7, threads=1)
    b = ub.run_bootstrap(data, kernel="cov", method="mult", B=64, seed=7, threads=4)
    np.testing.assert_array_equal(a, b)


def test_quantile_is_order_statistic():
    values = np.array([0.1, 0.2, 0.3, 0.4, 0.5])
    assert ub.quantile(values, 0.9) == 0.5
    assert ub.quantile(values, 0.5) == 0.3


def test_threshold_inverse_beta(rng):
    data = rng.normal(size=(40, 4))
    full = ub.select_threshold(data, alpha=0.1, beta=1.0, B=200, seed=3)
    half = ub.select_threshold(data, alpha=0.1, beta=0.5, B=200, seed=3)
    assert half["tau_star"] == 2.0 * full["tau_star"]
    s = np.cov(data, rowvar=False)
    kept = full["thresholded"]
    assert ((kept == 0) | (np.abs(kept - s) < 1e-10)).all()


def test_matrix_norms():
    norms = ub.matrix_norms(np.diag([2.0, 3.0]))
    assert norms["spectral"] == pytest.approx(3.0, abs=1e-9)
    assert norms["frobenius"] == pytest.approx(math.sqrt(13.0))
    assert norms["off_sup"] == 0.0


def test_cov_test_accepts_its_own_covariance(rng):
    data = rng.normal(size=(60, 3))
    s = ub.ustat(data, kernel="cov")["matrix"]
    out = ub.cov_test(data, s, alpha=0.05, B=200, seed=5)
    assert out["statistic"] == 0.0
    assert not out["reject"]


def test_kendall_test_runs(rng):
    data = rng.normal(size=(60, 3))
    null = np.full((3, 3), 0.5)
    np.fill_diagonal(null, 1.0)
    out = ub.kendall_test(data, null, alpha=0.05, B=200, seed=5)
    assert 0.0 <= out["pvalue"] <= 1.0


def test_dependence_and_models():
    v = ub.build_dependence("d2", 3)
    assert v[0, 1] == pytest.approx(0.7)
    g = ub.gamma_model("m1", dep="d1", p=3, epsilon=0.2, nu=1.5)
    assert g["kurtosis"] == pytest.approx(0.16)
    np.testing.assert_allclose(np.diag(g["sigma"]), 1.25)
    # gaussian identity case: diagonal pair entries are 1/4
    assert ub.gamma_entry(0.0, np.eye(3), 0, 1, 0, 1) == pytest.approx(0.25)


def test_sample_model_shapes_and_reproducibility():
    a = ub.sample_model("m1", dep="d3", n=20, p=4, seed=9)
    b = ub.sample_model("m1", dep="d3", n=20, p=4, seed=9)
    assert a.shape == (20, 4)
    np.testing.assert_array_equal(a, b)


def test_ks_distance():
    assert ub.ks_distance(np.array([0.0]), np.array([1.0])) == 1.0
    assert ub.ks_distance(np.array([1.0, 2.0]), np.array([1.5])) == 0.5


def test_run_cell_sanity_mode():
    out = ub.run_cell("m1", dep="d2", n=60, p=4, reps=400, seed=3, sanity=True)
    assert out["ks"] <= 0.15
    assert len(out["t_max"]) == 400


def test_split_sum(rng):
    data = np.array([[0.0], [1.0], [2.0], [3.0]])
    np.testing.assert_allclose(ub.split_sum(data, kernel="cov"), [2.0])
