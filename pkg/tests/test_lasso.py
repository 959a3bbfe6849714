import numpy as np
import pytest

from rank_cenet.data.dataset import Dataset
from rank_cenet.errors import InvalidInputError
from rank_cenet.estimators.lasso import lasso_fit, lasso_kkt_residual, lasso_null_lambda, lasso_path

from conftest import random_dataset


def test_zero_above_null_lambda(small_data):
    null = lasso_null_lambda(small_data)
    fit = lasso_fit(small_data, null * 1.0001)
    assert fit.nnz == 0
    assert fit.converged
    assert fit.intercept == pytest.approx(small_data.y.mean())
    assert lasso_fit(small_data, 0.99 * null).nnz > 0


def test_ols_on_orthonormal_design(rng):
    n, p = 40, 5
    raw = rng.standard_normal((n, p))
    q, _ = np.linalg.qr(raw - raw.mean(axis=0))
    x = q * np.sqrt(n)
    y = x @ np.array([1.0, -2.0, 0.5, 0.0, 3.0]) + 0.1 * rng.standard_normal(n) + 4.0
    data = Dataset(x, y)
    fit = lasso_fit(data, 0.0)
    design = np.column_stack([np.ones(n), x])
    ols, *_ = np.linalg.lstsq(design, y, rcond=None)
    np.testing.assert_allclose(fit.beta, ols[1:], atol=1e-8)
    assert fit.intercept == pytest.approx(ols[0], abs=1e-8)


def test_constant_response(rng):
    data = Dataset(rng.standard_normal((20, 4)), np.full(20, 2.5))
    fit = lasso_fit(data, 0.1)
    assert fit.nnz == 0
    assert fit.intercept == pytest.approx(2.5)


def test_kkt_residual_on_random_instances(rng):
    for _ in range(100):
        data = random_dataset(rng, n=int(rng.integers(20, 60)), p=int(rng.integers(3, 15)))
        lam = float(rng.uniform(0.01, 1.0)) * lasso_null_lambda(data)
        fit = lasso_fit(data, lam)
        assert fit.converged
        assert lasso_kkt_residual(data, fit) < 1e-6


def test_path_matches_cold_starts(small_data):
    null = lasso_null_lambda(small_data)
    grid = null * np.logspace(0.5, -3, 12)
    fits = lasso_path(small_data, grid)
    assert [f.nnz for f in fits[:2]] == [0, 0]
    for lam, fit in zip(grid, fits):
        cold = lasso_fit(small_data, lam)
        assert np.max(np.abs(fit.beta - cold.beta)) < 1e-6
        assert fit.penalty == lam


def test_single_point_path(small_data):
    (fit,) = lasso_path(small_data, [0.05])
    np.testing.assert_allclose(fit.beta, lasso_fit(small_data, 0.05).beta, atol=1e-12)


def test_bad_inputs(small_data):
    with pytest.raises(InvalidInputError):
        lasso_fit(small_data, -1.0)
    with pytest.raises(InvalidInputError):
        lasso_path(small_data, [0.1, 0.5])


def test_constant_column_stays_zero(rng):
    x = rng.standard_normal((30, 3))
    x[:, 1] = 1.0
    data = Dataset(x, x[:, 0] + rng.standard_normal(30))
    fit = lasso_fit(data, 0.0)
    assert fit.beta[1] == 0.0
    assert fit.converged
