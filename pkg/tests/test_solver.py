import numpy as np
import pytest

from rank_cenet.config import CenetConfig, SimSpec
from rank_cenet.data.rank import RankMoments, rank_cross_cov
from rank_cenet.data.simulate import generate_dataset
from rank_cenet.errors import InvalidConfigError, InvalidInputError, NotPositiveDefiniteError
from rank_cenet.estimators.cenet import (
    AdmmState,
    CenetSolver,
    alpha_max,
    cenet_fit,
    cenet_objective,
    cenet_path,
    inner_lasso,
    kkt_residual,
    project_ball,
)
from rank_cenet.estimators.coordinate import active_set_lasso
from rank_cenet.linalg import SymMatrix

from conftest import random_dataset

TIGHT = dict(tol=1e-9, max_outer_iter=100000)


def moments_of(sigma_xx, sigma_xy) -> RankMoments:
    sigma_xx = SymMatrix(np.atleast_2d(np.asarray(sigma_xx, dtype=float)))
    sigma_xy = np.asarray(sigma_xy, dtype=float)
    sigma_hat = np.sqrt(np.diag(sigma_xx.entries))
    return RankMoments(sigma_xx=sigma_xx, sigma_xy=sigma_xy, sigma_hat=sigma_hat, tau_hat=np.zeros_like(sigma_xy))


def test_alpha_max():
    assert alpha_max(np.array([0.5, -0.8, 0.1])) == 0.8
    assert alpha_max(np.zeros(3)) == 0.0
    assert alpha_max(np.array([1.0])) == 1.0
    with pytest.raises(InvalidInputError):
        alpha_max(np.array([]))


def test_project_ball():
    np.testing.assert_allclose(project_ball(np.array([0.3, 0.4])), [0.3, 0.4])
    np.testing.assert_allclose(project_ball(np.array([3.0, 4.0])), [0.6, 0.8])
    np.testing.assert_array_equal(project_ball(np.zeros(2)), [0.0, 0.0])


def test_inner_lasso_examples():
    result = inner_lasso(np.eye(2), np.array([1.0, 0.2]), 0.5, np.zeros(2))
    np.testing.assert_allclose(result.beta, [0.75, 0.0], atol=1e-12)
    assert result.converged

    c = np.array([0.3, -1.2, 2.5])
    np.testing.assert_allclose(inner_lasso(np.eye(3), c, 0.0, np.zeros(3)).beta, c, atol=1e-12)

    result = inner_lasso(np.diag([2.0, 2.0]), np.array([1.0, 1.0]), 0.0, np.zeros(2))
    np.testing.assert_allclose(result.beta, [0.5, 0.5], atol=1e-12)


def test_inner_lasso_diagonal_closed_form(rng):
    for _ in range(100):
        p = int(rng.integers(1, 20))
        diag = rng.uniform(0.1, 5.0, p)
        c = rng.normal(0.0, 2.0, p)
        lam = float(rng.uniform(0.0, 3.0))
        beta = inner_lasso(np.diag(diag), c, lam, rng.standard_normal(p)).beta
        expected = np.sign(c) * np.maximum(np.abs(c) - lam / 2, 0.0) / diag
        np.testing.assert_allclose(beta, expected, atol=1e-10)


def test_inner_lasso_rejects_non_positive_diagonal():
    with pytest.raises(NotPositiveDefiniteError):
        inner_lasso(np.diag([1.0, 0.0]), np.ones(2), 0.1, np.zeros(2))
    with pytest.raises(InvalidInputError):
        inner_lasso(np.eye(2), np.ones(3), 0.1, np.zeros(3))


def test_inner_lasso_reports_iteration_cap(rng):
    a = rng.standard_normal((10, 10))
    a = a @ a.T + 0.01 * np.eye(10)
    result = inner_lasso(a, rng.standard_normal(10), 0.01, np.zeros(10), tol=1e-14, max_iter=1)
    assert not result.converged


def test_one_dimensional_examples():
    moments = moments_of([[1.0]], [1.0])
    fit = cenet_fit(moments, CenetConfig(alpha1=0.1, alpha2=0.01, **TIGHT))
    assert fit.converged
    assert fit.beta[0] == pytest.approx(1.0, abs=1e-3)
    assert fit.on_boundary

    fit = cenet_fit(moments, CenetConfig(alpha1=0.0, alpha2=1.0, **TIGHT))
    assert fit.beta[0] == pytest.approx(0.5, abs=1e-3)
    assert not fit.on_boundary


def test_alpha2_must_be_positive():
    moments = moments_of([[1.0]], [1.0])
    with pytest.raises(InvalidConfigError):
        cenet_path(moments, [0.1], alpha2=0.0)
    with pytest.raises(ValueError):
        CenetConfig(alpha2=0.0)


def test_sparsity_threshold(rng):
    for seed in range(1, 101):
        data = random_dataset(np.random.default_rng(seed), n=50, p=20)
        solver = CenetSolver(rank_cross_cov(data))
        top = solver.alpha_max
        above = solver.fit(CenetConfig(alpha1=1.0001 * top))
        assert not np.any(above.beta)
        assert above.kkt_residual == 0.0
        below = solver.fit(CenetConfig(alpha1=0.99 * top))
        assert np.any(below.beta)


def test_kkt_residual_at_zero():
    moments = moments_of(np.eye(3), [0.4, -0.2, 0.1])
    assert kkt_residual(np.zeros(3), moments, alpha1=0.4, alpha2=1e-8) == 0.0
    assert kkt_residual(np.zeros(3), moments, alpha1=0.2, alpha2=1e-8) == pytest.approx(0.2)


def test_fits_are_feasible_unique_and_stationary(rng):
    for _ in range(20):
        data = random_dataset(rng, n=50, p=15)
        solver = CenetSolver(rank_cross_cov(data))
        config = CenetConfig(alpha1=float(rng.uniform(0.05, 0.6)) * solver.alpha_max, alpha2=1e-8, **TIGHT)
        cold = solver.fit(config)

        theta0 = rng.standard_normal(data.p)
        theta0 /= np.linalg.norm(theta0)
        warm = solver.fit(config, warm_start=AdmmState(np.zeros(data.p), theta0, np.zeros(data.p)))

        for fit in (cold, warm):
            assert fit.converged
            assert fit.constraint_value <= 1 + 1e-6
            assert fit.kkt_residual < 1e-4
        assert np.max(np.abs(cold.beta - warm.beta)) < 1e-4


def test_solution_beats_feasible_perturbations(rng):
    data = random_dataset(rng, n=60, p=8)
    moments = rank_cross_cov(data)
    solver = CenetSolver(moments)
    config = CenetConfig(alpha1=0.2 * solver.alpha_max, alpha2=1e-3, **TIGHT)
    fit = solver.fit(config)
    sxx = moments.sigma_xx.entries
    for _ in range(100):
        candidate = fit.beta + 0.05 * rng.standard_normal(data.p)
        value = candidate @ sxx @ candidate
        if value > 1:
            candidate = candidate / np.sqrt(value)
        other = cenet_objective(candidate, moments.sigma_xy, config.alpha1, config.alpha2)
        assert fit.objective <= other + 1e-6


def _grid_minimum(moments: RankMoments, alpha1: float, alpha2: float) -> np.ndarray:
    """
    Minimizer of the CENet objective on the feasible set by exhaustive search.

    p = 1: grid over the feasible interval at step 1e-5. p = 2: the
    unconstrained minimizer soft(Sxy, alpha1) / (2 alpha2) if it is feasible,
    otherwise the best point of an angular grid on the boundary ellipse,
    refined from step 1e-5 to 1e-9.
    """
    sxx = moments.sigma_xx.entries
    sxy = moments.sigma_xy

    def objective(points):
        return -points @ sxy + alpha1 * np.abs(points).sum(axis=1) + alpha2 * (points**2).sum(axis=1)

    if sxx.shape[0] == 1:
        bound = 1.0 / np.sqrt(sxx[0, 0])
        points = np.append(np.arange(-bound, bound, 1e-5), bound)[:, None]
        return points[int(np.argmin(objective(points)))]

    free = np.sign(sxy) * np.maximum(np.abs(sxy) - alpha1, 0.0) / (2 * alpha2)
    if free @ sxx @ free <= 1.0:
        return free

    inverse_factor = np.linalg.inv(np.linalg.cholesky(sxx)).T
    angles = np.arange(0.0, 2 * np.pi, 1e-5)
    step = 1e-5
    while True:
        points = np.column_stack([np.cos(angles), np.sin(angles)]) @ inverse_factor.T
        best = int(np.argmin(objective(points)))
        if step <= 1e-9:
            return points[best]
        center = angles[best]
        step /= 100
        angles = center + np.arange(-200, 201) * step


def test_matches_grid_search_in_one_and_two_dimensions(rng):
    for trial in range(50):
        p = 1 + trial % 2
        a = rng.standard_normal((p + 2, p))
        sxx = a.T @ a / (p + 2) + 0.5 * np.eye(p)
        sxy = rng.uniform(-1.0, 1.0, p)
        moments = moments_of(sxx, sxy)
        alpha1 = float(rng.uniform(0.0, 0.5)) * alpha_max(sxy)
        alpha2 = float(rng.uniform(0.05, 1.0))
        fit = cenet_fit(moments, CenetConfig(alpha1=alpha1, alpha2=alpha2, **TIGHT))
        oracle = _grid_minimum(moments, alpha1, alpha2)
        np.testing.assert_allclose(fit.beta, oracle, atol=1e-3)


def test_path_zero_above_alpha_max_and_matches_cold_starts(rng):
    data = random_dataset(rng, n=50, p=10)
    moments = rank_cross_cov(data)
    solver = CenetSolver(moments)
    top = solver.alpha_max
    grid = [2 * top, 1.01 * top, 0.5 * top, 0.1 * top, 0.01 * top]
    fits = solver.path(grid, CenetConfig(**TIGHT))
    assert not np.any(fits[0].beta) and not np.any(fits[1].beta)
    for alpha1, fit in zip(grid, fits):
        cold = solver.fit(CenetConfig(alpha1=alpha1, **TIGHT))
        assert np.max(np.abs(fit.beta - cold.beta)) < 1e-4
        assert fit.alpha1 == alpha1


def test_single_point_path_equals_fit(small_data):
    moments = rank_cross_cov(small_data)
    alpha1 = 0.3 * alpha_max(moments.sigma_xy)
    (point,) = cenet_path(moments, [alpha1], alpha2=1e-8)
    fit = cenet_fit(moments, CenetConfig(alpha1=alpha1))
    np.testing.assert_array_equal(point.beta, fit.beta)


def test_path_rejects_bad_grid(small_data):
    moments = rank_cross_cov(small_data)
    with pytest.raises(InvalidInputError):
        cenet_path(moments, [0.1, 0.2], alpha2=1e-8)
    with pytest.raises(InvalidInputError):
        cenet_path(moments, [], alpha2=1e-8)


@pytest.mark.parametrize("transform", [lambda y: y**3, np.exp])
def test_fit_is_invariant_to_monotone_transform(rng, transform):
    for _ in range(10):
        data = random_dataset(rng, n=40, p=8)
        config = CenetConfig(alpha1=0.05)
        base = cenet_fit(rank_cross_cov(data), config)
        other = cenet_fit(rank_cross_cov(data.with_response(transform(data.y))), config)
        np.testing.assert_array_equal(base.beta, other.beta)


def test_iteration_cap_is_reported(small_data):
    moments = rank_cross_cov(small_data)
    fit = cenet_fit(moments, CenetConfig(alpha1=0.01, tol=1e-14, max_outer_iter=2))
    assert not fit.converged
    assert fit.iterations == 2


def test_high_dimensional_fit(rng):
    # p > n: Sxx is singular and only the l2 term keeps the inner problem definite.
    data = random_dataset(rng, n=30, p=60)
    solver = CenetSolver(rank_cross_cov(data))
    fit = solver.fit(CenetConfig(alpha1=0.3 * solver.alpha_max, alpha2=1e-3))
    assert fit.converged
    assert fit.constraint_value <= 1 + 1e-6
    assert 0 < fit.nnz < data.p


def _lasso_violation(a, c, lam, beta):
    residual = c - a @ beta
    return float(np.max(np.where(beta != 0, np.abs(residual - lam / 2 * np.sign(beta)), np.abs(residual) - lam / 2)))


def test_active_set_lasso_matches_coordinate_descent(rng):
    for _ in range(50):
        p = int(rng.integers(1, 12))
        m = rng.standard_normal((p + 3, p))
        a = m.T @ m / (p + 3) + 0.2 * np.eye(p)
        c = rng.standard_normal(p)
        lam = float(rng.uniform(0.0, 2.0))
        exact = active_set_lasso(a, c, lam, np.zeros(p), tol=1e-12, max_iter=1000)
        descent = inner_lasso(a, c, lam, np.zeros(p), tol=1e-13, max_iter=100000)
        assert exact.converged
        np.testing.assert_allclose(exact.beta, descent.beta, atol=1e-8)


def test_active_set_lasso_on_nearly_singular_matrix(rng):
    # Rank-10 Gram matrix in 40 dimensions plus a 1e-8 ridge.
    m = rng.standard_normal((10, 40))
    a = m.T @ m / 10 + 1e-8 * np.eye(40)
    c = rng.uniform(-1.0, 1.0, 40)
    lam = 0.1 * float(np.max(np.abs(c)))
    for start in (np.zeros(40), rng.standard_normal(40)):
        result = active_set_lasso(a, c, lam, start, tol=1e-10, max_iter=10000)
        assert result.converged
        assert np.linalg.norm(result.beta) > 1e3
        assert _lasso_violation(a, c, lam, result.beta) < 1e-6 * (1.0 + np.abs(result.beta).sum())


def test_p_greater_than_n_with_tiny_alpha2_converges():
    data, _ = generate_dataset(SimSpec(n=50, p=100, seed=1))
    solver = CenetSolver(rank_cross_cov(data))
    for ratio in (0.05, 0.02):
        fit = solver.fit(CenetConfig(alpha1=ratio * solver.alpha_max, alpha2=1e-8))
        assert fit.converged
        assert fit.kkt_residual < 1e-4
        assert fit.constraint_value <= 1 + 1e-6


def test_unconverged_fit_is_not_rescaled(small_data):
    moments = rank_cross_cov(small_data)
    fit = cenet_fit(moments, CenetConfig(alpha1=0.01, tol=1e-14, max_outer_iter=2))
    assert not fit.converged
    np.testing.assert_array_equal(fit.beta, fit.state.beta)
