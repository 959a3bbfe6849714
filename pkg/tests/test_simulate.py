import math

import numpy as np
import pytest

from rank_cenet.config import NoiseFamily, Scenario, SimSpec
from rank_cenet.data.simulate import (
    ar1_covariance,
    calibrate_sigma,
    default_beta_star,
    generate_dataset,
    rng_stream,
    sample_noise,
)
from rank_cenet.errors import InvalidInputError


def test_ar1_covariance():
    np.testing.assert_array_equal(ar1_covariance(4, 0.0).entries, np.eye(4))
    np.testing.assert_allclose(ar1_covariance(2, 0.3).entries, [[1.0, 0.3], [0.3, 1.0]])
    assert ar1_covariance(3, 0.3).entries[0, 2] == pytest.approx(0.09)
    with pytest.raises(InvalidInputError):
        ar1_covariance(3, 1.0)


def test_calibrate_sigma():
    sigma_xx = ar1_covariance(100, 0.3)
    beta = default_beta_star(100)
    signal = beta @ sigma_xx.entries @ beta
    assert signal == pytest.approx(44.196)
    assert calibrate_sigma(sigma_xx, beta, 0.5) == pytest.approx(signal)
    assert calibrate_sigma(sigma_xx, beta, 0.6) == pytest.approx(29.464)
    assert calibrate_sigma(sigma_xx, beta, 1 - 1e-9) < 1e-6
    with pytest.raises(InvalidInputError):
        calibrate_sigma(sigma_xx, np.zeros(100), 0.5)
    with pytest.raises(InvalidInputError):
        calibrate_sigma(sigma_xx, beta, 1.0)


def test_default_beta_star():
    np.testing.assert_array_equal(default_beta_star(6), [1, 2, 3, 4, 0, 0])
    with pytest.raises(InvalidInputError):
        default_beta_star(3)


@pytest.mark.parametrize("sigma", [0.5, 2.0])
def test_noise_moments(sigma):
    n = 1_000_000
    normal = sample_noise(NoiseFamily.NORMAL, sigma, n, rng_stream(1))
    assert abs(normal.mean()) < 0.01 * sigma

    gamma = sample_noise(NoiseFamily.CENTRALIZED_GAMMA, sigma, n, rng_stream(2))
    assert abs(gamma.mean()) < 0.01 * sigma
    assert gamma.var() == pytest.approx(sigma**2, rel=0.01)

    mixture = sample_noise(NoiseFamily.MIXTURE_NORMAL, sigma, n, rng_stream(3))
    assert abs(mixture.mean()) < 0.01 * math.sqrt(sigma**2 + 9)
    assert mixture.var() == pytest.approx(sigma**2 + 9, rel=0.01)


def test_contaminated_noise_is_heavy_tailed():
    noise = sample_noise(NoiseFamily.CONTAMINATED_NORMAL, 1.0, 100_000, rng_stream(4))
    assert np.median(noise) == pytest.approx(0.0, abs=0.05)
    # Roughly 20% Cauchy draws with scale 10 put far more mass beyond 5 than a unit normal.
    assert np.mean(np.abs(noise) > 5) > 0.1


def test_noise_requires_positive_sigma():
    with pytest.raises(InvalidInputError):
        sample_noise(NoiseFamily.NORMAL, 0.0, 10, rng_stream(0))


def test_zero_noise_cube_root_recovers_linear_index():
    spec = SimSpec(n=100, p=10, scenario=Scenario.CUBE_ROOT, seed=5)
    data, truth = generate_dataset(spec, zero_noise=True)
    np.testing.assert_allclose(np.cbrt(data.y), data.x @ truth.beta_star, rtol=1e-12, atol=1e-12)


def test_independent_design_has_identity_covariance():
    data, _ = generate_dataset(SimSpec(n=100_000, p=5, rho=0.0, seed=6))
    cov = np.cov(data.x, rowvar=False, bias=True)
    assert np.max(np.abs(cov - np.eye(5))) < 0.02


def test_scenarios_share_design_and_ranks():
    identity, _ = generate_dataset(SimSpec(n=200, p=8, seed=7))
    cube, _ = generate_dataset(SimSpec(n=200, p=8, seed=7, scenario=Scenario.CUBE_ROOT))
    np.testing.assert_array_equal(identity.x, cube.x)
    np.testing.assert_array_equal(np.argsort(identity.y, kind="stable"), np.argsort(cube.y, kind="stable"))


@pytest.mark.parametrize("noise", list(NoiseFamily))
def test_generation_is_reproducible(noise):
    spec = SimSpec(n=50, p=6, noise=noise, seed=123)
    first, _ = generate_dataset(spec, replicate=3)
    second, _ = generate_dataset(spec, replicate=3)
    other, _ = generate_dataset(spec, replicate=4)
    np.testing.assert_array_equal(first.x, second.x)
    np.testing.assert_array_equal(first.y, second.y)
    assert not np.array_equal(first.y, other.y)


def test_calibrated_r_squared():
    spec = SimSpec(n=100_000, p=20, r_squared=0.6, seed=8)
    data, truth = generate_dataset(spec)
    noise = data.y - data.x @ truth.beta_star
    assert truth.r_squared_empirical(data.x, noise) == pytest.approx(0.6, abs=0.02)


def test_sim_spec_json_field_names():
    spec = SimSpec(n=10, p=5, rho=0.2, r_squared=0.5, scenario="cube_root", noise="mixture_normal", seed=9)
    payload = spec.model_dump(mode="json")
    assert set(payload) == {"n", "p", "rho", "r_squared", "scenario", "noise", "seed"}
    assert payload["scenario"] == "cube_root"
    assert SimSpec.model_validate_json(spec.model_dump_json()) == spec
