"""Synthetic data for the linear transformation model h*(y) = x^T beta* + eps."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from ..config import NoiseFamily, Scenario, SimSpec
from ..errors import InvalidInputError
from ..linalg import SymMatrix, cholesky
from .dataset import Dataset

logger = logging.getLogger(__name__)

LEADING_COEFFICIENTS = (1.0, 2.0, 3.0, 4.0)


@dataclass(frozen=True)
class TrueModel:
    """Population quantities behind a simulated dataset."""

    beta_star: np.ndarray
    sigma: float
    sigma_xx: SymMatrix

    def signal_variance(self) -> float:
        """Var(x^T beta*) = beta*^T Sigma beta*."""
        return float(self.beta_star @ self.sigma_xx.entries @ self.beta_star)

    def r_squared_empirical(self, x: np.ndarray, noise: np.ndarray) -> float:
        """Sample Var(x^T beta*) / (Var(x^T beta*) + Var(noise))."""
        signal = float(np.var(x @ self.beta_star))
        return signal / (signal + float(np.var(noise)))


def rng_stream(seed: int, replicate: int = 0) -> np.random.Generator:
    """
    Independent generator for one replicate.

    The stream depends only on (seed, replicate), so replicates can run in
    any order or in parallel.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(replicate,)))


def ar1_covariance(p: int, rho: float) -> SymMatrix:
    """Covariance with entry (i, j) = rho^|i - j|."""
    if p < 1:
        raise InvalidInputError(f"p must be positive, got {p}")
    if not abs(rho) < 1:
        raise InvalidInputError(f"|rho| must be < 1, got {rho}")
    lag = np.abs(np.subtract.outer(np.arange(p), np.arange(p)))
    return SymMatrix(np.power(float(rho), lag))


def default_beta_star(p: int) -> np.ndarray:
    """(1, 2, 3, 4, 0, ..., 0)."""
    if p < len(LEADING_COEFFICIENTS):
        raise InvalidInputError(f"p must be >= {len(LEADING_COEFFICIENTS)}, got {p}")
    beta = np.zeros(p)
    beta[: len(LEADING_COEFFICIENTS)] = LEADING_COEFFICIENTS
    return beta


def calibrate_sigma(sigma_xx: SymMatrix, beta_star: np.ndarray, r_squared: float) -> float:
    """
    Noise variance achieving the requested R^2.

    Returns:
        sigma^2 = beta*^T Sigma beta* (1 - R^2) / R^2
    """
    if not 0 < r_squared < 1:
        raise InvalidInputError(f"r_squared must be in (0, 1), got {r_squared}")
    signal = float(beta_star @ sigma_xx.entries @ beta_star)
    if signal <= 0:
        raise InvalidInputError("beta*^T Sigma beta* must be positive")
    return signal * (1.0 - r_squared) / r_squared


def sample_noise(noise: NoiseFamily, sigma: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """
    Draw n noise values.

    normal:              N(0, sigma^2)
    contaminated_normal: N(0, sigma^2) w.p. 0.8, else Cauchy(0, 10 sigma)
    mixture_normal:      N(-3, sigma^2) w.p. 0.5, else N(3, sigma^2)
    centralized_gamma:   sigma (z - sqrt(3)), z ~ Gamma(shape 3, rate sqrt(3))

    Every family draws its arrays in a fixed order so output is reproducible.
    """
    if not sigma > 0:
        raise InvalidInputError(f"sigma must be positive, got {sigma}")
    noise = NoiseFamily(noise)

    if noise is NoiseFamily.NORMAL:
        return rng.normal(0.0, sigma, n)

    if noise is NoiseFamily.CONTAMINATED_NORMAL:
        clean = rng.random(n) < 0.8
        gaussian = rng.normal(0.0, sigma, n)
        cauchy = 10.0 * sigma * np.tan(np.pi * (rng.random(n) - 0.5))
        return np.where(clean, gaussian, cauchy)

    if noise is NoiseFamily.MIXTURE_NORMAL:
        left = rng.random(n) < 0.5
        gaussian = rng.normal(0.0, sigma, n)
        return np.where(left, gaussian - 3.0, gaussian + 3.0)

    if noise is NoiseFamily.CENTRALIZED_GAMMA:
        root3 = math.sqrt(3.0)
        z = rng.gamma(shape=3.0, scale=1.0 / root3, size=n)
        return sigma * (z - root3)

    raise InvalidInputError(f"unknown noise family: {noise}")


def generate_dataset(
    spec: SimSpec,
    replicate: int = 0,
    zero_noise: bool = False,
) -> tuple[Dataset, TrueModel]:
    """
    Simulate one dataset.

    x rows are i.i.d. N(0, Sigma) with Sigma_ij = rho^|i-j|; the latent
    t = x^T beta* + eps; y = t (identity) or y = t^3 (cube_root).

    Args:
        spec: Simulation settings
        replicate: Replicate index selecting the random stream
        zero_noise: Force eps = 0 (the noise draws are still consumed)

    Returns:
        Tuple of (Dataset, TrueModel)
    """
    sigma_xx = ar1_covariance(spec.p, spec.rho)
    beta_star = default_beta_star(spec.p)
    sigma = math.sqrt(calibrate_sigma(sigma_xx, beta_star, spec.r_squared))

    rng = rng_stream(spec.seed, replicate)
    factor = cholesky(sigma_xx)
    x = rng.standard_normal((spec.n, spec.p)) @ factor.T
    eps = sample_noise(spec.noise, sigma, spec.n, rng)
    if zero_noise:
        eps = np.zeros(spec.n)

    latent = x @ beta_star + eps
    if spec.scenario is Scenario.CUBE_ROOT:
        y = latent**3
    else:
        y = latent

    beta_star.setflags(write=False)
    logger.debug(
        f"Simulated n={spec.n} p={spec.p} scenario={spec.scenario.value} "
        f"noise={spec.noise.value} replicate={replicate} sigma={sigma:.4f}"
    )
    return Dataset(x, y), TrueModel(beta_star=beta_star, sigma=sigma, sigma_xx=sigma_xx)
