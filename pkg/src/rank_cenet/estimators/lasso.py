"""
Lasso linear regression, the comparison method.

Objective (1/(2n)) ||y - b0 - X beta||^2 + lambda ||beta||_1, with the
intercept handled by centering. Solved by the same coordinate descent as the
CENet inner step on A = Xc^T Xc / n and c = Xc^T yc / n.
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from ..data.dataset import Dataset
from ..errors import InvalidInputError
from .coordinate import coordinate_descent

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LassoFit:
    """Lasso solution at one lambda."""

    beta: np.ndarray
    intercept: float
    lambda_: float
    converged: bool
    iterations: int

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self.beta))

    @property
    def penalty(self) -> float:
        return self.lambda_


class _Gram(NamedTuple):
    a: np.ndarray
    c: np.ndarray
    x_mean: np.ndarray
    y_mean: float


def _gram(data: Dataset) -> _Gram:
    x_mean = data.x.mean(axis=0)
    y_mean = float(data.y.mean())
    xc = data.x - x_mean
    xc[:, np.ptp(data.x, axis=0) == 0] = 0.0
    yc = data.y - y_mean
    n = data.n
    return _Gram(a=xc.T @ xc / n, c=xc.T @ yc / n, x_mean=x_mean, y_mean=y_mean)


def lasso_null_lambda(data: Dataset) -> float:
    """Smallest lambda with the all-zero solution: (1/n) ||Xc^T yc||_inf."""
    return float(np.max(np.abs(_gram(data).c)))


def _solve(
    gram: _Gram,
    lam: float,
    beta0: np.ndarray,
    tol: float,
    max_iter: int,
) -> LassoFit:
    if lam < 0:
        raise InvalidInputError(f"lambda must be >= 0, got {lam}")
    result = coordinate_descent(gram.a, gram.c, 2.0 * lam, beta0, tol, max_iter)
    if not result.converged:
        logger.warning(f"Lasso did not converge in {max_iter} sweeps (lambda={lam:g})")
    beta = result.beta
    beta.setflags(write=False)
    return LassoFit(
        beta=beta,
        intercept=gram.y_mean - float(gram.x_mean @ beta),
        lambda_=float(lam),
        converged=result.converged,
        iterations=result.sweeps,
    )


def lasso_fit(
    data: Dataset,
    lam: float,
    beta0: Optional[np.ndarray] = None,
    tol: float = 1e-10,
    max_iter: int = 100000,
) -> LassoFit:
    """
    Fit the lasso at one lambda.

    Args:
        data: Dataset
        lam: Penalty (>= 0)
        beta0: Warm start; zeros when omitted
        tol: Coordinate-change tolerance
        max_iter: Sweep cap; exceeding it sets converged=False

    Returns:
        LassoFit
    """
    beta0 = np.zeros(data.p) if beta0 is None else np.asarray(beta0, dtype=float)
    return _solve(_gram(data), lam, beta0, tol, max_iter)


def lasso_path(
    data: Dataset,
    lambda_grid: list[float] | np.ndarray,
    tol: float = 1e-10,
    max_iter: int = 100000,
) -> list[LassoFit]:
    """Warm-started lasso fits along a strictly descending lambda grid."""
    grid = [float(v) for v in np.asarray(lambda_grid, dtype=float).ravel()]
    if not grid:
        raise InvalidInputError("lambda grid is empty")
    if any(v < 0 for v in grid) or any(b >= a for a, b in zip(grid, grid[1:])):
        raise InvalidInputError("lambda grid must be strictly descending and >= 0")

    gram = _gram(data)
    beta = np.zeros(data.p)
    fits = []
    for lam in grid:
        fit = _solve(gram, lam, beta, tol, max_iter)
        fits.append(fit)
        beta = fit.beta
    return fits


def lasso_kkt_residual(data: Dataset, fit: LassoFit) -> float:
    """
    Largest KKT violation of a lasso fit.

    With g = (1/n) Xc^T (yc - Xc beta): |g_j - lambda sign(beta_j)| on the
    support and max(|g_j| - lambda, 0) off it.
    """
    gram = _gram(data)
    beta = np.asarray(fit.beta, dtype=float)
    g = gram.c - gram.a @ beta
    lam = fit.lambda_
    r = np.where(beta != 0, np.abs(g - lam * np.sign(beta)), np.maximum(np.abs(g) - lam, 0.0))
    return float(np.max(r))
