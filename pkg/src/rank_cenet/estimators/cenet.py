"""
CENet: constrained elastic net on rank moments, solved by ADMM.

    minimize   -beta^T Sxy + alpha1 ||beta||_1 + alpha2 ||beta||^2
    subject to beta^T Sxx beta <= 1

The ADMM splits S^(1/2) beta = theta with theta in the unit ball. Each
iteration solves a lasso subproblem in beta on A = Sxx + (2 alpha2 / eta) I,
projects onto the ball and updates the dual. The subproblem starts with
coordinate descent; when p > n and alpha2 is tiny, A is nearly singular and an
exact active-set solve on the support takes over.
"""

import logging
import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from ..config import CenetConfig
from ..data.rank import RankMoments
from ..errors import InvalidConfigError, InvalidInputError, NotPositiveDefiniteError
from ..linalg import SymMatrix, psd_sqrt, sym_eigen
from .coordinate import CoordinateResult, active_set_lasso, coordinate_descent

logger = logging.getLogger(__name__)

ACTIVE_TOL = 1e-6
# Coordinate-descent sweeps per beta-step before the exact active-set solve takes over.
INNER_SWEEP_BUDGET = 50
NU_MAX = 1e6
GOLDEN_ITERATIONS = 200


@dataclass(frozen=True)
class AdmmState:
    """ADMM iterates (beta, theta, gamma); used for warm starts."""

    beta: np.ndarray
    theta: np.ndarray
    gamma: np.ndarray

    @classmethod
    def zeros(cls, p: int) -> "AdmmState":
        return cls(np.zeros(p), np.zeros(p), np.zeros(p))


@dataclass(frozen=True)
class CenetFit:
    """
    Result of one CENet fit.

    Attributes:
        beta: Estimated slope
        iterations: ADMM iterations run
        converged: Stopping rule met before the iteration cap
        constraint_value: beta^T Sxx beta
        kkt_residual: Stationarity violation (see kkt_residual)
        objective: -beta^T Sxy + alpha1 ||beta||_1 + alpha2 ||beta||^2
        alpha1: l1 weight used
        alpha2: l2 weight used
        on_boundary: Last ball projection was active
        state: Final ADMM iterates
    """

    beta: np.ndarray
    iterations: int
    converged: bool
    constraint_value: float
    kkt_residual: float
    objective: float
    alpha1: float
    alpha2: float
    on_boundary: bool
    state: AdmmState

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self.beta))

    @property
    def penalty(self) -> float:
        return self.alpha1


def alpha_max(sigma_xy: np.ndarray) -> float:
    """Smallest alpha1 giving the all-zero solution: ||Sxy||_inf."""
    sigma_xy = np.asarray(sigma_xy, dtype=float)
    if sigma_xy.size == 0:
        raise InvalidInputError("sigma_xy is empty")
    return float(np.max(np.abs(sigma_xy)))


def project_ball(v: np.ndarray) -> np.ndarray:
    """Projection onto the Euclidean unit ball: v / max(||v||, 1)."""
    v = np.asarray(v, dtype=float)
    return v / max(float(np.linalg.norm(v)), 1.0)


def _check_lasso_matrix(a: np.ndarray, p: int) -> None:
    if a.ndim != 2 or a.shape != (p, p):
        raise InvalidInputError(f"matrix shape {a.shape} does not match vector length {p}")
    diag = np.diag(a)
    if np.any(diag <= 0):
        raise NotPositiveDefiniteError(f"diagonal entry {float(diag.min()):.3e} is not positive")


def inner_lasso(
    a: SymMatrix | np.ndarray,
    c: np.ndarray,
    lam: float,
    beta0: np.ndarray,
    tol: float = 1e-8,
    max_iter: int = 10000,
) -> CoordinateResult:
    """
    Lasso subproblem: minimize beta^T A beta - 2 c^T beta + lam ||beta||_1.

    Equivalent, up to a constant, to ||z - A^(1/2) beta||^2 + lam ||beta||_1
    with c = A^(1/2) z.

    Args:
        a: Positive definite matrix
        c: Linear term
        lam: l1 weight (>= 0)
        beta0: Warm start
        tol: Stop when a full sweep changes no coordinate by tol or more
        max_iter: Sweep cap; exceeding it sets converged=False

    Returns:
        CoordinateResult(beta, sweeps, converged)
    """
    a = np.asarray(a, dtype=float)
    c = np.asarray(c, dtype=float)
    beta0 = np.asarray(beta0, dtype=float)
    _check_lasso_matrix(a, c.shape[0])
    if beta0.shape != c.shape:
        raise InvalidInputError(f"beta0 length {beta0.shape} does not match c {c.shape}")
    if lam < 0:
        raise InvalidInputError(f"lambda must be >= 0, got {lam}")
    return coordinate_descent(a, c, lam, beta0, tol, max_iter)


def cenet_objective(beta: np.ndarray, sigma_xy: np.ndarray, alpha1: float, alpha2: float) -> float:
    """-beta^T Sxy + alpha1 ||beta||_1 + alpha2 ||beta||^2."""
    beta = np.asarray(beta, dtype=float)
    return float(-beta @ sigma_xy + alpha1 * np.sum(np.abs(beta)) + alpha2 * beta @ beta)


def kkt_residual(
    beta: np.ndarray,
    moments: RankMoments,
    alpha1: float,
    alpha2: float,
    active_tol: float = ACTIVE_TOL,
) -> float:
    """
    Stationarity residual of the CENet problem at beta.

    Minimal sup-norm of -Sxy + alpha1 s + 2 alpha2 beta + 2 nu Sxx beta over
    subgradients s of ||beta||_1 and nu >= 0. nu is 0 when the constraint is
    inactive (beta^T Sxx beta < 1 - active_tol); otherwise it is found by
    golden-section search on [0, 1e6].
    """
    beta = np.asarray(beta, dtype=float)
    sxx = moments.sigma_xx.entries
    base = -np.asarray(moments.sigma_xy, dtype=float) + 2.0 * alpha2 * beta
    curvature = 2.0 * (sxx @ beta)
    nonzero = beta != 0
    signs = np.sign(beta)

    def residual(nu: float) -> float:
        g = base + nu * curvature
        r = np.where(nonzero, np.abs(g + alpha1 * signs), np.maximum(np.abs(g) - alpha1, 0.0))
        return float(np.max(r)) if r.size else 0.0

    at_zero = residual(0.0)
    if float(beta @ sxx @ beta) < 1.0 - active_tol:
        return at_zero

    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    lo, hi = 0.0, NU_MAX
    x1 = hi - inv_phi * (hi - lo)
    x2 = lo + inv_phi * (hi - lo)
    f1, f2 = residual(x1), residual(x2)
    for _ in range(GOLDEN_ITERATIONS):
        if hi - lo <= 1e-12 * (1.0 + lo):
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv_phi * (hi - lo)
            f1 = residual(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv_phi * (hi - lo)
            f2 = residual(x2)
    return min(at_zero, f1, f2, residual((lo + hi) / 2.0))


class CenetSolver:
    """
    ADMM solver bound to one set of rank moments.

    The eigendecomposition of Sxx and its square root are computed once and
    reused by every fit, which makes regularization paths cheap.
    """

    def __init__(
        self,
        moments: RankMoments,
        eigen_method: Literal["jacobi", "lapack"] = "jacobi",
    ):
        """
        Initialize solver.

        Args:
            moments: Rank moments (Sxx, Sxy)
            eigen_method: Eigendecomposition used for Sxx^(1/2)
        """
        self.moments = moments
        self.sigma_xx = moments.sigma_xx.entries
        self.sigma_xy = np.asarray(moments.sigma_xy, dtype=float)
        self.p = moments.p
        eigen = sym_eigen(moments.sigma_xx, method=eigen_method)
        self.sqrt_xx = psd_sqrt(moments.sigma_xx, eigen).entries
        self.alpha_max = alpha_max(self.sigma_xy)

    def _result(
        self,
        beta: np.ndarray,
        config: CenetConfig,
        iterations: int,
        converged: bool,
        on_boundary: bool,
        state: AdmmState,
    ) -> CenetFit:
        beta.setflags(write=False)
        return CenetFit(
            beta=beta,
            iterations=iterations,
            converged=converged,
            constraint_value=float(beta @ self.sigma_xx @ beta),
            kkt_residual=kkt_residual(beta, self.moments, config.alpha1, config.alpha2),
            objective=cenet_objective(beta, self.sigma_xy, config.alpha1, config.alpha2),
            alpha1=config.alpha1,
            alpha2=config.alpha2,
            on_boundary=on_boundary,
            state=state,
        )

    @staticmethod
    def _beta_step(
        a: np.ndarray,
        c: np.ndarray,
        lam: float,
        beta: np.ndarray,
        config: CenetConfig,
        descent: bool,
    ) -> tuple[np.ndarray, bool, bool]:
        """
        Lasso subproblem of one ADMM iteration, warm-started at beta.

        Coordinate descent gets INNER_SWEEP_BUDGET sweeps; if it has not
        settled, the active-set solve finishes from its iterate and also takes
        every later step of the fit (descent=False).

        Returns:
            Tuple of (beta, solved, descent for the next step)
        """
        if descent:
            sweeps = min(config.max_inner_iter, INNER_SWEEP_BUDGET)
            inner = coordinate_descent(a, c, lam, beta, config.inner_tol, sweeps)
            if inner.converged:
                return inner.beta, True, True
            logger.debug("Coordinate descent stalled; switching to the active-set solve")
            beta = inner.beta
        exact = active_set_lasso(a, c, lam, beta, config.inner_tol, config.max_inner_iter)
        return exact.beta, exact.converged, False

    def fit(self, config: CenetConfig, warm_start: Optional[AdmmState] = None) -> CenetFit:
        """
        Run the ADMM for one (alpha1, alpha2).

        Args:
            config: Tuning and ADMM parameters
            warm_start: Initial (beta, theta, gamma); zeros when omitted

        Returns:
            CenetFit; converged=False if max_outer_iter was reached
        """
        if not config.alpha2 > 0:
            raise InvalidConfigError(f"alpha2 must be > 0, got {config.alpha2}")
        if config.alpha1 < 0:
            raise InvalidConfigError(f"alpha1 must be >= 0, got {config.alpha1}")
        if not config.eta > 0:
            raise InvalidConfigError(f"eta must be > 0, got {config.eta}")

        p = self.p
        if config.alpha1 >= self.alpha_max:
            # Completely sparse: beta = 0 is optimal and a fixed point of the iteration.
            return self._result(np.zeros(p), config, 0, True, False, AdmmState.zeros(p))

        eta = config.eta
        a = self.sigma_xx + (2.0 * config.alpha2 / eta) * np.eye(p)
        _check_lasso_matrix(a, p)
        lam = 2.0 * config.alpha1 / eta
        s_half = self.sqrt_xx
        xy_scaled = self.sigma_xy / eta

        start = warm_start or AdmmState.zeros(p)
        beta = np.array(start.beta, dtype=float)
        theta = np.array(start.theta, dtype=float)
        gamma = np.array(start.gamma, dtype=float)

        converged = False
        on_boundary = False
        inner_failures = 0
        descent = True
        iterations = 0
        for iterations in range(1, config.max_outer_iter + 1):
            c = s_half @ (theta - gamma / eta) + xy_scaled
            beta_new, solved, descent = self._beta_step(a, c, lam, beta, config, descent)
            if not solved:
                inner_failures += 1

            s_beta = s_half @ beta_new
            v = s_beta + gamma / eta
            norm_v = float(np.linalg.norm(v))
            on_boundary = norm_v > 1.0
            theta_new = v / max(norm_v, 1.0)
            gamma = gamma + eta * (s_beta - theta_new)

            # Relative in beta: with p > n and a tiny alpha2 the solution grows along the null space of Sxx.
            change = max(
                float(np.linalg.norm(beta_new - beta)) / max(1.0, float(np.linalg.norm(beta_new))),
                float(np.linalg.norm(theta_new - theta)),
            )
            beta, theta = beta_new, theta_new
            if change < config.tol:
                converged = True
                break

        if inner_failures:
            logger.warning(f"Inner lasso did not reach its tolerance in {inner_failures} ADMM iterations")
        if not converged:
            logger.warning(
                f"ADMM did not converge in {config.max_outer_iter} iterations "
                f"(alpha1={config.alpha1:g}, alpha2={config.alpha2:g})"
            )
        else:
            logger.debug(f"ADMM converged in {iterations} iterations (alpha1={config.alpha1:g})")

        state = AdmmState(beta.copy(), theta.copy(), gamma.copy())
        beta_hat = beta.copy()
        value = float(beta_hat @ self.sigma_xx @ beta_hat)
        if converged and on_boundary and value > 0:
            # The ball constraint is active: put beta exactly on the ellipsoid.
            beta_hat = beta_hat / math.sqrt(value)
        return self._result(beta_hat, config, iterations, converged, on_boundary, state)

    def path(self, alpha1_grid: list[float] | np.ndarray, config: CenetConfig) -> list[CenetFit]:
        """
        Fits along a strictly descending alpha1 grid with warm starts.

        Args:
            alpha1_grid: Strictly descending, non-negative alpha1 values
            config: Remaining parameters (its alpha1 is ignored)

        Returns:
            One CenetFit per grid value, in grid order
        """
        grid = [float(v) for v in np.asarray(alpha1_grid, dtype=float).ravel()]
        if not grid:
            raise InvalidInputError("alpha1 grid is empty")
        if any(v < 0 for v in grid) or any(b >= a for a, b in zip(grid, grid[1:])):
            raise InvalidInputError("alpha1 grid must be strictly descending and >= 0")

        fits = []
        state: Optional[AdmmState] = None
        for alpha1 in grid:
            fit = self.fit(config.model_copy(update={"alpha1": alpha1}), warm_start=state)
            fits.append(fit)
            state = fit.state
        logger.info(
            f"CENet path: {len(grid)} points, nnz {fits[0].nnz} -> {fits[-1].nnz}, "
            f"{sum(not f.converged for f in fits)} not converged"
        )
        return fits


def cenet_fit(
    moments: RankMoments,
    config: CenetConfig,
    warm_start: Optional[AdmmState] = None,
) -> CenetFit:
    """Solve the CENet problem for one (alpha1, alpha2)."""
    return CenetSolver(moments).fit(config, warm_start=warm_start)


def cenet_path(
    moments: RankMoments,
    alpha1_grid: list[float] | np.ndarray,
    alpha2: float,
    config: Optional[CenetConfig] = None,
) -> list[CenetFit]:
    """Warm-started CENet fits along a descending alpha1 grid at fixed alpha2."""
    if not alpha2 > 0:
        raise InvalidConfigError(f"alpha2 must be > 0, got {alpha2}")
    config = (config or CenetConfig()).model_copy(update={"alpha2": alpha2})
    return CenetSolver(moments).path(alpha1_grid, config)
