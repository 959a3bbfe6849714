"""Cyclic coordinate descent for l1-penalized quadratics."""

from typing import NamedTuple

import numpy as np


class CoordinateResult(NamedTuple):
    """Solution of a coordinate-descent run."""
    beta: np.ndarray
    sweeps: int
    converged: bool


def soft_threshold(value: float, threshold: float) -> float:
    """sign(value) * max(|value| - threshold, 0)."""
    if value > threshold:
        return value - threshold
    if value < -threshold:
        return value + threshold
    return 0.0


def coordinate_descent(
    a: np.ndarray,
    c: np.ndarray,
    lam: float,
    beta0: np.ndarray,
    tol: float,
    max_iter: int,
) -> CoordinateResult:
    """
    Minimize beta^T A beta - 2 c^T beta + lam * ||beta||_1.

    Coordinate update: beta_j <- soft(c_j - sum_{k != j} A_jk beta_k, lam / 2) / A_jj.
    A full sweep is followed by sweeps over the nonzero coordinates only until
    they settle; the run stops when a full sweep moves no coordinate by tol or
    more. Coordinates with A_jj <= 0 are held at zero.

    Args:
        a: Symmetric matrix (p x p)
        c: Linear term (length p)
        lam: l1 weight (>= 0)
        beta0: Starting point
        tol: Max coordinate change that counts as converged
        max_iter: Cap on the total number of sweeps

    Returns:
        CoordinateResult
    """
    a = np.asarray(a, dtype=float)
    c_list = np.asarray(c, dtype=float).tolist()
    diag = np.diag(a).tolist()
    beta = np.array(beta0, dtype=float)
    for j, d in enumerate(diag):
        if d <= 0.0:
            beta[j] = 0.0
    a_beta = a @ beta
    half = lam / 2.0
    usable = [j for j, d in enumerate(diag) if d > 0.0]

    def sweep(indices) -> float:
        biggest = 0.0
        for j in indices:
            old = beta[j]
            d = diag[j]
            new = soft_threshold(c_list[j] - a_beta[j] + d * old, half) / d
            if new != old:
                step = new - old
                # A is symmetric, so row j doubles as column j.
                a_beta[:] += a[j] * step
                beta[j] = new
                if abs(step) > biggest:
                    biggest = abs(step)
        return biggest

    sweeps = 0
    while sweeps < max_iter:
        change = sweep(usable)
        sweeps += 1
        if change < tol:
            return CoordinateResult(beta, sweeps, True)
        active = np.flatnonzero(beta).tolist()
        while sweeps < max_iter:
            change = sweep(active)
            sweeps += 1
            if change < tol:
                break

    return CoordinateResult(beta, sweeps, False)


def active_set_lasso(
    a: np.ndarray,
    c: np.ndarray,
    lam: float,
    beta0: np.ndarray,
    tol: float,
    max_iter: int,
) -> CoordinateResult:
    """
    Minimize beta^T A beta - 2 c^T beta + lam * ||beta||_1 exactly, for A positive definite.

    Sign-consistent active-set search. With the support S and signs s fixed,
    the minimizer solves A_SS beta_S = c_S - (lam / 2) s_S. A line search
    towards that point stops at the first sign change that lowers the
    objective (the coordinate leaves the support); once the support is solved,
    the zero coordinate with the largest violation of |c_j - (A beta)_j| <= lam / 2
    joins it. The objective decreases at every step, so the search ends after
    finitely many steps however badly A is conditioned.

    Args:
        a: Positive definite matrix (p x p)
        c: Linear term (length p)
        lam: l1 weight (>= 0)
        beta0: Starting point; its nonzeros seed the support
        tol: Allowed violation of the zero-coordinate condition, on top of rounding
        max_iter: Cap on the number of support solves

    Returns:
        CoordinateResult; sweeps counts support solves
    """
    a = np.asarray(a, dtype=float)
    c = np.asarray(c, dtype=float)
    beta = np.array(beta0, dtype=float)
    half = lam / 2.0
    a_scale = float(np.max(np.abs(a))) if a.size else 0.0
    c_scale = float(np.max(np.abs(c))) if c.size else 0.0
    rounding = 64.0 * np.finfo(float).eps

    solved = False
    for step in range(1, max_iter + 1):
        signs = np.sign(beta)
        support = np.flatnonzero(beta)
        added = -1
        if solved or support.size == 0:
            residual = c - a @ beta
            slack = tol + rounding * (a_scale * float(np.sum(np.abs(beta))) + c_scale)
            violation = np.abs(residual) - half
            violation[support] = -np.inf
            j = int(np.argmax(violation))
            if violation[j] <= slack:
                return CoordinateResult(beta, step - 1, True)
            signs[j] = np.sign(residual[j])
            support = np.sort(np.append(support, j))
            added = j

        s = signs[support]
        block = a[np.ix_(support, support)]
        try:
            target = np.linalg.solve(block, c[support] - half * s)
        except np.linalg.LinAlgError:
            return CoordinateResult(beta, step, False)

        current = beta[support]

        def objective(point: np.ndarray) -> float:
            return float(point @ block @ point - 2.0 * c[support] @ point + lam * np.sum(np.abs(point)))

        best, best_value = target, objective(target)
        for k in np.flatnonzero((current != 0) & (np.sign(target) != np.sign(current))):
            t = current[k] / (current[k] - target[k])
            point = current + t * (target - current)
            point[k] = 0.0
            value = objective(point)
            if value < best_value:
                best, best_value = point, value

        if added >= 0 and best_value >= objective(current):
            # The new coordinate flipped sign in the support solve; move it alone.
            beta[added] = soft_threshold(residual[added], half) / a[added, added]
            solved = False
            continue
        beta[support] = best
        solved = best is target and bool(np.all(np.sign(target) == s))

    return CoordinateResult(beta, max_iter, False)
