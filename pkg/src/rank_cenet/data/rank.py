"""Rank statistics: Kendall's tau, the sine transform, and rank moments."""

from dataclasses import dataclass
from typing import Literal

import numpy as np

from ..errors import InvalidInputError
from ..linalg import SymMatrix
from .dataset import Dataset


@dataclass(frozen=True)
class RankMoments:
    """
    Sample covariance of x and the rank cross-covariance with y.

    Attributes:
        sigma_xx: p x p sample covariance (1/n, column-centered)
        sigma_xy: sigma_hat * sin(pi * tau_hat / 2)
        sigma_hat: Marginal standard deviations of the predictors
        tau_hat: Kendall's tau of each predictor with the response
    """

    sigma_xx: SymMatrix
    sigma_xy: np.ndarray
    sigma_hat: np.ndarray
    tau_hat: np.ndarray

    @property
    def p(self) -> int:
        return self.sigma_xy.shape[0]


def _check_pair(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1:
        raise InvalidInputError("kendall_tau expects two 1-D vectors")
    if x.shape[0] != y.shape[0]:
        raise InvalidInputError(f"length mismatch: {x.shape[0]} vs {y.shape[0]}")
    if x.shape[0] < 2:
        raise InvalidInputError("kendall_tau needs at least 2 observations")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InvalidInputError("kendall_tau input has non-finite entries")
    return x, y


def kendall_tau(x: np.ndarray, y: np.ndarray) -> float:
    """
    Kendall's tau by direct enumeration of all pairs, O(n^2).

    Pairs tied in either coordinate contribute 0 (sign(0) = 0) and the
    denominator stays n(n-1)/2.
    """
    x, y = _check_pair(x, y)
    n = x.shape[0]
    iu = np.triu_indices(n, k=1)
    sx = np.sign(x[:, None] - x[None, :])[iu]
    sy = np.sign(y[:, None] - y[None, :])[iu]
    concordance = int(np.sum(sx * sy))
    return concordance / (n * (n - 1) // 2)


def _tied_pairs(sorted_values: np.ndarray) -> int:
    """Number of tied pairs in a sorted vector."""
    _, counts = np.unique(sorted_values, return_counts=True)
    return int(np.sum(counts * (counts - 1) // 2))


def _count_inversions(values: list[float]) -> int:
    """Strict inversions (i < j, v_i > v_j) by bottom-up merge sort."""
    n = len(values)
    src = list(values)
    dst = [0.0] * n
    swaps = 0
    width = 1
    while width < n:
        for start in range(0, n, 2 * width):
            left, mid = start, min(start + width, n)
            right, end = mid, min(start + 2 * width, n)
            k = start
            while left < mid and right < end:
                if src[left] > src[right]:
                    dst[k] = src[right]
                    right += 1
                    swaps += mid - left
                else:
                    dst[k] = src[left]
                    left += 1
                k += 1
            while left < mid:
                dst[k] = src[left]
                left += 1
                k += 1
            while right < end:
                dst[k] = src[right]
                right += 1
                k += 1
        src, dst = dst, src
        width *= 2
    return swaps


def kendall_tau_fast(x: np.ndarray, y: np.ndarray) -> float:
    """
    Kendall's tau in O(n log n) (Knight's algorithm).

    Same contract as kendall_tau, including the tie convention; both return
    the same integer concordance divided by n(n-1)/2.
    """
    x, y = _check_pair(x, y)
    n = x.shape[0]
    total = n * (n - 1) // 2

    # Sort by x, then y, so pairs tied in x are never counted as inversions.
    order = np.lexsort((y, x))
    xs = x[order]
    ys = y[order]

    tied_x = _tied_pairs(xs)
    tied_y = _tied_pairs(np.sort(y))
    joint = np.flatnonzero((xs[1:] != xs[:-1]) | (ys[1:] != ys[:-1])) + 1
    runs = np.diff(np.concatenate(([0], joint, [n])))
    tied_xy = int(np.sum(runs * (runs - 1) // 2))

    discordant = _count_inversions(ys.tolist())
    concordance = total - tied_x - tied_y + tied_xy - 2 * discordant
    return concordance / total


def kendall_tau_columns(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """kendall_tau_fast of every column of x against y."""
    x = np.asarray(x, dtype=float)
    return np.array([kendall_tau_fast(x[:, j], y) for j in range(x.shape[1])])


def tau_to_rho(tau: float | np.ndarray) -> float | np.ndarray:
    """Sine transform sin(pi * tau / 2) of Kendall's tau."""
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(np.abs(tau_arr) > 1.0) or not np.all(np.isfinite(tau_arr)):
        raise InvalidInputError(f"tau must lie in [-1, 1], got {tau}")
    rho = np.sin(np.pi * tau_arr / 2.0)
    return float(rho) if rho.ndim == 0 else rho


def sample_cov(x: np.ndarray) -> tuple[SymMatrix, np.ndarray]:
    """
    Column-centered sample covariance with 1/n normalization.

    Args:
        x: n x p matrix

    Returns:
        Tuple of (sigma_xx, sigma_hat) with sigma_hat the square root of the diagonal
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise InvalidInputError(f"sample_cov needs an n x p matrix with n >= 2, got {x.shape}")
    center = x - x.mean(axis=0)
    center[:, np.ptp(x, axis=0) == 0] = 0.0
    sigma_xx = SymMatrix(center.T @ center / x.shape[0])
    sigma_hat = np.sqrt(np.diag(sigma_xx.entries))
    sigma_hat.setflags(write=False)
    return sigma_xx, sigma_hat


def rank_cross_cov(data: Dataset, standardize: bool = False) -> RankMoments:
    """
    Rank moments of a dataset.

    sigma_xy[j] = sigma_hat[j] * sin(pi * tau_hat[j] / 2), with the response
    scale fixed to 1 since the slope is only identified up to scale.

    Args:
        data: Dataset
        standardize: Scale predictors to unit variance first

    Returns:
        RankMoments
    """
    if standardize:
        data = data.standardized()
    sigma_xx, sigma_hat = sample_cov(data.x)
    tau_hat = kendall_tau_columns(data.x, data.y)
    sigma_xy = sigma_hat * tau_to_rho(tau_hat)
    tau_hat.setflags(write=False)
    sigma_xy.setflags(write=False)
    return RankMoments(sigma_xx=sigma_xx, sigma_xy=sigma_xy, sigma_hat=sigma_hat, tau_hat=tau_hat)


def pearson_columns(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Pearson correlation of each column with y; 0 for constant columns or y."""
    xc = x - x.mean(axis=0)
    yc = y - y.mean()
    denom = np.sqrt(np.sum(xc**2, axis=0) * np.sum(yc**2))
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = np.where(denom > 0, xc.T @ yc / np.where(denom > 0, denom, 1.0), 0.0)
    return corr


def screen_top_k(
    data: Dataset,
    k: int,
    measure: Literal["kendall", "pearson"] = "kendall",
) -> np.ndarray:
    """
    Indices of the k predictors most associated with the response.

    Args:
        data: Dataset
        k: Number of predictors to keep (1 <= k <= p)
        measure: "kendall" (|tau|) or "pearson" (|correlation|)

    Returns:
        Sorted (ascending) 0-based column indices; ties go to the smaller index
    """
    if not 1 <= k <= data.p:
        raise InvalidInputError(f"k must be in [1, {data.p}], got {k}")
    if measure == "kendall":
        score = np.abs(kendall_tau_columns(data.x, data.y))
    elif measure == "pearson":
        score = np.abs(pearson_columns(data.x, data.y))
    else:
        raise InvalidInputError(f"unknown screening measure: {measure}")
    return top_k_indices(score, k)


def top_k_indices(score: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest scores, ties by index, sorted ascending."""
    order = np.argsort(-np.asarray(score, dtype=float), kind="stable")
    return np.sort(order[:k])

