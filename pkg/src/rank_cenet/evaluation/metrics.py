"""Performance measures: estimation error, support recovery, ROC and error curves."""

from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np

from ..errors import InvalidInputError


@dataclass(frozen=True)
class RocPoint:
    """One (fpr, tpr) point of a regularization path."""

    fpr: float
    tpr: float
    nnz: int
    alpha: float


@dataclass(frozen=True)
class AveragedRoc:
    """Vertically averaged ROC curve over replications."""

    fpr: np.ndarray
    tpr: np.ndarray
    auc: float


@dataclass(frozen=True)
class ErrorCurve:
    """
    Estimation error against sparsity along a shared grid.

    Attributes:
        alpha: Grid values (alpha1 or lambda, or lambda ratios)
        mean_nnz: Mean number of nonzeros per grid point
        mean_error: Mean est_error per grid point
        median_error: Median est_error per grid point
    """

    alpha: np.ndarray
    mean_nnz: np.ndarray
    mean_error: np.ndarray
    median_error: np.ndarray

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.mean_nnz.tolist(), self.mean_error.tolist()))


def _beta_of(item: Any) -> np.ndarray:
    return np.asarray(getattr(item, "beta", item), dtype=float)


def _alphas_of(path: Sequence[Any], alphas: Optional[Sequence[float]]) -> list[float]:
    if alphas is not None:
        if len(alphas) != len(path):
            raise InvalidInputError(f"{len(alphas)} grid values for a path of {len(path)} fits")
        return [float(a) for a in alphas]
    # Plain coefficient vectors carry no penalty; their position stands in.
    return [float(getattr(item, "penalty", i)) for i, item in enumerate(path)]


def _unit(beta: np.ndarray) -> np.ndarray:
    return beta / np.linalg.norm(beta)


def est_error(beta_hat: np.ndarray, beta_star: np.ndarray) -> float:
    """
    Standardized squared estimation error.

    min over sign of ||b/||b|| -+ b*/||b*||||^2; defined as 1 for b = 0.
    Lies in [0, 4] and is invariant to the scale and sign of either vector.
    """
    beta_hat = np.asarray(beta_hat, dtype=float)
    beta_star = np.asarray(beta_star, dtype=float)
    if beta_hat.shape != beta_star.shape:
        raise InvalidInputError(f"shape mismatch: {beta_hat.shape} vs {beta_star.shape}")
    if not np.any(beta_star):
        raise InvalidInputError("beta_star must be nonzero")
    if not np.any(beta_hat):
        return 1.0
    u = _unit(beta_hat)
    v = _unit(beta_star)
    return float(min(np.sum((u - v) ** 2), np.sum((u + v) ** 2)))


def tpr_fpr(beta_hat: np.ndarray, beta_star: np.ndarray) -> tuple[float, float]:
    """
    Support recovery rates.

    Returns:
        Tuple of (true positive rate, false positive rate)
    """
    selected = np.asarray(beta_hat) != 0
    truth = np.asarray(beta_star) != 0
    if selected.shape != truth.shape:
        raise InvalidInputError(f"shape mismatch: {selected.shape} vs {truth.shape}")
    positives = int(truth.sum())
    negatives = truth.size - positives
    if positives == 0 or negatives == 0:
        raise InvalidInputError("beta_star needs at least one zero and one nonzero entry")
    tpr = int(np.sum(selected & truth)) / positives
    fpr = int(np.sum(selected & ~truth)) / negatives
    return tpr, fpr


def roc_from_path(
    path: Sequence[Any],
    beta_star: np.ndarray,
    alphas: Optional[Sequence[float]] = None,
) -> list[RocPoint]:
    """
    ROC points of a regularization path.

    Args:
        path: Fits (anything with .beta) or coefficient vectors, in grid order
        beta_star: True coefficients
        alphas: Grid values; taken from each fit's .penalty when omitted

    Returns:
        One RocPoint per grid value, deduplicated on (fpr, tpr) keeping the first
    """
    if len(path) == 0:
        raise InvalidInputError("path is empty")
    grid = _alphas_of(path, alphas)
    points = []
    seen = set()
    for item, alpha in zip(path, grid):
        beta = _beta_of(item)
        tpr, fpr = tpr_fpr(beta, beta_star)
        if (fpr, tpr) in seen:
            continue
        seen.add((fpr, tpr))
        points.append(RocPoint(fpr=fpr, tpr=tpr, nnz=int(np.count_nonzero(beta)), alpha=alpha))
    return points


def default_fpr_grid(points: int = 101) -> np.ndarray:
    """Evenly spaced fpr values {0, 1/(points-1), ..., 1}."""
    return np.linspace(0.0, 1.0, points)


def _interpolate(curve: Sequence[Any], fpr_grid: np.ndarray) -> np.ndarray:
    fpr = [0.0, 1.0]
    tpr = [0.0, 1.0]
    for point in curve:
        if isinstance(point, RocPoint):
            fpr.append(point.fpr)
            tpr.append(point.tpr)
        else:
            fpr.append(float(point[0]))
            tpr.append(float(point[1]))
    frame = np.column_stack([fpr, tpr])
    xs = np.unique(frame[:, 0])
    # Several points at one fpr form a vertical segment; keep its top.
    ys = np.array([frame[frame[:, 0] == x, 1].max() for x in xs])
    return np.interp(fpr_grid, xs, ys)


def average_roc(
    replication_curves: Sequence[Sequence[Any]],
    fpr_grid: Optional[np.ndarray] = None,
) -> AveragedRoc:
    """
    Vertical average of ROC curves.

    Each curve gets (0, 0) and (1, 1) anchors and is interpolated linearly at
    fpr_grid; the TPRs are averaged pointwise and the AUC is the trapezoid
    area under the averaged curve.

    Args:
        replication_curves: RocPoint lists or (fpr, tpr) pairs, one per replication
        fpr_grid: Ascending fpr values in [0, 1]; 101 points by default

    Returns:
        AveragedRoc
    """
    if len(replication_curves) == 0:
        raise InvalidInputError("no ROC curves to average")
    grid = default_fpr_grid() if fpr_grid is None else np.asarray(fpr_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise InvalidInputError("fpr grid must be strictly ascending with >= 2 points")
    if grid[0] < 0 or grid[-1] > 1:
        raise InvalidInputError("fpr grid must lie in [0, 1]")

    for curve in replication_curves:
        if len(curve) == 0:
            raise InvalidInputError("empty ROC curve")
    tpr = np.mean([_interpolate(curve, grid) for curve in replication_curves], axis=0)
    auc = float(np.trapezoid(tpr, grid))
    return AveragedRoc(fpr=grid, tpr=tpr, auc=auc)


def error_vs_nnz(
    replication_paths: Sequence[Sequence[Any]],
    beta_star: np.ndarray,
    alphas: Optional[Sequence[float]] = None,
) -> ErrorCurve:
    """
    Mean/median estimation error and mean nnz at each grid index.

    Args:
        replication_paths: One path per replication, all on the same grid
        beta_star: True coefficients
        alphas: Shared grid values; read from the fits' .penalty when omitted

    Returns:
        ErrorCurve
    """
    if len(replication_paths) == 0:
        raise InvalidInputError("no paths to aggregate")
    size = len(replication_paths[0])
    if size == 0 or any(len(path) != size for path in replication_paths):
        raise InvalidInputError("paths must be nonempty and share one grid")

    if alphas is None:
        grid = _alphas_of(replication_paths[0], None)
        for path in replication_paths[1:]:
            if _alphas_of(path, None) != grid:
                raise InvalidInputError("paths were fitted on different grids")
    else:
        grid = _alphas_of(replication_paths[0], alphas)

    errors = np.array([[est_error(_beta_of(item), beta_star) for item in path] for path in replication_paths])
    nnz = np.array([[np.count_nonzero(_beta_of(item)) for item in path] for path in replication_paths])
    return ErrorCurve(
        alpha=np.array(grid),
        mean_nnz=nnz.mean(axis=0),
        mean_error=errors.mean(axis=0),
        median_error=np.median(errors, axis=0),
    )
