"""Dense symmetric linear algebra: eigendecomposition, PSD square root, Cholesky."""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np

from .errors import InvalidInputError, NotPositiveDefiniteError, NotPositiveSemidefiniteError

logger = logging.getLogger(__name__)

JACOBI_MAX_SWEEPS = 100
JACOBI_REL_TOL = 1e-12
PSD_REL_TOL = 1e-8
PIVOT_MIN = 1e-12
SYMMETRY_RTOL = 1e-10


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SymMatrix:
    """Dense real symmetric matrix; symmetry is exact in storage."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise InvalidInputError(f"expected a non-empty square matrix, got shape {a.shape}")
        # NaN gaps compare false here; sym_eigen reports non-finite entries.
        gap = np.max(np.abs(a - a.T))
        if gap > SYMMETRY_RTOL * (1.0 + sup_norm(a)):
            raise InvalidInputError(f"matrix is not symmetric (max asymmetry {gap:.3e})")
        # (a + a.T) / 2 is bitwise symmetric since float addition commutes.
        object.__setattr__(self, "entries", _readonly((a + a.T) / 2.0))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)


@dataclass(frozen=True)
class EigenPair:
    """Eigenvalues sorted descending with matching orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def sup_norm(a: np.ndarray) -> float:
    """Largest absolute entry (0 for empty input)."""
    a = np.asarray(a, dtype=float)
    return float(np.max(np.abs(a))) if a.size else 0.0


@lru_cache(maxsize=64)
def _round_robin(dim: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Tournament schedule covering every pair (p < q) exactly once per sweep."""
    m = dim + (dim % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a < dim and b < dim:
                ps.append(min(a, b))
                qs.append(max(a, b))
        if ps:
            rounds.append((_readonly(np.array(ps)), _readonly(np.array(qs))))
        players = [players[0], players[-1], *players[1:-1]]
    return tuple(rounds)


def _jacobi(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi sweeps; each round rotates a set of disjoint (p, q) pairs."""
    a = a.copy()
    dim = a.shape[0]
    v = np.eye(dim)
    scale = np.linalg.norm(a)
    rounds = _round_robin(dim)

    for sweep in range(JACOBI_MAX_SWEEPS):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= JACOBI_REL_TOL * scale:
            logger.debug(f"Jacobi converged after {sweep} sweeps")
            break
        for p, q in rounds:
            apq = a[p, q]
            rotate = apq != 0.0
            if not np.any(rotate):
                continue
            app = a[p, p]
            aqq = a[q, q]
            theta = np.where(rotate, (aqq - app) / np.where(rotate, 2.0 * apq, 1.0), 0.0)
            sign = np.where(theta >= 0.0, 1.0, -1.0)
            t = np.where(rotate, sign / (np.abs(theta) + np.hypot(theta, 1.0)), 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c

            col_p = a[:, p].copy()
            col_q = a[:, q].copy()
            a[:, p] = c * col_p - s * col_q
            a[:, q] = s * col_p + c * col_q
            row_p = a[p, :].copy()
            row_q = a[q, :].copy()
            a[p, :] = c[:, None] * row_p - s[:, None] * row_q
            a[q, :] = s[:, None] * row_p + c[:, None] * row_q
            a[p, q] = 0.0
            a[q, p] = 0.0

            vec_p = v[:, p].copy()
            vec_q = v[:, q].copy()
            v[:, p] = c * vec_p - s * vec_q
            v[:, q] = s * vec_p + c * vec_q
    else:
        logger.warning(f"Jacobi reached the {JACOBI_MAX_SWEEPS}-sweep cap (dim={dim})")

    return np.diag(a).copy(), v


def sym_eigen(s: SymMatrix, method: Literal["jacobi", "lapack"] = "jacobi") -> EigenPair:
    """
    Eigendecomposition of a symmetric matrix.

    Args:
        s: Symmetric matrix
        method: "jacobi" (cyclic Jacobi rotations) or "lapack" (numpy.linalg.eigh)

    Returns:
        EigenPair with values sorted descending; ties keep their original order
    """
    a = np.asarray(s.entries, dtype=float)
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix has non-finite entries")

    if method == "jacobi":
        values, vectors = _jacobi(a)
    elif method == "lapack":
        values, vectors = np.linalg.eigh(a)
    else:
        raise InvalidInputError(f"unknown eigen method: {method}")

    order = np.argsort(-values, kind="stable")
    return EigenPair(
        values=_readonly(values[order].copy()),
        vectors=_readonly(vectors[:, order].copy()),
    )


def psd_sqrt(s: SymMatrix, eigen: EigenPair | None = None) -> SymMatrix:
    """
    Principal positive semidefinite square root.

    Eigenvalues within -1e-8 * (1 + |S|_inf) of zero are clamped to zero.

    Args:
        s: Symmetric, numerically PSD matrix
        eigen: Precomputed eigendecomposition of s (optional)

    Returns:
        V diag(sqrt(max(lambda, 0))) V^T
    """
    if eigen is None:
        eigen = sym_eigen(s)
    tol = PSD_REL_TOL * (1.0 + sup_norm(s.entries))
    smallest = float(eigen.values[-1])
    if smallest < -tol:
        raise NotPositiveSemidefiniteError(
            f"eigenvalue {smallest:.3e} is below the PSD tolerance -{tol:.3e}"
        )
    root = np.sqrt(np.clip(eigen.values, 0.0, None))
    return SymMatrix((eigen.vectors * root) @ eigen.vectors.T)


def cholesky(s: SymMatrix) -> np.ndarray:
    """
    Lower-triangular Cholesky factor L with L L^T = S.

    Raises:
        NotPositiveDefiniteError: if any pivot L_jj^2 is <= 1e-12
    """
    a = np.asarray(s.entries, dtype=float)
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix has non-finite entries")
    try:
        factor = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefiniteError(f"matrix is not positive definite: {e}") from e
    pivots = np.diag(factor) ** 2
    if np.any(pivots <= PIVOT_MIN):
        j = int(np.argmin(pivots))
        raise NotPositiveDefiniteError(f"pivot {j} is {pivots[j]:.3e} (must exceed {PIVOT_MIN})")
    return _readonly(factor)
