"""
Bootstrap stability selection with CENet (or lasso) paths.

Each replicate resamples the rows with replacement, optionally standardizes
the resample, screens to the top-k predictors and fits a path on the screened
columns. A variable's selection frequency at a grid value is the share of
replicates in which it was nonzero there.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from .config import CenetConfig, StabilitySpec
from .data.dataset import Dataset
from .data.rank import rank_cross_cov, screen_top_k
from .data.simulate import rng_stream
from .errors import InvalidInputError
from .estimators.cenet import CenetSolver
from .estimators.lasso import lasso_path
from .evaluation.export import write_csv, write_json

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StabilityPaths:
    """
    Selection counts per variable and grid value.

    Attributes:
        counts: p x len(grid) integers in [0, b]
        b: Number of bootstrap replicates
        grid: Penalty grid (descending)
        names: Variable names
        method: "cenet" or "lasso"
        degenerate_replicates: Replicates whose resampled response was constant
        unconverged_fits: Path fits that hit their iteration cap
    """

    counts: np.ndarray
    b: int
    grid: tuple[float, ...]
    names: tuple[str, ...]
    method: str
    degenerate_replicates: int
    unconverged_fits: int = 0

    @property
    def freq(self) -> np.ndarray:
        return self.counts / self.b

    def max_frequency(self) -> np.ndarray:
        return self.freq.max(axis=1)

    def top_variables(self, k: int = 10) -> list[tuple[str, float]]:
        """The k variables with the highest maximum frequency; ties by column order."""
        peak = self.max_frequency()
        order = np.argsort(-peak, kind="stable")[:k]
        return [(self.names[j], float(peak[j])) for j in order]

    def to_frame(self) -> pd.DataFrame:
        """Rows = variables, columns = grid values, cells = frequencies."""
        return pd.DataFrame(
            self.freq,
            index=pd.Index(self.names, name="variable"),
            columns=[format(a, ".10g") for a in self.grid],
        )


def _replicate(
    data: Dataset,
    spec: StabilitySpec,
    grid: list[float],
    stream: int,
) -> Optional[tuple[np.ndarray, np.ndarray, int]]:
    """
    One bootstrap replicate.

    Returns:
        (screened column indices, k x len(grid) selection mask, unconverged
        fits), or None when the resampled response is constant
    """
    rng = rng_stream(spec.seed, stream)
    sample = data.take_rows(rng.integers(0, data.n, size=data.n))
    if np.ptp(sample.y) == 0:
        return None
    if spec.standardize:
        sample = sample.standardized()

    if spec.method == "lasso":
        columns = screen_top_k(sample, spec.screen_k, measure="pearson")
        fits = lasso_path(sample.take_columns(columns), grid)
    else:
        columns = screen_top_k(sample, spec.screen_k, measure="kendall")
        moments = rank_cross_cov(sample.take_columns(columns))
        config = CenetConfig(alpha2=spec.alpha2, eta=spec.eta, tol=spec.tol)
        fits = CenetSolver(moments).path(grid, config)

    selected = np.column_stack([fit.beta != 0 for fit in fits])
    return columns, selected, sum(not fit.converged for fit in fits)


def stability_paths(
    data: Dataset,
    spec: StabilitySpec,
    jobs: int = 1,
    stream_ids: Optional[Sequence[int]] = None,
) -> StabilityPaths:
    """
    Selection-frequency paths over spec.b bootstrap replicates.

    Args:
        data: Dataset
        spec: Stability settings
        jobs: Worker processes for the replicates
        stream_ids: Random-stream index of each replicate (default 0..b-1);
            repeating an index repeats that replicate exactly

    Returns:
        StabilityPaths
    """
    if spec.screen_k > data.p:
        raise InvalidInputError(f"screen_k={spec.screen_k} exceeds p={data.p}")
    streams = list(range(spec.b)) if stream_ids is None else [int(s) for s in stream_ids]
    if len(streams) != spec.b:
        raise InvalidInputError(f"{len(streams)} stream ids for b={spec.b} replicates")
    grid = spec.grid

    logger.info(
        f"Stability selection: b={spec.b}, method={spec.method}, "
        f"screen_k={spec.screen_k}, {len(grid)} grid points, jobs={jobs}"
    )
    results = Parallel(n_jobs=jobs)(
        delayed(_replicate)(data, spec, grid, stream) for stream in streams
    )

    counts = np.zeros((data.p, len(grid)), dtype=np.int64)
    degenerate = 0
    unconverged = 0
    for result in results:
        if result is None:
            degenerate += 1
            continue
        columns, selected, failed = result
        counts[columns] += selected
        unconverged += failed
    if degenerate:
        logger.warning(f"{degenerate} of {spec.b} bootstrap replicates had a constant response")

    counts.setflags(write=False)
    return StabilityPaths(
        counts=counts,
        b=spec.b,
        grid=tuple(grid),
        names=data.feature_names,
        method=spec.method,
        degenerate_replicates=degenerate,
        unconverged_fits=unconverged,
    )


def export_stability(paths: StabilityPaths, spec: StabilitySpec, out_dir: str | Path, top: int = 20) -> list[Path]:
    """Write stability_freq.csv and the stability.json summary."""
    out_dir = Path(out_dir)
    summary = {
        "method": paths.method,
        "b": paths.b,
        "seed": spec.seed,
        "screen_k": spec.screen_k,
        "alpha2": spec.alpha2,
        "standardize": spec.standardize,
        "grid": list(paths.grid),
        "degenerate_replicates": paths.degenerate_replicates,
        "unconverged_fits": paths.unconverged_fits,
        "top_variables": [
            {"name": name, "max_frequency": freq}
            for name, freq in paths.top_variables(top)
        ],
    }
    return [
        write_csv(paths.to_frame(), out_dir / "stability_freq.csv", index=True),
        write_json(summary, out_dir / "stability.json"),
    ]
