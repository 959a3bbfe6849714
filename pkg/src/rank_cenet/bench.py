"""
Monte Carlo experiments on simulated data.

run_bench covers the scenario x noise matrix, comparing CENet paths (one per
alpha2) with lasso paths. rate_scaling tracks the error of CENet at
alpha1 = gamma * sqrt(log p / n) as n grows.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from . import __version__
from .config import BenchConfig, CenetConfig, NoiseFamily, Scenario, ScalingRun, SimSpec
from .data.rank import rank_cross_cov
from .data.simulate import generate_dataset
from .estimators.cenet import CenetSolver
from .estimators.lasso import lasso_null_lambda, lasso_path
from .evaluation.export import export_curves, write_csv, write_json
from .evaluation.metrics import AveragedRoc, ErrorCurve, average_roc, default_fpr_grid, error_vs_nnz, est_error, roc_from_path

logger = logging.getLogger(__name__)

# Pilot replicates draw from streams the study itself never uses.
PILOT_STREAM_OFFSET = 2**32


@dataclass(frozen=True)
class ReplicateResult:
    """Coefficient paths of one simulated replicate."""

    replicate: int
    beta_star: np.ndarray
    cenet: dict[float, np.ndarray]
    lasso: np.ndarray
    converged: bool


@dataclass(frozen=True)
class CellResult:
    """Aggregated curves of one method in one (scenario, noise) cell."""

    scenario: Scenario
    noise: NoiseFamily
    method: str
    alpha2: Optional[float]
    curve: ErrorCurve
    roc: AveragedRoc


@dataclass(frozen=True)
class BenchResult:
    cells: list[CellResult]
    converged: bool

    def cell(self, scenario: Scenario, noise: NoiseFamily, method: str) -> CellResult:
        for cell in self.cells:
            if cell.scenario is scenario and cell.noise is noise and cell.method == method:
                return cell
        raise KeyError((scenario, noise, method))

    def summary(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "scenario": c.scenario.value,
                    "noise": c.noise.value,
                    "method": c.method,
                    "min_median_error": float(c.curve.median_error.min()),
                    "min_mean_error": float(c.curve.mean_error.min()),
                    "auc": c.roc.auc,
                }
                for c in self.cells
            ]
        )


def cenet_label(alpha2: float) -> str:
    return f"cenet_alpha2_{alpha2:g}"


def _run_replicate(spec: SimSpec, replicate: int, config: BenchConfig) -> ReplicateResult:
    data, truth = generate_dataset(spec, replicate)
    solver = CenetSolver(rank_cross_cov(data))
    converged = True
    cenet = {}
    for alpha2 in config.alpha2_values:
        fits = solver.path(
            config.alpha1_grid,
            CenetConfig(alpha2=alpha2, eta=config.eta, tol=config.tol),
        )
        cenet[alpha2] = np.array([fit.beta for fit in fits])
        converged = converged and all(fit.converged for fit in fits)

    null = lasso_null_lambda(data)
    lasso_fits = lasso_path(data, [ratio * null for ratio in config.lambda_ratio_grid])
    converged = converged and all(fit.converged for fit in lasso_fits)
    return ReplicateResult(
        replicate=replicate,
        beta_star=truth.beta_star,
        cenet=cenet,
        lasso=np.array([fit.beta for fit in lasso_fits]),
        converged=converged,
    )


def _aggregate(
    paths: list[np.ndarray],
    beta_star: np.ndarray,
    grid: list[float],
    fpr_grid: np.ndarray,
) -> tuple[ErrorCurve, AveragedRoc]:
    curve = error_vs_nnz(paths, beta_star, alphas=grid)
    roc = average_roc([roc_from_path(path, beta_star, alphas=grid) for path in paths], fpr_grid)
    return curve, roc


def run_bench(config: BenchConfig) -> BenchResult:
    """
    Run the experiment matrix.

    Every (scenario, noise) cell uses replicates 0..reps-1 of the seed, so
    cells differ only in the transformation and the noise law.

    Args:
        config: Experiment settings

    Returns:
        BenchResult with one CellResult per (scenario, noise, method)
    """
    fpr_grid = default_fpr_grid(config.fpr_points)
    cells = []
    converged = True
    for scenario in config.scenarios:
        for noise in config.noises:
            spec = config.sim_spec(scenario, noise)
            logger.info(f"Bench cell scenario={scenario.value} noise={noise.value}: {config.reps} replicates")
            results = Parallel(n_jobs=config.jobs)(
                delayed(_run_replicate)(spec, r, config) for r in range(config.reps)
            )
            beta_star = results[0].beta_star
            converged = converged and all(r.converged for r in results)

            for alpha2 in config.alpha2_values:
                curve, roc = _aggregate([r.cenet[alpha2] for r in results], beta_star, config.alpha1_grid, fpr_grid)
                cells.append(CellResult(scenario, noise, cenet_label(alpha2), alpha2, curve, roc))
            curve, roc = _aggregate([r.lasso for r in results], beta_star, config.lambda_ratio_grid, fpr_grid)
            cells.append(CellResult(scenario, noise, "lasso", None, curve, roc))

    if not converged:
        logger.warning("Some fits did not converge; results are partial")
    return BenchResult(cells=cells, converged=converged)


def run_metadata(config: BenchConfig | ScalingRun) -> dict:
    return {
        "config": config.model_dump(mode="json"),
        "versions": {"rank_cenet": __version__, "numpy": np.__version__, "pandas": pd.__version__},
    }


def export_bench(result: BenchResult, config: BenchConfig, out_dir: str | Path) -> list[Path]:
    """
    Write bench artifacts.

    Per cell: <scenario>/<noise>/<method>_error.csv, _roc.csv and .json.
    Top level: summary.csv and bench.json (config, versions, convergence).
    """
    out_dir = Path(out_dir)
    written = []
    for cell in result.cells:
        cell_dir = out_dir / cell.scenario.value / cell.noise.value
        written.extend(export_curves(cell_dir, cell.method, cell.curve, cell.roc))
    written.append(write_csv(result.summary(), out_dir / "summary.csv"))
    meta = run_metadata(config)
    meta["converged"] = result.converged
    meta["replicates"] = list(range(config.reps))
    written.append(write_json(meta, out_dir / "bench.json"))
    return written


def alpha1_for(gamma: float, n: int, p: int) -> float:
    """gamma * sqrt(log p / n)."""
    return gamma * math.sqrt(math.log(p) / n)


def _scaling_replicate(
    spec: SimSpec,
    replicate: int,
    alpha1_values: list[float],
    alpha2: float,
) -> tuple[list[float], bool]:
    data, truth = generate_dataset(spec, replicate)
    solver = CenetSolver(rank_cross_cov(data))
    errors = []
    converged = True
    for alpha1 in alpha1_values:
        fit = solver.fit(CenetConfig(alpha1=alpha1, alpha2=alpha2))
        errors.append(est_error(fit.beta, truth.beta_star))
        converged = converged and fit.converged
    return errors, converged


def pilot_gamma(run: ScalingRun) -> float:
    """
    Pick gamma from run.gamma_candidates by median error at n = pilot_n.

    Ties go to the first candidate.
    """
    spec = run.sim.model_copy(update={"n": run.pilot_n})
    alphas = [alpha1_for(g, run.pilot_n, spec.p) for g in run.gamma_candidates]
    results = Parallel(n_jobs=run.jobs)(
        delayed(_scaling_replicate)(spec, PILOT_STREAM_OFFSET + r, alphas, run.alpha2)
        for r in range(run.reps)
    )
    medians = np.median(np.array([errors for errors, _ in results]), axis=0)
    best = int(np.argmin(medians))
    logger.info(
        "Pilot medians: "
        + ", ".join(f"gamma={g:g}: {m:.4f}" for g, m in zip(run.gamma_candidates, medians))
    )
    return float(run.gamma_candidates[best])


def rate_scaling(run: ScalingRun) -> tuple[float, pd.DataFrame, bool]:
    """
    Median est_error per sample size at alpha1 = gamma * sqrt(log p / n).

    Args:
        run: Scaling settings; gamma comes from pilot_gamma when unset

    Returns:
        Tuple of (gamma, table with one row per n, all fits converged)
    """
    gamma = run.gamma if run.gamma is not None else pilot_gamma(run)
    rows = []
    converged = True
    for n in run.n_values:
        spec = run.sim.model_copy(update={"n": n})
        alpha1 = alpha1_for(gamma, n, spec.p)
        results = Parallel(n_jobs=run.jobs)(
            delayed(_scaling_replicate)(spec, r, [alpha1], run.alpha2) for r in range(run.reps)
        )
        errors = np.array([e[0] for e, _ in results])
        converged = converged and all(ok for _, ok in results)
        rows.append({
            "n": n,
            "alpha1": alpha1,
            "median_error": float(np.median(errors)),
            "mean_error": float(np.mean(errors)),
        })
        logger.info(f"n={n}: alpha1={alpha1:.4g}, median error {rows[-1]['median_error']:.4f}")
    return gamma, pd.DataFrame(rows), converged


def export_scaling(
    gamma: float,
    table: pd.DataFrame,
    converged: bool,
    run: ScalingRun,
    out_dir: str | Path,
) -> list[Path]:
    """Write scaling.csv and scaling.json."""
    out_dir = Path(out_dir)
    meta = run_metadata(run)
    meta.update({"gamma": gamma, "converged": converged, "rows": table.to_dict(orient="records")})
    return [
        write_csv(table, out_dir / "scaling.csv"),
        write_json(meta, out_dir / "scaling.json"),
    ]
