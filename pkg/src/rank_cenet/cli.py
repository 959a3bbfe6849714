"""Command-line interface for CENet fitting, simulation and benchmarks."""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np
import pandas as pd
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from . import __version__
from .bench import export_bench, export_scaling, rate_scaling, run_bench
from .config import (
    BenchRun,
    EvalRun,
    FitRun,
    PathRun,
    ScalingRun,
    SimulateRun,
    StabilityRun,
    load_run_config,
    log_grid,
)
from .data.dataset import load_csv, save_csv
from .data.rank import rank_cross_cov
from .data.simulate import generate_dataset
from .errors import CenetError, InvalidConfigError, InvalidInputError
from .estimators.cenet import CenetFit, CenetSolver
from .evaluation.export import export_curves, read_json, roc_points_frame, write_csv, write_json
from .evaluation.metrics import average_roc, default_fpr_grid, error_vs_nnz, roc_from_path
from .logging_setup import setup_logger
from .stability import export_stability, stability_paths

console = Console()
logger = logging.getLogger("rank_cenet.cli")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2

PATH_COLUMNS = ["alpha1", "nnz", "converged", "iterations", "constraint_value", "kkt_residual", "objective"]


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from e


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e


def _str_list(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def _fit_summary(fit: CenetFit) -> dict[str, Any]:
    return {
        "alpha1": fit.alpha1,
        "alpha2": fit.alpha2,
        "nnz": fit.nnz,
        "converged": fit.converged,
        "iterations": fit.iterations,
        "constraint_value": fit.constraint_value,
        "kkt_residual": fit.kkt_residual,
        "objective": fit.objective,
        "on_boundary": fit.on_boundary,
    }


def _coefficient_table(names: tuple[str, ...], beta: np.ndarray, limit: int = 20) -> Table:
    table = Table(title="Nonzero coefficients")
    table.add_column("variable", style="cyan")
    table.add_column("beta", justify="right")
    for j in np.flatnonzero(beta)[:limit]:
        table.add_row(names[j], f"{beta[j]:.6g}")
    return table


def _frame_table(frame: pd.DataFrame, title: str) -> Table:
    table = Table(title=title)
    for column in frame.columns:
        table.add_column(str(column), justify="right" if frame[column].dtype.kind in "fiu" else "left")
    for row in frame.itertuples(index=False):
        table.add_row(*[f"{v:.4g}" if isinstance(v, float) else str(v) for v in row])
    return table


def cmd_fit(run: FitRun) -> int:
    """Fit CENet at one (alpha1, alpha2) and write fit.json."""
    data = load_csv(run.input, run.response)
    solver = CenetSolver(rank_cross_cov(data, standardize=run.standardize))
    fit = solver.fit(run.cenet)

    report = _fit_summary(fit)
    report.update({
        "alpha_max": solver.alpha_max,
        "feature_names": list(data.feature_names),
        "beta": fit.beta,
        "input": run.input,
        "response": run.response,
        "standardize": run.standardize,
    })
    if not fit.converged:
        report["warning"] = f"ADMM did not converge in {run.cenet.max_outer_iter} iterations"
    path = write_json(report, Path(run.out_dir) / "fit.json")

    console.print(_coefficient_table(data.feature_names, fit.beta))
    console.print(
        f"alpha_max={solver.alpha_max:.6g}  nnz={fit.nnz}  "
        f"constraint={fit.constraint_value:.6g}  kkt={fit.kkt_residual:.2e}  iterations={fit.iterations}"
    )
    console.print(f"[green]✓[/green] Wrote {path}")
    return EXIT_OK if fit.converged else EXIT_NOT_CONVERGED


def cmd_path(run: PathRun) -> int:
    """Warm-started CENet path; writes path.csv and path.json."""
    data = load_csv(run.input, run.response)
    solver = CenetSolver(rank_cross_cov(data, standardize=run.standardize))
    if run.alpha1_grid is not None:
        grid = run.alpha1_grid
    elif solver.alpha_max > 0:
        grid = log_grid(solver.alpha_max, solver.alpha_max * 1e-3, run.grid_points)
    else:
        raise InvalidInputError("every rank cross-covariance is zero; pass --alpha1-grid explicitly")

    fits = solver.path(grid, run.cenet)
    frame = pd.DataFrame([_fit_summary(f) for f in fits])[PATH_COLUMNS]
    coefficients = pd.DataFrame(np.array([f.beta for f in fits]), columns=list(data.feature_names))
    frame = pd.concat([frame, coefficients], axis=1)

    out_dir = Path(run.out_dir)
    write_csv(frame, out_dir / "path.csv")
    converged = all(f.converged for f in fits)
    write_json(
        {
            "alpha_max": solver.alpha_max,
            "alpha2": run.cenet.alpha2,
            "grid": grid,
            "feature_names": list(data.feature_names),
            "fits": [_fit_summary(f) for f in fits],
            "converged": converged,
        },
        out_dir / "path.json",
    )
    console.print(_frame_table(frame[PATH_COLUMNS], "CENet path"))
    console.print(f"[green]✓[/green] Wrote {out_dir / 'path.csv'}")
    return EXIT_OK if converged else EXIT_NOT_CONVERGED


def cmd_simulate(run: SimulateRun) -> int:
    """Simulate one dataset; writes data.csv and truth.json."""
    data, truth = generate_dataset(run.sim, run.replicate)
    out_dir = Path(run.out_dir)
    save_csv(data, out_dir / "data.csv")
    write_json(
        {
            "beta_star": truth.beta_star,
            "sigma": truth.sigma,
            "sim": run.sim.model_dump(mode="json"),
            "replicate": run.replicate,
            "feature_names": list(data.feature_names),
        },
        out_dir / "truth.json",
    )
    console.print(f"[green]✓[/green] Simulated n={run.sim.n}, p={run.sim.p} into {out_dir}")
    return EXIT_OK


def cmd_eval(run: EvalRun) -> int:
    """Score a path.csv against truth.json; writes ROC and error curves."""
    input_path = Path(run.input)
    if not input_path.exists():
        raise InvalidConfigError(f"path file not found: {input_path}")
    frame = pd.read_csv(input_path)
    truth = read_json(run.truth)
    beta_star = np.asarray(truth["beta_star"], dtype=float)

    penalty = next((c for c in ("alpha1", "lambda") if c in frame.columns), None)
    if penalty is None:
        raise InvalidInputError(f"{input_path} has no alpha1 or lambda column")
    coefficient_columns = [c for c in frame.columns if c not in PATH_COLUMNS and c != "lambda"]
    if len(coefficient_columns) != beta_star.size:
        raise InvalidInputError(
            f"{len(coefficient_columns)} coefficient columns but beta_star has length {beta_star.size}"
        )
    betas = list(frame[coefficient_columns].to_numpy(dtype=float))
    alphas = frame[penalty].to_numpy(dtype=float).tolist()

    points = roc_from_path(betas, beta_star, alphas)
    roc = average_roc([points], default_fpr_grid(run.fpr_points))
    curve = error_vs_nnz([betas], beta_star, alphas)

    out_dir = Path(run.out_dir)
    export_curves(out_dir, "eval", curve, roc)
    write_csv(roc_points_frame(points), out_dir / "eval_roc_points.csv")
    console.print(f"AUC={roc.auc:.4f}  min error={float(curve.mean_error.min()):.4f}")
    console.print(f"[green]✓[/green] Wrote evaluation to {out_dir}")
    return EXIT_OK


def cmd_bench(run: BenchRun) -> int:
    """Run the Monte Carlo matrix and write its artifacts."""
    config = run.bench
    console.print(Panel.fit(
        "[bold cyan]CENet vs lasso Monte Carlo[/bold cyan]\n"
        f"n={config.n}, p={config.p}, R²={config.r_squared}, reps={config.reps}, seed={config.seed}",
        border_style="cyan",
    ))
    result = run_bench(config)
    export_bench(result, config, run.out_dir)
    console.print(_frame_table(result.summary(), "Summary"))
    if not result.converged:
        console.print("[yellow]Warning: some fits did not converge[/yellow]")
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_stability(run: StabilityRun) -> int:
    """Bootstrap stability paths; writes stability_freq.csv and stability.json."""
    data = load_csv(run.input, run.response)
    paths = stability_paths(data, run.stability, jobs=run.jobs)
    export_stability(paths, run.stability, run.out_dir)

    table = Table(title="Top variables by maximum selection frequency")
    table.add_column("variable", style="cyan")
    table.add_column("max freq", justify="right")
    for name, freq in paths.top_variables(10):
        table.add_row(name, f"{freq:.3f}")
    console.print(table)
    if paths.unconverged_fits:
        console.print(f"[yellow]Warning: {paths.unconverged_fits} fits did not converge[/yellow]")
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_scaling(run: ScalingRun) -> int:
    """Median error against n with alpha1 = gamma * sqrt(log p / n)."""
    gamma, table, converged = rate_scaling(run)
    export_scaling(gamma, table, converged, run, run.out_dir)
    console.print(_frame_table(table, f"Rate scaling (gamma={gamma:g})"))
    return EXIT_OK if converged else EXIT_NOT_CONVERGED


def _cenet_overrides(args: argparse.Namespace) -> dict[str, Any]:
    return {
        "alpha1": args.alpha1,
        "alpha2": args.alpha2,
        "eta": args.eta,
        "tol": args.tol,
        "max_outer_iter": args.max_iter,
    }


def _sim_overrides(args: argparse.Namespace) -> dict[str, Any]:
    return {
        "n": getattr(args, "n", None),
        "p": args.p,
        "rho": args.rho,
        "r_squared": args.rsq,
        "scenario": args.scenario,
        "noise": args.noise,
        "seed": args.seed,
    }


def _load(args: argparse.Namespace) -> Any:
    out = {"out_dir": args.out_dir}
    if args.command == "fit":
        overrides = {"input": args.input, "response": args.response, "standardize": args.standardize,
                     "cenet": _cenet_overrides(args), **out}
        return load_run_config(FitRun, args.config, overrides)
    if args.command == "path":
        overrides = {"input": args.input, "response": args.response, "standardize": args.standardize,
                     "alpha1_grid": args.alpha1_grid, "grid_points": args.grid_points,
                     "cenet": _cenet_overrides(args), **out}
        return load_run_config(PathRun, args.config, overrides)
    if args.command == "simulate":
        overrides = {"sim": _sim_overrides(args), "replicate": args.replicate, **out}
        return load_run_config(SimulateRun, args.config, overrides, required=[("sim", "seed")])
    if args.command == "eval":
        overrides = {"input": args.input, "truth": args.truth, "fpr_points": args.fpr_points, **out}
        return load_run_config(EvalRun, args.config, overrides)
    if args.command == "bench":
        bench = {
            "n": args.n, "p": args.p, "rho": args.rho, "r_squared": args.rsq, "seed": args.seed,
            "reps": args.reps, "scenarios": args.scenario, "noises": args.noise,
            "alpha1_grid": args.alpha1_grid, "alpha2_values": args.alpha2,
            "lambda_ratio_grid": args.lambda_ratio_grid, "fpr_points": args.fpr_points,
            "eta": args.eta, "tol": args.tol, "jobs": args.jobs,
        }
        return load_run_config(BenchRun, args.config, {"bench": bench, **out}, required=[("bench", "seed")])
    if args.command == "stability":
        stability = {
            "b": args.b, "screen_k": args.screen_k, "alpha1_grid": args.alpha1_grid,
            "alpha2": args.alpha2, "seed": args.seed, "standardize": args.standardize,
            "method": args.method, "eta": args.eta, "tol": args.tol,
        }
        overrides = {"input": args.input, "response": args.response, "stability": stability,
                     "jobs": args.jobs, **out}
        return load_run_config(StabilityRun, args.config, overrides, required=[("stability", "seed")])
    if args.command == "scaling":
        overrides = {"sim": _sim_overrides(args), "n_values": args.n_values, "gamma": args.gamma,
                     "pilot_n": args.pilot_n, "reps": args.reps, "alpha2": args.alpha2,
                     "jobs": args.jobs, **out}
        return load_run_config(ScalingRun, args.config, overrides, required=[("sim", "seed")])
    raise InvalidConfigError(f"unknown command: {args.command}")


COMMANDS: dict[str, Callable[[Any], int]] = {
    "fit": cmd_fit,
    "path": cmd_path,
    "simulate": cmd_simulate,
    "eval": cmd_eval,
    "bench": cmd_bench,
    "stability": cmd_stability,
    "scaling": cmd_scaling,
}


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per workflow."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML run config; flags override its values")
    common.add_argument("--out-dir", type=str, help="Output directory (default: out)")
    common.add_argument("--log-file", type=str, help="Log file path (default: no log file)")
    common.add_argument("-v", "--verbose", action="store_true", help="Show debug logging in the terminal")

    data_args = argparse.ArgumentParser(add_help=False)
    data_args.add_argument("--input", type=str, help="Input CSV with a header row")
    data_args.add_argument("--response", type=str, help="Response column (default: y)")

    cenet_args = argparse.ArgumentParser(add_help=False)
    cenet_args.add_argument("--alpha1", type=float, help="l1 weight (default: 0)")
    cenet_args.add_argument("--alpha2", type=float, help="l2 weight (default: 1e-8)")
    cenet_args.add_argument("--eta", type=float, help="ADMM step size (default: 2)")
    cenet_args.add_argument("--tol", type=float, help="ADMM tolerance (default: 1e-6)")
    cenet_args.add_argument("--max-iter", type=int, help="ADMM iteration cap (default: 5000)")
    cenet_args.add_argument("--standardize", action=argparse.BooleanOptionalAction, default=None,
                            help="Scale predictors to unit variance first")

    sim_args = argparse.ArgumentParser(add_help=False)
    sim_args.add_argument("--p", type=int, help="Number of predictors (>= 4)")
    sim_args.add_argument("--rho", type=float, help="AR(1) correlation (default: 0.3)")
    sim_args.add_argument("--rsq", type=float, help="Target R² (default: 0.6)")
    sim_args.add_argument("--seed", type=int, help="Random seed (required)")

    parser = argparse.ArgumentParser(
        prog="rank-cenet",
        description="Rank-correlation constrained elastic net for the linear transformation model",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("fit", parents=[common, data_args, cenet_args], help="Fit CENet at one alpha1")

    path = sub.add_parser("path", parents=[common, data_args, cenet_args], help="Fit a CENet path")
    path.add_argument("--alpha1-grid", type=_float_list, help="Descending comma-separated alpha1 values")
    path.add_argument("--grid-points", type=int, help="Default grid size (default: 30)")

    simulate = sub.add_parser("simulate", parents=[common, sim_args], help="Simulate one dataset")
    simulate.add_argument("--n", type=int, help="Sample size (default: 200)")
    simulate.add_argument("--scenario", type=str, help="identity | cube_root")
    simulate.add_argument("--noise", type=str,
                          help="normal | contaminated_normal | mixture_normal | centralized_gamma")
    simulate.add_argument("--replicate", type=int, help="Replicate stream index (default: 0)")

    evaluate = sub.add_parser("eval", parents=[common], help="Score a path against the truth")
    evaluate.add_argument("--input", type=str, help="path.csv written by the path command")
    evaluate.add_argument("--truth", type=str, help="truth.json written by the simulate command")
    evaluate.add_argument("--fpr-points", type=int, help="ROC grid size (default: 101)")

    bench = sub.add_parser("bench", parents=[common, sim_args], help="Monte Carlo CENet vs lasso")
    bench.add_argument("--n", type=int, help="Sample size (default: 200)")
    bench.add_argument("--reps", type=int, help="Replicates per cell (default: 100)")
    bench.add_argument("--scenario", type=_str_list, help="Comma-separated scenarios (default: all)")
    bench.add_argument("--noise", type=_str_list, help="Comma-separated noise families (default: all)")
    bench.add_argument("--alpha1-grid", type=_float_list, help="Descending CENet alpha1 grid")
    bench.add_argument("--alpha2", type=_float_list, help="Comma-separated alpha2 values (default: 1e-8)")
    bench.add_argument("--lambda-ratio-grid", type=_float_list,
                       help="Descending lasso grid as fractions of each replicate's null lambda")
    bench.add_argument("--fpr-points", type=int, help="ROC grid size (default: 101)")
    bench.add_argument("--eta", type=float, help="ADMM step size (default: 2)")
    bench.add_argument("--tol", type=float, help="ADMM tolerance (default: 1e-6)")
    bench.add_argument("--jobs", type=int, help="Worker processes (default: 1)")

    stability = sub.add_parser("stability", parents=[common, data_args], help="Bootstrap stability paths")
    stability.add_argument("--b", type=int, help="Bootstrap replicates (default: 1000)")
    stability.add_argument("--screen-k", type=int, help="Predictors kept by screening (default: 50)")
    stability.add_argument("--alpha1-grid", type=_float_list, help="Descending penalty grid")
    stability.add_argument("--alpha2", type=float, help="l2 weight (default: 1e-8)")
    stability.add_argument("--seed", type=int, help="Random seed (required)")
    stability.add_argument("--standardize", action=argparse.BooleanOptionalAction, default=None,
                           help="Standardize each resample (default: on)")
    stability.add_argument("--method", type=str, help="cenet | lasso (default: cenet)")
    stability.add_argument("--eta", type=float, help="ADMM step size (default: 2)")
    stability.add_argument("--tol", type=float, help="ADMM tolerance (default: 1e-6)")
    stability.add_argument("--jobs", type=int, help="Worker processes (default: 1)")

    scaling = sub.add_parser("scaling", parents=[common, sim_args], help="Error against sample size")
    scaling.add_argument("--n-values", type=_int_list, help="Comma-separated sample sizes (default: 100,400)")
    scaling.add_argument("--scenario", type=str, help="identity | cube_root (default: cube_root)")
    scaling.add_argument("--noise", type=str, help="Noise family (default: normal)")
    scaling.add_argument("--gamma", type=float, help="alpha1 = gamma sqrt(log p / n); picked by a pilot when unset")
    scaling.add_argument("--pilot-n", type=int, help="Pilot sample size (default: 200)")
    scaling.add_argument("--reps", type=int, help="Replicates per sample size (default: 20)")
    scaling.add_argument("--alpha2", type=float, help="l2 weight (default: 1e-8)")
    scaling.add_argument("--jobs", type=int, help="Worker processes (default: 1)")

    return parser


def run(argv: Optional[list[str]] = None) -> int:
    """Parse arguments, run one command and return its exit code."""
    args = build_parser().parse_args(argv)
    setup_logger(log_file=args.log_file, verbose=args.verbose)

    try:
        config = _load(args)
        return COMMANDS[args.command](config)
    except CenetError as e:
        logger.error(f"{args.command} failed: {e}")
        console.print(f"[red]Error:[/red] {e}")
        return EXIT_ERROR


def main():
    """CLI entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()
