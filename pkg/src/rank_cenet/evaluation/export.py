"""CSV/JSON artifacts for external plotting."""

import json
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import pandas as pd

from .metrics import AveragedRoc, ErrorCurve, RocPoint

FLOAT_FORMAT = "%.17g"


def write_csv(frame: pd.DataFrame, path: str | Path, index: bool = False) -> Path:
    """Write a frame as UTF-8 CSV with round-trip float precision."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=index, float_format=FLOAT_FORMAT, encoding="utf-8")
    return path


def _plain(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    return value


def write_json(payload: dict[str, Any], path: str | Path) -> Path:
    """Write a JSON document with sorted keys (stable across runs)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(_plain(payload), f, indent=2, sort_keys=True, ensure_ascii=False)
        f.write("\n")
    return path


def read_json(path: str | Path) -> dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def error_curve_frame(curve: ErrorCurve) -> pd.DataFrame:
    return pd.DataFrame({
        "alpha": curve.alpha,
        "mean_nnz": curve.mean_nnz,
        "mean_error": curve.mean_error,
        "median_error": curve.median_error,
    })


def roc_frame(roc: AveragedRoc) -> pd.DataFrame:
    return pd.DataFrame({"fpr": roc.fpr, "mean_tpr": roc.tpr})


def roc_points_frame(points: Sequence[RocPoint]) -> pd.DataFrame:
    return pd.DataFrame(
        [(p.alpha, p.nnz, p.fpr, p.tpr) for p in points],
        columns=["alpha", "nnz", "fpr", "tpr"],
    )


def export_curves(
    out_dir: str | Path,
    prefix: str,
    curve: ErrorCurve,
    roc: AveragedRoc,
) -> list[Path]:
    """
    Write an error curve and an averaged ROC curve.

    Files: <prefix>_error.csv, <prefix>_roc.csv and <prefix>.json.
    """
    out_dir = Path(out_dir)
    return [
        write_csv(error_curve_frame(curve), out_dir / f"{prefix}_error.csv"),
        write_csv(roc_frame(roc), out_dir / f"{prefix}_roc.csv"),
        write_json(
            {
                "error_curve": error_curve_frame(curve).to_dict(orient="list"),
                "roc": {"fpr": roc.fpr, "mean_tpr": roc.tpr, "auc": roc.auc},
            },
            out_dir / f"{prefix}.json",
        ),
    ]
