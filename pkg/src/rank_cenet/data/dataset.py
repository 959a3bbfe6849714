"""Dataset container and CSV loading."""

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from ..errors import DataParseError, InvalidConfigError, InvalidInputError


@dataclass(frozen=True)
class Dataset:
    """Predictor matrix x (n x p) and response y (length n)."""

    x: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        y = np.array(self.y, dtype=float)
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        if x.ndim != 2 or y.ndim != 1:
            raise InvalidInputError(f"x must be 2-D and y 1-D, got {x.shape} and {y.shape}")
        if x.shape[0] != y.shape[0]:
            raise InvalidInputError(f"x has {x.shape[0]} rows but y has length {y.shape[0]}")
        if x.shape[0] < 2 or x.shape[1] < 1:
            raise InvalidInputError(f"need n >= 2 and p >= 1, got n={x.shape[0]}, p={x.shape[1]}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise InvalidInputError("dataset has non-finite entries")

        names = tuple(self.feature_names) or tuple(f"x{j + 1}" for j in range(x.shape[1]))
        if len(names) != x.shape[1]:
            raise InvalidInputError(f"{len(names)} feature names for {x.shape[1]} columns")

        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    def take_rows(self, rows: np.ndarray) -> "Dataset":
        """Dataset made of the given rows (repeats allowed)."""
        return Dataset(self.x[rows], self.y[rows], self.feature_names)

    def take_columns(self, columns: np.ndarray) -> "Dataset":
        """Dataset restricted to the given predictor columns."""
        columns = np.asarray(columns, dtype=int)
        names = tuple(self.feature_names[j] for j in columns)
        return Dataset(self.x[:, columns], self.y, names)

    def with_response(self, y: np.ndarray) -> "Dataset":
        """Same predictors, new response."""
        return Dataset(self.x, y, self.feature_names)

    def standardized(self) -> "Dataset":
        """
        Columns scaled to zero mean and unit variance (1/n normalization).

        Constant columns become exactly zero.
        """
        center = self.x - self.x.mean(axis=0)
        constant = np.ptp(self.x, axis=0) == 0
        center[:, constant] = 0.0
        scale = np.sqrt(np.mean(center**2, axis=0))
        scale[constant] = 1.0
        return Dataset(center / scale, self.y, self.feature_names)

    def to_frame(self, response: str = "y") -> pd.DataFrame:
        """DataFrame with the predictors followed by the response column."""
        frame = pd.DataFrame(self.x, columns=list(self.feature_names))
        frame[response] = self.y
        return frame


def _first_bad_row(mask: pd.Series) -> int:
    # Physical line: header is line 1, first data row is line 2.
    return int(np.flatnonzero(mask.to_numpy())[0]) + 2


def load_csv(
    path: str | Path,
    response: str,
    features: Optional[list[str]] = None,
) -> Dataset:
    """
    Load a dataset from CSV.

    The file must be comma-separated UTF-8 with a header row. Every cell must
    hold a number ('.' decimal, scientific notation accepted); empty or NA
    cells are rejected.

    Args:
        path: CSV file path
        response: Name of the response column
        features: Predictor columns (default: every other column)

    Returns:
        Dataset
    """
    path = Path(path)
    try:
        frame = pd.read_csv(
            path,
            sep=",",
            header=0,
            dtype=str,
            keep_default_na=False,
            encoding="utf-8",
            skip_blank_lines=False,
        )
    except FileNotFoundError as e:
        raise InvalidConfigError(f"input file not found: {path}") from e
    except pd.errors.EmptyDataError as e:
        raise DataParseError("file is empty", line=1) from e
    except pd.errors.ParserError as e:
        found = re.search(r"line (\d+)", str(e))
        raise DataParseError(f"malformed CSV: {e}", line=int(found.group(1)) if found else None) from e
    except UnicodeDecodeError as e:
        raise DataParseError(f"file is not valid UTF-8: {e}") from e

    if response not in frame.columns:
        raise InvalidConfigError(
            f"response column '{response}' not found; columns are {list(frame.columns)}"
        )
    if features is None:
        features = [c for c in frame.columns if c != response]
    else:
        missing = [c for c in features if c not in frame.columns]
        if missing:
            raise InvalidConfigError(f"feature columns not found: {missing}")
    if not features:
        raise InvalidConfigError("no predictor columns")
    if len(frame) < 2:
        raise DataParseError(f"need at least 2 data rows, found {len(frame)}", line=len(frame) + 2)

    numeric = {}
    for column in [*features, response]:
        raw = frame[column].str.strip()
        empty = raw.isna() | raw.eq("") | raw.str.upper().isin(["NA", "NAN", "N/A", "NULL"])
        if empty.any():
            raise DataParseError(f"empty or NA cell in column '{column}'", line=_first_bad_row(empty))
        values = raw.map(_parse_float)
        bad = values.isna() | ~np.isfinite(values.to_numpy(dtype=float, na_value=np.nan))
        if bad.any():
            row = _first_bad_row(bad)
            raise DataParseError(f"non-numeric value '{frame[column].iloc[row - 2]}' in column '{column}'", line=row)
        numeric[column] = values.to_numpy(dtype=float)

    x = np.column_stack([numeric[c] for c in features])
    return Dataset(x, numeric[response], tuple(features))


def _parse_float(cell: str) -> float:
    # float() is correctly rounded; pd.to_numeric is not for 17-digit literals
    try:
        return float(cell)
    except ValueError:
        return float("nan")


def save_csv(data: Dataset, path: str | Path, response: str = "y") -> Path:
    """Write a dataset as CSV (predictors then response)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data.to_frame(response).to_csv(path, index=False, float_format="%.17g")
    return path
