"""Configuration management using pydantic models and YAML."""

from enum import Enum
from pathlib import Path
from typing import Any, Literal, Optional, Sequence, TypeVar

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .errors import InvalidConfigError


class _Config(BaseModel):
    """Base for every config: unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    @classmethod
    def from_yaml(cls, config_path: Path) -> "_Config":
        """Load configuration from YAML file."""
        return load_run_config(cls, config_path)


def log_grid(high: float, low: float, num: int) -> list[float]:
    """Descending grid of num log-spaced points from high down to low."""
    return [float(v) for v in np.logspace(np.log10(high), np.log10(low), num)]


def _strictly_descending(grid: list[float]) -> list[float]:
    if not grid:
        raise ValueError("grid must not be empty")
    if any(v < 0 for v in grid):
        raise ValueError("grid values must be >= 0")
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly descending")
    return grid


class CenetConfig(_Config):
    """Tuning and ADMM parameters of one CENet fit."""
    alpha1: float = Field(default=0.0, ge=0)
    alpha2: float = Field(default=1e-8, gt=0)
    eta: float = Field(default=2.0, gt=0)
    tol: float = Field(default=1e-6, gt=0)
    max_outer_iter: int = Field(default=5000, gt=0)
    inner_tol: float = Field(default=1e-8, gt=0)
    max_inner_iter: int = Field(default=10000, gt=0)


class Scenario(str, Enum):
    """Transformation scenario: y = t or y = t^3 (so h*(y) = y^(1/3))."""
    IDENTITY = "identity"
    CUBE_ROOT = "cube_root"


class NoiseFamily(str, Enum):
    """Noise distributions of the simulation study."""
    NORMAL = "normal"
    CONTAMINATED_NORMAL = "contaminated_normal"
    MIXTURE_NORMAL = "mixture_normal"
    CENTRALIZED_GAMMA = "centralized_gamma"


class SimSpec(_Config):
    """Everything that determines one synthetic dataset."""
    n: int = Field(default=200, gt=0)
    p: int = Field(default=100, ge=4)
    rho: float = Field(default=0.3, gt=-1, lt=1)
    r_squared: float = Field(default=0.6, gt=0, lt=1)
    scenario: Scenario = Scenario.IDENTITY
    noise: NoiseFamily = NoiseFamily.NORMAL
    seed: int = Field(default=0, ge=0, lt=2**64)


class StabilitySpec(_Config):
    """
    Bootstrap stability-selection settings.

    alpha1_grid is the penalty grid of the chosen method (alpha1 for cenet,
    lambda for lasso). When omitted it defaults to 30 log-spaced points in
    [1e-6, 1e-2] for cenet and [1e-6, 5] for lasso.
    """
    b: int = Field(default=1000, ge=1)
    screen_k: int = Field(default=50, ge=1)
    alpha1_grid: Optional[list[float]] = None
    alpha2: float = Field(default=1e-8, gt=0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    standardize: bool = True
    method: Literal["cenet", "lasso"] = "cenet"
    eta: float = Field(default=2.0, gt=0)
    tol: float = Field(default=1e-6, gt=0)

    @field_validator("alpha1_grid")
    @classmethod
    def _check_grid(cls, grid: Optional[list[float]]) -> Optional[list[float]]:
        return None if grid is None else _strictly_descending(grid)

    @property
    def grid(self) -> list[float]:
        if self.alpha1_grid is not None:
            return self.alpha1_grid
        if self.method == "lasso":
            return log_grid(5.0, 1e-6, 30)
        return log_grid(1e-2, 1e-6, 30)


class BenchConfig(_Config):
    """Monte Carlo experiment matrix."""
    n: int = Field(default=200, gt=1)
    p: int = Field(default=100, ge=4)
    rho: float = Field(default=0.3, gt=-1, lt=1)
    r_squared: float = Field(default=0.6, gt=0, lt=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    reps: int = Field(default=100, ge=1)
    scenarios: list[Scenario] = Field(default_factory=lambda: list(Scenario))
    noises: list[NoiseFamily] = Field(default_factory=lambda: list(NoiseFamily))
    alpha1_grid: list[float] = Field(default_factory=lambda: log_grid(1.0, 1e-3, 30))
    alpha2_values: list[float] = Field(default_factory=lambda: [1e-8])
    lambda_ratio_grid: list[float] = Field(default_factory=lambda: log_grid(1.0, 1e-3, 30))
    fpr_points: int = Field(default=101, ge=2)
    eta: float = Field(default=2.0, gt=0)
    tol: float = Field(default=1e-6, gt=0)
    jobs: int = Field(default=1, ge=1)

    @field_validator("alpha1_grid", "lambda_ratio_grid")
    @classmethod
    def _check_grid(cls, grid: list[float]) -> list[float]:
        return _strictly_descending(grid)

    @field_validator("alpha2_values")
    @classmethod
    def _check_alpha2(cls, values: list[float]) -> list[float]:
        if not values or any(v <= 0 for v in values):
            raise ValueError("alpha2_values must be a non-empty list of positive numbers")
        return values

    def sim_spec(self, scenario: Scenario, noise: NoiseFamily) -> SimSpec:
        """SimSpec of one cell of the matrix."""
        return SimSpec(
            n=self.n, p=self.p, rho=self.rho, r_squared=self.r_squared,
            scenario=scenario, noise=noise, seed=self.seed,
        )


# Per-command run configs. Paths are plain strings so YAML stays simple.

class FitRun(_Config):
    input: str
    response: str = "y"
    standardize: bool = False
    cenet: CenetConfig = Field(default_factory=CenetConfig)
    out_dir: str = "out"


class PathRun(_Config):
    input: str
    response: str = "y"
    standardize: bool = False
    alpha1_grid: Optional[list[float]] = None
    grid_points: int = Field(default=30, ge=1)
    cenet: CenetConfig = Field(default_factory=CenetConfig)
    out_dir: str = "out"

    @field_validator("alpha1_grid")
    @classmethod
    def _check_grid(cls, grid: Optional[list[float]]) -> Optional[list[float]]:
        return None if grid is None else _strictly_descending(grid)


class SimulateRun(_Config):
    sim: SimSpec = Field(default_factory=SimSpec)
    replicate: int = Field(default=0, ge=0)
    out_dir: str = "out"


class EvalRun(_Config):
    input: str
    truth: str
    fpr_points: int = Field(default=101, ge=2)
    out_dir: str = "out"


class BenchRun(_Config):
    bench: BenchConfig = Field(default_factory=BenchConfig)
    out_dir: str = "out"


class StabilityRun(_Config):
    input: str
    response: str = "y"
    stability: StabilitySpec = Field(default_factory=StabilitySpec)
    jobs: int = Field(default=1, ge=1)
    out_dir: str = "out"


class ScalingRun(_Config):
    sim: SimSpec = Field(default_factory=lambda: SimSpec(scenario=Scenario.CUBE_ROOT))
    n_values: list[int] = Field(default_factory=lambda: [100, 400])
    gamma: Optional[float] = Field(default=None, gt=0)
    gamma_candidates: list[float] = Field(default_factory=lambda: [0.25, 0.5, 1.0, 2.0])
    pilot_n: int = Field(default=200, gt=1)
    reps: int = Field(default=20, ge=1)
    alpha2: float = Field(default=1e-8, gt=0)
    jobs: int = Field(default=1, ge=1)
    out_dir: str = "out"

    @field_validator("sim", mode="before")
    @classmethod
    def _cube_root_by_default(cls, sim: Any) -> Any:
        if isinstance(sim, dict) and "scenario" not in sim:
            return {**sim, "scenario": Scenario.CUBE_ROOT}
        return sim


RunT = TypeVar("RunT", bound=BaseModel)


def load_run_config(
    model: type[RunT],
    config_path: Optional[Path] = None,
    overrides: Optional[dict[str, Any]] = None,
    required: Sequence[tuple[str, ...]] = (),
) -> RunT:
    """
    Build a run config from a YAML file and command-line overrides.

    Args:
        model: Run config class
        config_path: YAML file (optional); must exist when given
        overrides: Nested dict of values set on the command line
        required: Key paths that must be given explicitly (no default)

    Returns:
        Validated run config
    """
    data: dict[str, Any] = {}
    if config_path is not None:
        config_path = Path(config_path)
        if not config_path.exists():
            raise InvalidConfigError(f"config file not found: {config_path}")
        with open(config_path, "r", encoding="utf-8") as f:
            loaded = yaml.safe_load(f) or {}
        if not isinstance(loaded, dict):
            raise InvalidConfigError(f"config file {config_path} must contain a mapping")
        data = loaded

    data = _merge(data, overrides or {})
    for key_path in required:
        if not _has_path(data, key_path):
            flag = "--" + key_path[-1].replace("_", "-")
            raise InvalidConfigError(f"{'.'.join(key_path)} must be set ({flag} or the config file)")
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise InvalidConfigError(str(e)) from e


def _merge(base: dict[str, Any], extra: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in extra.items():
        if value is None:
            continue
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        elif isinstance(value, dict):
            nested = _merge({}, value)
            if nested:
                merged[key] = nested
        else:
            merged[key] = value
    return merged


def _has_path(data: dict[str, Any], key_path: tuple[str, ...]) -> bool:
    node: Any = data
    for key in key_path:
        if not isinstance(node, dict) or key not in node:
            return False
        node = node[key]
    return True
