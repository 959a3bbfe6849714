import logging

import hypothesis
import numpy as np
import pytest

from rank_cenet.data.dataset import Dataset
from rank_cenet.logging_setup import LOGGER_NAME

hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=200, deadline=None)
hypothesis.settings.register_profile("dev", max_examples=50, deadline=None)
hypothesis.settings.load_profile("dev")


@pytest.fixture(autouse=True)
def reset_package_logger():
    """The CLI reconfigures the package logger; undo it between tests."""
    yield
    logger = logging.getLogger(LOGGER_NAME)
    logger.handlers.clear()
    logger.propagate = True
    logger.setLevel(logging.NOTSET)


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


def random_dataset(rng: np.random.Generator, n: int = 50, p: int = 10, signal: int = 3) -> Dataset:
    """Gaussian design with a linear response on the first `signal` columns."""
    x = rng.standard_normal((n, p))
    beta = np.zeros(p)
    beta[:signal] = np.arange(1, signal + 1)
    y = x @ beta + 0.5 * rng.standard_normal(n)
    return Dataset(x, y)


@pytest.fixture
def small_data(rng) -> Dataset:
    return random_dataset(rng)


@pytest.fixture
def planted_csv(tmp_path, rng):
    """CSV with n=50, p=10 where column x1 equals the response."""
    x = rng.standard_normal((50, 10))
    data = Dataset(x, x[:, 0].copy())
    path = tmp_path / "planted.csv"
    data.to_frame("y").to_csv(path, index=False, float_format="%.17g")
    return path
