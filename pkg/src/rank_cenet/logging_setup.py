"""Logger configuration for command-line runs."""

import logging
from pathlib import Path
from typing import Optional

from rich.logging import RichHandler

LOGGER_NAME = "rank_cenet"


def setup_logger(
    log_file: Optional[str | Path] = None,
    verbose: bool = False,
) -> logging.Logger:
    """
    Setup the package logger.

    Args:
        log_file: Path to log file (default: no file logging)
        verbose: If True, also log to the console through rich

    Returns:
        Configured logger
    """
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    logger.handlers.clear()
    logger.propagate = False

    if log_file is not None:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_path, encoding="utf-8")
        file_handler.setLevel(logging.INFO)
        formatter = logging.Formatter(
            "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S"
        )
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    if verbose:
        console_handler = RichHandler(show_path=False, rich_tracebacks=True)
        console_handler.setLevel(logging.DEBUG)
        logger.addHandler(console_handler)
    else:
        # Warnings still reach stderr when the console is quiet.
        console_handler = RichHandler(show_path=False, level=logging.WARNING)
        logger.addHandler(console_handler)

    return logger
