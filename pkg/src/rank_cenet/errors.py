"""Exceptions raised by rank_cenet."""

from typing import Optional


class CenetError(Exception):
    """Base class for all library errors."""


class InvalidInputError(CenetError, ValueError):
    """Input data violates an operation's preconditions."""


class NotPositiveSemidefiniteError(InvalidInputError):
    """Matrix has an eigenvalue below the numerical-PSD tolerance."""


class NotPositiveDefiniteError(InvalidInputError):
    """Matrix has a non-positive pivot or diagonal entry."""


class InvalidConfigError(CenetError, ValueError):
    """Configuration is invalid (bad value, unknown key, missing column)."""


class DataParseError(CenetError):
    """CSV input could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        """
        Initialize parse error.

        Args:
            message: Description of the problem
            line: 1-based physical line number in the file (header is line 1)
        """
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
