"""Exception types shared across the solvers and the CLI."""

import numpy as np


class GrmrError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(GrmrError, ValueError):
    """Invalid parameters or malformed input files."""


class ConditionOneError(GrmrError):
    """The origin is not strictly inside the convex hull of the data.

    Carries the direction that exposed the problem and the top score there,
    so callers can report *where* the dataset fails.
    """

    def __init__(self, message, direction=None, omega=None):
        super().__init__(message)
        self.direction = None if direction is None else np.asarray(direction, dtype=float)
        self.omega = omega


class TimeoutExceeded(GrmrError):
    """A run did not finish within its wall-clock budget."""
