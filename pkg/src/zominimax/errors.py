"""Exception types shared across the package.

``ConfigError`` maps to CLI exit code 1, ``NumericalError`` (and subclasses)
to exit code 2.
"""


class ConfigError(ValueError):
    """Invalid configuration; message names the offending field."""


class NumericalError(RuntimeError):
    """Numerical failure during a run."""


class EvaluationError(NumericalError):
    """Objective returned a non-finite value."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class DivergenceError(NumericalError):
    """Iterate norm exceeded the divergence guard."""

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


class InnerSolveError(NumericalError):
    """The verification-only inner maximization failed to converge."""
