"""
Exceptions and small validation helpers shared across the package.

Errors split into two families that the command line maps onto exit codes:
``ConfigurationError`` (bad input or usage, exit 1) and ``NumericalError``
(the mathematics failed on valid input, exit 2).
"""
from typing import Any

import numpy


class FspcrError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(FspcrError):
    """
    The error raised when a configuration, argument or input file is invalid.
    """
    def __init__(self, message: str) -> None:
        super(ConfigurationError, self).__init__()
        self.message = message

    def __str__(self):
        return self.message


class InvalidParameterError(ConfigurationError):
    pass


class InvalidGridError(ConfigurationError):
    pass


class DimensionError(ConfigurationError):
    pass


class EmptyDatasetError(ConfigurationError):
    pass


class PreconditionError(ConfigurationError):
    pass


class InvalidDirectionError(ConfigurationError):
    pass


class GridMismatchError(ConfigurationError):
    pass


class MissingFileError(ConfigurationError):
    pass


class NumericalError(FspcrError):
    """A numerical routine failed on input that passed validation."""


class NotPsdError(NumericalError):
    pass


class InsufficientPointsError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    """
    An iterative solver ran out of iterations. ``last_iterate`` holds where it stopped so
    callers can decide whether the approximate answer is still useful.
    """
    def __init__(self, message: str, last_iterate: Any = None) -> None:
        super(ConvergenceError, self).__init__(message)
        self.last_iterate = last_iterate


class FitError(NumericalError):
    pass


def check_same_size(size_1: int, size_2: int, name_1: str, name_2: str) -> None:
    if size_1 != size_2:
        raise DimensionError("{} must match {}, got {} and {}".format(name_1, name_2, size_1, size_2))


def check_finite(array: numpy.ndarray, name: str) -> None:
    if not numpy.all(numpy.isfinite(array)):
        raise NumericalError("{} contains non-finite entries".format(name))


def check_square(matrix: numpy.ndarray, name: str) -> None:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionError("{} must be square, got shape {}".format(name, matrix.shape))


def check_symmetric(matrix: numpy.ndarray, name: str, tolerance: float = 1e-10) -> None:
    check_square(matrix, name)
    scale = max(1.0, float(numpy.abs(matrix).max(initial=0.0)))
    if numpy.abs(matrix - matrix.T).max(initial=0.0) > tolerance * scale:
        raise PreconditionError("{} must be symmetric".format(name))
