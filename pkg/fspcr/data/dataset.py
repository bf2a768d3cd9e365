"""
Paired samples ``(X_i, Y_i(t))`` with every response curve observed on one shared time grid.
Integrals over the support are composite trapezoid sums on that grid.
"""
from typing import Optional, Tuple
from dataclasses import dataclass, field
import logging

import numpy

from fspcr.common.checks import (DimensionError, EmptyDatasetError, InvalidGridError,
                                 check_same_size)

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name


def _frozen(array: numpy.ndarray) -> numpy.ndarray:
    array = numpy.array(array, dtype=float, copy=True)
    array.setflags(write=False)
    return array


def trapezoid_weights(points: numpy.ndarray) -> numpy.ndarray:
    """
    Composite trapezoid weights: half the neighbouring spacing at the ends, half the distance
    between both neighbours in the interior.
    """
    points = numpy.asarray(points, dtype=float)
    if points.ndim != 1 or points.shape[0] < 2:
        raise InvalidGridError("a grid needs at least 2 points, got shape {}".format(points.shape))
    spacing = numpy.diff(points)
    if not numpy.all(spacing > 0) or not numpy.all(numpy.isfinite(points)):
        raise InvalidGridError("grid points must be finite and strictly increasing")
    weights = numpy.empty_like(points)
    weights[0] = spacing[0] / 2
    weights[-1] = spacing[-1] / 2
    weights[1:-1] = (spacing[:-1] + spacing[1:]) / 2
    return weights


@dataclass(frozen=True, eq=False)
class Grid:
    """
    Time points on a compact support together with their quadrature weights.
    """
    points: numpy.ndarray
    weights: numpy.ndarray = field(default=None)

    def __post_init__(self):
        points = _frozen(self.points)
        weights = trapezoid_weights(points) if self.weights is None else _frozen(self.weights)
        check_same_size(points.shape[0], weights.shape[0], "number of grid points", "number of weights")
        if numpy.any(weights <= 0):
            raise InvalidGridError("quadrature weights must be positive")
        weights.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, num_points: int, start: float = 0.0, stop: float = 1.0) -> 'Grid':
        return cls(numpy.linspace(start, stop, num_points))

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def span(self) -> float:
        return float(self.points[-1] - self.points[0])

    def same_as(self, other: 'Grid') -> bool:
        return len(self) == len(other) and numpy.array_equal(self.points, other.points)


def integrate_curve(values: numpy.ndarray, grid: Grid) -> numpy.ndarray:
    """
    Quadrature of ``values`` along its last axis, so a single curve gives a scalar and an
    ``(n, L)`` matrix gives one integral per row.
    """
    values = numpy.asarray(values, dtype=float)
    if values.shape[-1] != len(grid):
        raise DimensionError("curve has {} values but the grid has {} points".format(values.shape[-1], len(grid)))
    return values @ grid.weights


@dataclass(frozen=True, eq=False)
class FunctionalDataset:
    """
    Parameters
    ----------
    X : ``numpy.ndarray``
        Covariates, shape ``(n, p)``.
    Y : ``numpy.ndarray``
        Responses, shape ``(n, L)``; row ``i`` is curve ``Y_i`` on ``grid``.
    grid : ``Grid``
    centered : ``bool``
        Whether ``X`` and ``Y`` have had their column means removed.
    x_means, y_means : ``numpy.ndarray``
        The removed means (zeros for a dataset that was never centered).
    """
    X: numpy.ndarray
    Y: numpy.ndarray
    grid: Grid
    centered: bool = False
    x_means: Optional[numpy.ndarray] = None
    y_means: Optional[numpy.ndarray] = None

    def __post_init__(self):
        X = numpy.atleast_2d(_frozen(self.X))
        Y = numpy.atleast_2d(_frozen(self.Y))
        check_same_size(X.shape[0], Y.shape[0], "rows of X", "rows of Y")
        check_same_size(Y.shape[1], len(self.grid), "columns of Y", "grid length")
        x_means = numpy.zeros(X.shape[1]) if self.x_means is None else self.x_means
        y_means = numpy.zeros(Y.shape[1]) if self.y_means is None else self.y_means
        check_same_size(numpy.shape(x_means)[0], X.shape[1], "length of x_means", "columns of X")
        check_same_size(numpy.shape(y_means)[0], Y.shape[1], "length of y_means", "columns of Y")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "x_means", _frozen(x_means))
        object.__setattr__(self, "y_means", _frozen(y_means))

    @property
    def num_samples(self) -> int:
        return self.X.shape[0]

    @property
    def num_covariates(self) -> int:
        return self.X.shape[1]

    def subset(self, rows: numpy.ndarray) -> 'FunctionalDataset':
        """The raw rows ``rows``; centering is not carried over."""
        if self.centered:
            return FunctionalDataset(self.X[rows] + self.x_means, self.Y[rows] + self.y_means, self.grid)
        return FunctionalDataset(self.X[rows], self.Y[rows], self.grid)

    def with_responses(self, Y: numpy.ndarray) -> 'FunctionalDataset':
        return FunctionalDataset(self.X, Y, self.grid, self.centered, self.x_means, self.y_means)

    def uncentered(self) -> 'FunctionalDataset':
        if not self.centered:
            return self
        return FunctionalDataset(self.X + self.x_means, self.Y + self.y_means, self.grid)


def center(dataset: FunctionalDataset) -> Tuple[FunctionalDataset, numpy.ndarray, numpy.ndarray]:
    """
    Removes the column means of ``X`` and the pointwise mean curve of ``Y``. The means are kept
    on the result so predictions can be mapped back to the original scale. A dataset that is
    already centered is returned as is.
    """
    if dataset.num_samples == 0:
        raise EmptyDatasetError("cannot center a dataset with no samples")
    if dataset.centered:
        return dataset, dataset.x_means, dataset.y_means
    x_means = dataset.X.mean(axis=0)
    y_means = dataset.Y.mean(axis=0)
    centered = FunctionalDataset(dataset.X - x_means, dataset.Y - y_means, dataset.grid,
                                 centered=True, x_means=x_means, y_means=y_means)
    return centered, centered.x_means, centered.y_means


def center_with(dataset: FunctionalDataset,
                x_means: numpy.ndarray,
                y_means: numpy.ndarray) -> FunctionalDataset:
    """Centers raw rows with means estimated elsewhere (e.g. on a training fold)."""
    raw = dataset.uncentered()
    return FunctionalDataset(raw.X - x_means, raw.Y - y_means, raw.grid,
                             centered=True, x_means=x_means, y_means=y_means)
