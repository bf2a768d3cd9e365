"""
:class:`SpcrModel` is what every fitting method produces: directions ``V`` (``p x K``), the
coefficient curves ``gamma`` (``K x L``) and the centering needed to predict on raw covariates,

    Yhat(t) = (x - x_means)^T V gamma(t) + y_means(t).

:class:`Method` is the base of the fitting methods.
"""
from typing import Any, Dict, Optional
from dataclasses import dataclass, field
import logging

import numpy
import pandas
from pyhocon import ConfigTree

from fspcr.common.checks import (ConfigurationError, DimensionError, check_finite,
                                 check_same_size)
from fspcr.data.dataset import FunctionalDataset, Grid
from fspcr.solvers.directions import DirectionMatrix

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name


@dataclass(frozen=True, eq=False)
class SpcrModel:
    """
    Parameters
    ----------
    method : ``str``
        Name of the method that produced the model.
    directions : ``DirectionMatrix``
        The ``K*`` selected directions.
    gamma : ``numpy.ndarray``
        ``K* x L`` coefficient curves on ``grid``.
    k_star : ``int``
    lambda_star : ``float``, optional
        Selected penalty; ``None`` for methods without one.
    bandwidth : ``int``, optional
        Covariance bandwidth; ``None`` when no banded covariance was used.
    x_means, y_means : ``numpy.ndarray``
        Centering statistics of the training data.
    grid : ``Grid``
    candidate_directions : ``DirectionMatrix``, optional
        All ``k_max`` directions at the selected penalty, of which ``directions`` are the
        leading ``K*``. Used to score the leading ``K0`` directions against a known truth.
    cv_errors : ``pandas.DataFrame``, optional
        Mean cross-validation error, indexed by ``K`` with one column per penalty.
    """
    method: str
    directions: DirectionMatrix
    gamma: numpy.ndarray
    k_star: int
    lambda_star: Optional[float]
    bandwidth: Optional[int]
    x_means: numpy.ndarray
    y_means: numpy.ndarray
    grid: Grid
    candidate_directions: Optional[DirectionMatrix] = None
    cv_errors: Optional[pandas.DataFrame] = field(default=None)

    def __post_init__(self):
        gamma = numpy.atleast_2d(numpy.array(self.gamma, dtype=float, copy=True))
        if self.directions.num_directions == 0:
            gamma = gamma.reshape(0, len(self.grid))
        check_same_size(gamma.shape[0], self.directions.num_directions,
                        "rows of gamma", "number of directions")
        check_same_size(gamma.shape[1], len(self.grid), "columns of gamma", "grid length")
        check_same_size(numpy.shape(self.x_means)[0], self.directions.num_covariates,
                        "length of x_means", "number of covariates")
        check_same_size(numpy.shape(self.y_means)[0], len(self.grid), "length of y_means", "grid length")
        check_finite(gamma, "gamma")
        gamma.setflags(write=False)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "x_means", numpy.asarray(self.x_means, dtype=float))
        object.__setattr__(self, "y_means", numpy.asarray(self.y_means, dtype=float))

    @property
    def num_covariates(self) -> int:
        return self.directions.num_covariates

    def leading_directions(self, k: int) -> DirectionMatrix:
        """The leading ``k`` directions, padded with zero columns when fewer exist."""
        source = self.candidate_directions if self.candidate_directions is not None else self.directions
        available = source.leading(min(k, source.num_directions)).columns
        padding = numpy.zeros((source.num_covariates, k - available.shape[1]))
        return DirectionMatrix(numpy.hstack([available, padding]), source.normalization)

    def to_dict(self) -> Dict[str, Any]:
        document = {
                "method": self.method,
                "directions": self.directions.columns,
                "normalization": self.directions.normalization,
                "gamma": self.gamma,
                "k_star": self.k_star,
                "lambda_star": self.lambda_star,
                "bandwidth": self.bandwidth,
                "x_means": self.x_means,
                "y_means": self.y_means,
                "grid": self.grid.points,
                }
        if self.candidate_directions is not None:
            document["candidate_directions"] = self.candidate_directions.columns
        if self.cv_errors is not None:
            errors = self.cv_errors.to_numpy()
            document["k_values"] = list(self.cv_errors.index)
            document["lambda_grid"] = list(self.cv_errors.columns)
            # Failed cells are infinite, which JSON cannot represent.
            document["cv_errors"] = [[float(value) if numpy.isfinite(value) else None for value in row]
                                     for row in errors]
        return document

    @classmethod
    def from_dict(cls, document: Dict[str, Any]) -> 'SpcrModel':
        try:
            grid = Grid(numpy.asarray(document["grid"], dtype=float))
            num_covariates = len(document["x_means"])
            directions = DirectionMatrix(numpy.asarray(document["directions"], dtype=float).reshape(num_covariates, -1),
                                         document.get("normalization", "raw"))
            candidates = document.get("candidate_directions")
            if candidates is not None:
                candidates = DirectionMatrix(numpy.asarray(candidates, dtype=float).reshape(num_covariates, -1),
                                             directions.normalization)
            cv_errors = None
            if document.get("cv_errors") is not None:
                values = numpy.array([[numpy.inf if value is None else value for value in row]
                                      for row in document["cv_errors"]], dtype=float)
                cv_errors = pandas.DataFrame(values,
                                             index=pandas.Index(document["k_values"], name="K"),
                                             columns=pandas.Index(document["lambda_grid"], name="lambda"))
            return cls(method=document["method"],
                       directions=directions,
                       gamma=numpy.asarray(document["gamma"], dtype=float).reshape(directions.num_directions, -1),
                       k_star=int(document["k_star"]),
                       lambda_star=document.get("lambda_star"),
                       bandwidth=document.get("bandwidth"),
                       x_means=numpy.asarray(document["x_means"], dtype=float),
                       y_means=numpy.asarray(document["y_means"], dtype=float),
                       grid=grid,
                       candidate_directions=candidates,
                       cv_errors=cv_errors)
        except KeyError as error:
            raise ConfigurationError("model document is missing the field {}".format(error))


def predict(model: SpcrModel, X_new: numpy.ndarray) -> numpy.ndarray:
    """``(X_new - x_means) V gamma + y_means``, one predicted curve per row."""
    X_new = numpy.asarray(X_new, dtype=float)
    if X_new.ndim == 1:
        X_new = X_new[numpy.newaxis, :]
    if X_new.ndim != 2:
        raise DimensionError("X_new must be a matrix, got shape {}".format(X_new.shape))
    check_same_size(X_new.shape[1], model.num_covariates, "columns of X_new", "number of covariates")
    return (X_new - model.x_means) @ model.directions.columns @ model.gamma + model.y_means


def beta_hat(model: SpcrModel) -> numpy.ndarray:
    """The coefficient function ``V gamma`` on the model grid, shape ``p x L``."""
    return model.directions.columns @ model.gamma


class Method:
    """
    A fitting method turns a dataset into an :class:`SpcrModel`. Implementations are built from
    a configuration block by ``from_config``; :mod:`fspcr.models.methods` maps the names used
    in configuration files to them.
    """
    name: str = None

    def fit(self,
            dataset: FunctionalDataset,
            num_jobs: int = 1,
            fold_ids: Optional[numpy.ndarray] = None) -> SpcrModel:
        raise NotImplementedError

    def config_dict(self) -> Dict[str, Any]:
        """Plain form of the configuration, used for the provenance hash."""
        raise NotImplementedError

    @classmethod
    def from_config(cls, config: ConfigTree) -> 'Method':
        raise NotImplementedError
