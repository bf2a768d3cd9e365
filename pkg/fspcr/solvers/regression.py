"""
Regression of the response curves on the projected covariates ``Z = X V``, one least-squares
problem per grid point, all solved against the same ``Z^T Z``.
"""
import logging

import numpy
from scipy import linalg

from fspcr.common.checks import (InvalidDirectionError, InvalidParameterError, NumericalError,
                                 PreconditionError, check_same_size)
from fspcr.data.dataset import FunctionalDataset
from fspcr.solvers.directions import DirectionMatrix

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name

DEFAULT_RIDGE_FALLBACK = 1e-8
MAX_CONDITION_NUMBER = 1e10


def regress_gamma(dataset: FunctionalDataset,
                  directions: DirectionMatrix,
                  ridge_fallback: float = DEFAULT_RIDGE_FALLBACK) -> numpy.ndarray:
    """
    ``gamma(t_l) = (Z^T Z + r I)^{-1} Z^T Y_l`` for every grid index ``l``, with ``r = 0`` unless
    ``Z^T Z`` has condition number ``1e10`` or more, in which case
    ``r = ridge_fallback * trace(Z^T Z) / K``.

    Returns
    -------
    ``K x L`` matrix; row ``k`` is the coefficient curve of direction ``k``.
    """
    if not dataset.centered:
        raise PreconditionError("regress_gamma needs a centered dataset")
    check_same_size(dataset.num_covariates, directions.num_covariates,
                    "columns of X", "rows of the directions")
    if directions.num_directions == 0 or directions.is_zero():
        raise InvalidDirectionError("cannot regress on an all-zero direction matrix")
    if not ridge_fallback > 0:
        raise InvalidParameterError("ridge_fallback must be positive, got {}".format(ridge_fallback))
    scores = dataset.X @ directions.columns
    gram = scores.T @ scores
    moments = scores.T @ dataset.Y
    if not numpy.any(gram):
        logger.warning("directions are orthogonal to every covariate row; gamma is zero")
        return numpy.zeros((directions.num_directions, len(dataset.grid)))
    ridge = 0.0
    if numpy.linalg.cond(gram) >= MAX_CONDITION_NUMBER:
        ridge = ridge_fallback * float(numpy.trace(gram)) / directions.num_directions
        logger.warning("projected covariates are ill-conditioned; adding ridge %.3g", ridge)
    try:
        gamma = linalg.solve(gram + ridge * numpy.eye(gram.shape[0]), moments, assume_a="pos")
    except linalg.LinAlgError as error:
        raise NumericalError("regression on the projected covariates failed: {}".format(error))
    return gamma


def gamma_or_zero(dataset: FunctionalDataset,
                  directions: DirectionMatrix,
                  ridge_fallback: float = DEFAULT_RIDGE_FALLBACK) -> numpy.ndarray:
    """Like ``regress_gamma``, but an all-zero direction matrix gives the intercept-only fit."""
    if directions.is_zero():
        return numpy.zeros((directions.num_directions, len(dataset.grid)))
    return regress_gamma(dataset, directions, ridge_fallback)
