"""
Integrated residual sum of squares of rank-one projection regressions, with the plug-in sample
moments in place of expectations.
"""
from typing import Tuple

import numpy

from fspcr.common.checks import InvalidDirectionError, PreconditionError, check_same_size
from fspcr.data.dataset import FunctionalDataset, integrate_curve


def integrated_residual(dataset: FunctionalDataset, w: numpy.ndarray, gamma: numpy.ndarray) -> float:
    """``int (1/n) sum_i (Y_i(t) - X_i^T w gamma(t))^2 dt`` for a given coefficient curve."""
    if not dataset.centered:
        raise PreconditionError("integrated residuals need a centered dataset")
    w = numpy.asarray(w, dtype=float).ravel()
    check_same_size(w.shape[0], dataset.num_covariates, "length of w", "columns of X")
    check_same_size(numpy.shape(gamma)[-1], len(dataset.grid), "length of gamma", "grid length")
    residuals = dataset.Y - numpy.outer(dataset.X @ w, gamma)
    return float(integrate_curve(residuals ** 2, dataset.grid).mean())


def irss_empirical(dataset: FunctionalDataset, w: numpy.ndarray) -> Tuple[float, numpy.ndarray]:
    """
    The closed-form coefficient ``gamma_w(t) = (w^T S w)^{-1} w^T X^T Y(t) / n``, with ``S`` the
    unbanded sample covariance, and the integrated residual it leaves.

    Returns
    -------
    The integrated residual sum of squares and ``gamma_w`` on the grid.
    """
    if not dataset.centered:
        raise PreconditionError("irss_empirical needs a centered dataset")
    w = numpy.asarray(w, dtype=float).ravel()
    check_same_size(w.shape[0], dataset.num_covariates, "length of w", "columns of X")
    if not numpy.any(w):
        raise InvalidDirectionError("w must be non-zero")
    n = dataset.num_samples
    scores = dataset.X @ w
    variance = float(scores @ scores) / n
    if variance > 0:
        gamma = scores @ dataset.Y / n / variance
    else:
        # w annihilates every sample, so the projection explains nothing.
        gamma = numpy.zeros(len(dataset.grid))
    return integrated_residual(dataset, w, gamma), gamma
