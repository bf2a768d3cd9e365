"""
K-fold cross-validation over a grid of (number of directions, penalty) cells.

A fitting method supplies a ``DirectionPath``: given a centered training fold, it returns one
direction matrix with ``max(k_values)`` columns per penalty. Because the penalized problem is
separable over columns, the fit for ``K`` directions is the leading ``K`` columns of that
matrix, so one solve per (fold, penalty) covers every ``K``.
"""
from typing import Callable, List, NamedTuple, Optional, Sequence
import logging

import numpy
import pandas
from joblib import Parallel, delayed
from sklearn.model_selection import KFold

from fspcr.common.checks import (ConfigurationError, FitError, NumericalError,
                                 check_same_size)
from fspcr.common.random import derive_seed
from fspcr.data.dataset import FunctionalDataset, center, center_with
from fspcr.solvers.directions import DirectionMatrix
from fspcr.solvers.regression import gamma_or_zero
from fspcr.training.metrics.integrated_squared_error import IntegratedSquaredError

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name

DirectionPath = Callable[[FunctionalDataset], List[Optional[DirectionMatrix]]]


class CrossValidationResult(NamedTuple):
    k_star: int
    lambda_star: float
    errors: pandas.DataFrame
    fold_errors: numpy.ndarray


def assign_folds(num_samples: int,
                 folds: int,
                 seed: int,
                 fold_ids: Optional[numpy.ndarray] = None) -> numpy.ndarray:
    """
    Fold index of every sample, from a seeded shuffle unless ``fold_ids`` is supplied.
    """
    if folds < 2:
        raise ConfigurationError("need at least 2 folds, got {}".format(folds))
    if fold_ids is not None:
        fold_ids = numpy.asarray(fold_ids, dtype=int)
        check_same_size(fold_ids.shape[0], num_samples, "length of fold_ids", "number of samples")
        if set(numpy.unique(fold_ids)) != set(range(folds)):
            raise ConfigurationError("fold_ids must use every fold index 0..{}".format(folds - 1))
        return fold_ids
    if num_samples // folds < 2:
        raise ConfigurationError("{} samples cannot fill {} folds with at least 2 samples "
                                 "each".format(num_samples, folds))
    assignment = numpy.empty(num_samples, dtype=int)
    splitter = KFold(n_splits=folds, shuffle=True, random_state=derive_seed(seed, "folds"))
    for index, (_, held_out) in enumerate(splitter.split(numpy.zeros((num_samples, 1)))):
        assignment[held_out] = index
    return assignment


def held_out_errors(train: FunctionalDataset,
                    test: FunctionalDataset,
                    path: Sequence[Optional[DirectionMatrix]],
                    k_values: Sequence[int],
                    ridge_fallback: float) -> numpy.ndarray:
    """
    Mean integrated squared prediction error on the raw ``test`` rows for every (K, penalty)
    cell, using the centering of the ``train`` fold. Cells whose fit failed are infinite.
    """
    errors = numpy.full((len(k_values), len(path)), numpy.inf)
    metric = IntegratedSquaredError()
    raw_test = test.uncentered()
    for j, directions in enumerate(path):
        if directions is None:
            continue
        for i, k in enumerate(k_values):
            leading = directions.leading(k)
            try:
                gamma = gamma_or_zero(train, leading, ridge_fallback)
            except NumericalError as error:
                logger.debug("cell (K=%d, index %d) failed: %s", k, j, error)
                continue
            prediction = (raw_test.X - train.x_means) @ leading.columns @ gamma + train.y_means
            metric(prediction, raw_test.Y, raw_test.grid)
            errors[i, j] = metric.get_metric(reset=True)
    return errors


def _fold_errors(dataset: FunctionalDataset,
                 train_rows: numpy.ndarray,
                 test_rows: numpy.ndarray,
                 direction_path: DirectionPath,
                 k_values: Sequence[int],
                 num_penalties: int,
                 ridge_fallback: float) -> numpy.ndarray:
    train, _, _ = center(dataset.subset(train_rows))
    test = center_with(dataset.subset(test_rows), train.x_means, train.y_means)
    try:
        path = direction_path(train)
    except NumericalError as error:
        logger.warning("direction fit failed on a fold: %s", error)
        return numpy.full((len(k_values), num_penalties), numpy.inf)
    check_same_size(len(path), num_penalties, "length of the direction path", "number of penalties")
    return held_out_errors(train, test, path, k_values, ridge_fallback)


def select_cell(errors: numpy.ndarray, k_values: Sequence[int], penalties: Sequence[float]) -> Optional[tuple]:
    """
    Indices of the smallest finite error; ties go to the smaller K, then the larger penalty.
    """
    finite = numpy.isfinite(errors)
    if not numpy.any(finite):
        return None
    best = numpy.min(errors[finite])
    k_order = numpy.argsort(numpy.asarray(k_values), kind="stable")
    penalty_order = numpy.argsort(-numpy.asarray(penalties, dtype=float), kind="stable")
    for i in k_order:
        for j in penalty_order:
            if errors[i, j] == best:
                return int(i), int(j)
    return None


def cross_validate(dataset: FunctionalDataset,
                   direction_path: DirectionPath,
                   k_values: Sequence[int],
                   penalties: Sequence[float],
                   folds: int = 5,
                   seed: int = 0,
                   ridge_fallback: float = 1e-8,
                   fold_ids: Optional[numpy.ndarray] = None,
                   num_jobs: int = 1) -> CrossValidationResult:
    """
    Runs the folds (in parallel when ``num_jobs > 1``) and picks the cell with the smallest
    mean held-out error. A cell that failed on any fold is excluded.

    Raises
    ------
    FitError
        When every cell failed.
    """
    k_values = [int(k) for k in k_values]
    penalties = [float(penalty) for penalty in penalties]
    assignment = assign_folds(dataset.num_samples, folds, seed, fold_ids)
    rows = numpy.arange(dataset.num_samples)
    tasks = [(rows[assignment != fold], rows[assignment == fold]) for fold in range(folds)]
    results = Parallel(n_jobs=num_jobs)(
            delayed(_fold_errors)(dataset, train_rows, test_rows, direction_path,
                                  k_values, len(penalties), ridge_fallback)
            for train_rows, test_rows in tasks)
    fold_errors = numpy.stack(results)
    mean_errors = fold_errors.mean(axis=0)
    cell = select_cell(mean_errors, k_values, penalties)
    if cell is None:
        raise FitError("every cross-validation cell failed")
    k_star, lambda_star = k_values[cell[0]], penalties[cell[1]]
    logger.info("cross-validation selected K=%d, lambda=%.4g (error %.4g)",
                k_star, lambda_star, mean_errors[cell])
    table = pandas.DataFrame(mean_errors,
                             index=pandas.Index(k_values, name="K"),
                             columns=pandas.Index(penalties, name="lambda"))
    return CrossValidationResult(k_star, lambda_star, table, fold_errors)
