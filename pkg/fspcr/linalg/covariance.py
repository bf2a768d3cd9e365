"""
Covariate covariance estimation for bandable covariance classes: the sample covariance, the
banding operator, bandwidth selection by repeated random splitting, and a positive
semi-definite repair applied after banding.
"""
from typing import List, Optional, Tuple
from dataclasses import dataclass
import logging

import numpy
import pandas
from pyhocon import ConfigTree
from scipy import linalg
from sklearn.model_selection import ShuffleSplit

from fspcr.common.checks import (ConfigurationError, EmptyDatasetError, InvalidParameterError,
                                 NumericalError, check_square, check_symmetric)
from fspcr.common.config import check_keys, reading
from fspcr.common.random import derive_seed

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name

DEFAULT_FLOOR_EPS = 1e-8
MAX_DEFAULT_BANDWIDTH = 50


@dataclass(frozen=True, eq=False)
class BandedCovariance:
    """
    ``matrix`` is the banded estimate, passed through ``psd_repair`` when banding left it
    indefinite. Entries outside the band are exactly zero unless ``psd_repaired`` is set;
    ``min_eig_clipped`` is the smallest eigenvalue before repair.
    """
    matrix: numpy.ndarray
    bandwidth: int
    psd_repaired: bool = False
    min_eig_clipped: float = 0.0


@dataclass(frozen=True)
class BandSelectConfig:
    """
    Parameters
    ----------
    n_splits : ``int``, optional (default = 20)
        Number of random splits averaged in the risk estimate.
    n1 : ``int``, optional
        Size of the first half. Defaults to ``floor(n / 3)``.
    candidate_bandwidths : ``List[int]``, optional
        Defaults to ``0, 1, ..., min(p - 1, 50)``.
    seed : ``int``, optional (default = 0)
    """
    n_splits: int = 20
    n1: Optional[int] = None
    candidate_bandwidths: Optional[Tuple[int, ...]] = None
    seed: int = 0

    def __post_init__(self):
        if self.n_splits < 1:
            raise InvalidParameterError("n_splits must be at least 1, got {}".format(self.n_splits))
        if self.candidate_bandwidths is not None:
            object.__setattr__(self, "candidate_bandwidths", tuple(sorted(int(b) for b in self.candidate_bandwidths)))

    def first_half_size(self, n: int) -> int:
        n1 = n // 3 if self.n1 is None else self.n1
        if not 1 <= n1 < n:
            raise ConfigurationError("first half size must satisfy 1 <= n1 < n, got n1={} for n={}".format(n1, n))
        return n1

    def candidates(self, p: int) -> List[int]:
        if self.candidate_bandwidths is None:
            return list(range(min(p - 1, MAX_DEFAULT_BANDWIDTH) + 1))
        if not self.candidate_bandwidths:
            raise ConfigurationError("candidate bandwidth grid is empty")
        if self.candidate_bandwidths[0] < 0:
            raise ConfigurationError("bandwidths must be non-negative")
        return list(self.candidate_bandwidths)

    @classmethod
    def from_config(cls, config: ConfigTree) -> 'BandSelectConfig':
        check_keys(config, ("n_splits", "n1", "candidate_bandwidths", "seed"), cls.__name__)
        with reading(cls.__name__):
            candidates = config.get_list("candidate_bandwidths", None)
            return cls(n_splits=config.get_int("n_splits", 20),
                       n1=config.get_int("n1", None),
                       candidate_bandwidths=None if candidates is None else tuple(candidates),
                       seed=config.get_int("seed", 0))


def sample_covariance(X: numpy.ndarray) -> numpy.ndarray:
    """``X^T X / n`` for a centered design."""
    X = numpy.atleast_2d(X)
    if X.shape[0] == 0:
        raise EmptyDatasetError("cannot estimate a covariance from zero samples")
    covariance = X.T @ X / X.shape[0]
    return (covariance + covariance.T) / 2


def _lags(p: int) -> numpy.ndarray:
    index = numpy.arange(p)
    return numpy.abs(numpy.subtract.outer(index, index))


def band(matrix: numpy.ndarray, bandwidth: int) -> numpy.ndarray:
    check_square(matrix, "matrix")
    if bandwidth < 0:
        raise InvalidParameterError("bandwidth must be non-negative, got {}".format(bandwidth))
    return numpy.where(_lags(matrix.shape[0]) <= bandwidth, matrix, 0.0)


def select_bandwidth(X: numpy.ndarray, config: BandSelectConfig) -> Tuple[int, pandas.Series]:
    """
    Picks the bandwidth minimizing the split-averaged risk
    ``R(b) = mean_s sum_ij |B_b(S1_s) - S2_s|_ij``, where ``S1_s`` and ``S2_s`` are the sample
    covariances of the two halves of split ``s``. Ties go to the smaller bandwidth.

    Returns
    -------
    The selected bandwidth and the risk curve indexed by candidate bandwidth.
    """
    n, p = X.shape
    if n < 3:
        raise InvalidParameterError("bandwidth selection needs at least 3 samples, got {}".format(n))
    candidates = numpy.array(config.candidates(p))
    n1 = config.first_half_size(n)
    splitter = ShuffleSplit(n_splits=config.n_splits, train_size=n1, test_size=n - n1,
                            random_state=derive_seed(config.seed, "bandwidth-splits"))
    lags = _lags(p).ravel()
    risks = numpy.zeros(candidates.shape[0])
    for first, second in splitter.split(X):
        first_covariance = sample_covariance(X[first])
        second_covariance = sample_covariance(X[second])
        # Per-lag absolute sums: inside the band the error is |S1 - S2|, outside it is |S2|.
        inside = numpy.bincount(lags, weights=numpy.abs(first_covariance - second_covariance).ravel(), minlength=p)
        outside = numpy.bincount(lags, weights=numpy.abs(second_covariance).ravel(), minlength=p)
        inside_cumulative = numpy.cumsum(inside)
        outside_tail = outside.sum() - numpy.cumsum(outside)
        clipped = numpy.minimum(candidates, p - 1)
        risks += inside_cumulative[clipped] + outside_tail[clipped]
    risks /= config.n_splits
    best = int(candidates[int(numpy.argmin(risks))])
    logger.info("selected bandwidth %d from %d candidates", best, candidates.shape[0])
    return best, pandas.Series(risks, index=pandas.Index(candidates, name="bandwidth"), name="risk")


def _repair(matrix: numpy.ndarray, floor_eps: float) -> Tuple[numpy.ndarray, bool, float]:
    check_symmetric(matrix, "matrix")
    try:
        values, vectors = linalg.eigh(matrix)
    except linalg.LinAlgError as error:
        raise NumericalError("eigendecomposition failed during PSD repair: {}".format(error))
    if values.size == 0:
        return matrix, False, 0.0
    floor = floor_eps * max(float(values[-1]), 0.0)
    smallest = float(values[0])
    if smallest >= floor:
        return numpy.array(matrix, dtype=float, copy=True), False, smallest
    repaired = (vectors * numpy.maximum(values, floor)) @ vectors.T
    return (repaired + repaired.T) / 2, True, smallest


def psd_repair(matrix: numpy.ndarray, floor_eps: float = DEFAULT_FLOOR_EPS) -> numpy.ndarray:
    """
    Raises every eigenvalue below ``floor_eps`` times the largest eigenvalue to that floor,
    keeping the eigenvectors.
    """
    return _repair(matrix, floor_eps)[0]


def banded_covariance(X: numpy.ndarray, bandwidth: int, floor_eps: float = DEFAULT_FLOOR_EPS) -> BandedCovariance:
    """Bands the sample covariance of a centered design and repairs it when needed."""
    banded = band(sample_covariance(X), bandwidth)
    matrix, repaired, smallest = _repair(banded, floor_eps)
    if repaired:
        logger.debug("banded covariance had eigenvalue %.3g; clipped to the PSD floor", smallest)
    return BandedCovariance(matrix=matrix, bandwidth=bandwidth, psd_repaired=repaired, min_eig_clipped=smallest)

