"""
The response-weighted cross-moment matrix and the symmetric eigen-machinery built on it.

The sample cross moment is ``M diag(w) M^T`` with ``M = X^T Y / n`` (``p x L``), so its rank is at
most ``min(n, L)``. When ``L + n < p`` the top eigenpairs come from the ``L x L`` Gram matrix
``diag(w)^{1/2} M^T M diag(w)^{1/2}`` instead of a dense ``p x p`` solve.
"""
from typing import Union
from dataclasses import dataclass
import logging

import numpy
from scipy import linalg

from fspcr.common.checks import (InvalidParameterError, NotPsdError, PreconditionError,
                                 check_same_size, check_symmetric)
from fspcr.data.dataset import FunctionalDataset, Grid

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name

NEGATIVE_EIGENVALUE_TOLERANCE = 1e-10
INVERSE_EIGENVALUE_FLOOR = 1e-10
SUPPORTED_EXPONENTS = (1.0, 0.5, -0.5, -1.0)


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """
    ``values`` in descending order with matching orthonormal ``vectors`` columns. ``rank`` counts
    the eigenvalues that are numerically non-zero.
    """
    values: numpy.ndarray
    vectors: numpy.ndarray
    rank: int

    def leading(self, k: int) -> 'EigenSystem':
        return EigenSystem(self.values[:k], self.vectors[:, :k], min(self.rank, k))


@dataclass(frozen=True, eq=False)
class CrossMoment:
    matrix: numpy.ndarray
    factor: numpy.ndarray
    weights: numpy.ndarray
    num_samples: int

    @property
    def num_covariates(self) -> int:
        return self.factor.shape[0]


def fix_signs(vectors: numpy.ndarray) -> numpy.ndarray:
    """Flips each column so its entry of largest magnitude is positive."""
    vectors = numpy.array(vectors, dtype=float, copy=True)
    if vectors.size == 0:
        return vectors
    largest = numpy.argmax(numpy.abs(vectors), axis=0)
    signs = numpy.sign(vectors[largest, numpy.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _symmetrize(matrix: numpy.ndarray) -> numpy.ndarray:
    return (matrix + matrix.T) / 2


def _rank_tolerance(values: numpy.ndarray, size: int) -> float:
    largest = float(numpy.max(numpy.abs(values), initial=0.0))
    return largest * size * numpy.finfo(float).eps


def cross_moment(dataset: FunctionalDataset) -> CrossMoment:
    if not dataset.centered:
        raise PreconditionError("the cross moment needs a centered dataset")
    n = dataset.num_samples
    factor = dataset.X.T @ dataset.Y / n
    weights = dataset.grid.weights
    matrix = _symmetrize((factor * weights) @ factor.T)
    return CrossMoment(matrix=matrix, factor=factor, weights=weights, num_samples=n)


def population_cross_moment(sigma_x: numpy.ndarray, beta: numpy.ndarray, grid: Grid) -> numpy.ndarray:
    """``int (Sigma_x beta(t)) (Sigma_x beta(t))^T dt`` on ``grid``."""
    check_symmetric(sigma_x, "sigma_x")
    check_same_size(sigma_x.shape[0], beta.shape[0], "size of sigma_x", "rows of beta")
    check_same_size(beta.shape[1], len(grid), "columns of beta", "grid length")
    moments = sigma_x @ beta
    return _symmetrize((moments * grid.weights) @ moments.T)


def _complete_basis(vectors: numpy.ndarray, size: int, count: int) -> numpy.ndarray:
    if count <= 0:
        return numpy.zeros((size, 0))
    if vectors.shape[1] == 0:
        return numpy.eye(size)[:, :count]
    return linalg.null_space(vectors.T)[:, :count]


def _gram_eigen(moment: CrossMoment, k: int) -> EigenSystem:
    p = moment.num_covariates
    scaled = moment.factor * numpy.sqrt(moment.weights)
    gram = _symmetrize(scaled.T @ scaled)
    values, vectors = linalg.eigh(gram)
    values, vectors = values[::-1], vectors[:, ::-1]
    tolerance = _rank_tolerance(values, max(gram.shape[0], p))
    rank = int(numpy.sum(values > tolerance))
    keep = min(k, rank)
    mapped = scaled @ vectors[:, :keep] / numpy.sqrt(values[:keep])
    padding = _complete_basis(mapped, p, k - keep)
    all_vectors = numpy.hstack([mapped, padding])
    all_values = numpy.concatenate([values[:keep], numpy.zeros(k - keep)])
    return EigenSystem(all_values, fix_signs(all_vectors), rank)


def _dense_eigen(matrix: numpy.ndarray, k: int) -> EigenSystem:
    p = matrix.shape[0]
    values, vectors = linalg.eigh(_symmetrize(matrix), subset_by_index=[p - k, p - 1])
    values, vectors = values[::-1], vectors[:, ::-1]
    tolerance = _rank_tolerance(values[:1], p)
    numerically_zero = numpy.abs(values) <= tolerance
    values = numpy.where(numerically_zero, 0.0, values)
    rank = int(numpy.sum(values > tolerance))
    return EigenSystem(values, fix_signs(vectors), rank)


def top_k_eigen(source: Union[numpy.ndarray, CrossMoment], k: int) -> EigenSystem:
    """
    The ``k`` leading eigenpairs of a symmetric matrix, or of a ``CrossMoment`` (through its
    ``L x L`` Gram matrix when that is smaller). Pairs beyond the numerical rank come back with
    zero eigenvalues.
    """
    if isinstance(source, CrossMoment):
        p = source.num_covariates
        use_gram = source.factor.shape[1] + source.num_samples < p
    else:
        check_symmetric(source, "matrix")
        p = source.shape[0]
        use_gram = False
    if not 1 <= k <= p:
        raise InvalidParameterError("k must be in [1, {}], got {}".format(p, k))
    if use_gram:
        system = _gram_eigen(source, k)
    else:
        matrix = source.matrix if isinstance(source, CrossMoment) else source
        system = _dense_eigen(matrix, k)
    if k > system.rank:
        logger.warning("requested %d eigenpairs but the matrix has numerical rank %d; "
                       "the remaining %d come back with zero eigenvalues", k, system.rank, k - system.rank)
    return system


def matrix_power(matrix: numpy.ndarray, exponent: float) -> numpy.ndarray:
    """
    ``matrix ** exponent`` for a symmetric positive semi-definite matrix, through its
    eigendecomposition. Negative exponents floor the eigenvalues at ``1e-10`` times the largest.
    """
    if exponent not in SUPPORTED_EXPONENTS:
        raise InvalidParameterError("exponent must be one of {}, got {}".format(SUPPORTED_EXPONENTS, exponent))
    check_symmetric(matrix, "matrix")
    values, vectors = linalg.eigh(_symmetrize(matrix))
    scale = max(1.0, float(numpy.max(numpy.abs(values), initial=0.0)))
    if values.size and values[0] < -NEGATIVE_EIGENVALUE_TOLERANCE * scale:
        raise NotPsdError("matrix has eigenvalue {:.3g}; repair it before taking powers".format(values[0]))
    if exponent < 0:
        largest = float(numpy.max(values, initial=0.0))
        if largest <= 0:
            raise NotPsdError("cannot invert a matrix with no positive eigenvalues")
        values = numpy.maximum(values, INVERSE_EIGENVALUE_FLOOR * largest)
    else:
        values = numpy.maximum(values, 0.0)
    return _symmetrize((vectors * values ** exponent) @ vectors.T)
