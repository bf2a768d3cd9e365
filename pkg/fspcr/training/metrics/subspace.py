"""
Distances between an estimated direction matrix and the true one.
"""
import logging

import numpy
from scipy import linalg

from fspcr.common.checks import InvalidDirectionError, check_same_size
from fspcr.linalg.spectral import fix_signs

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name


def norm_12(matrix: numpy.ndarray) -> float:
    """Sum over columns of the column Euclidean norms."""
    matrix = numpy.asarray(matrix, dtype=float)
    if matrix.ndim == 1:
        matrix = matrix[:, numpy.newaxis]
    return float(numpy.linalg.norm(matrix, axis=0).sum())


def orthonormal_basis(matrix: numpy.ndarray) -> numpy.ndarray:
    """
    Orthonormal basis of the column span, from the singular vectors above the usual rank
    tolerance, with the largest entry of each basis vector made positive.
    """
    matrix = numpy.atleast_2d(numpy.asarray(matrix, dtype=float).T).T
    if not numpy.any(matrix):
        return numpy.zeros((matrix.shape[0], 0))
    left, singular_values, _ = linalg.svd(matrix, full_matrices=False)
    tolerance = singular_values[0] * max(matrix.shape) * numpy.finfo(float).eps
    rank = int(numpy.sum(singular_values > tolerance))
    return fix_signs(left[:, :rank])


def projection_loss(v_hat: numpy.ndarray, v_star: numpy.ndarray) -> float:
    """
    ``|P_hat - P|_F^2`` for the orthogonal projectors onto the column spans. When ``v_hat`` is
    rank deficient only its non-degenerate part is projected onto, so each missing dimension
    adds one to the loss.
    """
    v_hat = numpy.atleast_2d(numpy.asarray(v_hat, dtype=float).T).T
    v_star = numpy.atleast_2d(numpy.asarray(v_star, dtype=float).T).T
    check_same_size(v_hat.shape[0], v_star.shape[0], "rows of the estimate", "rows of the truth")
    check_same_size(v_hat.shape[1], v_star.shape[1], "columns of the estimate", "columns of the truth")
    true_basis = orthonormal_basis(v_star)
    if true_basis.shape[1] == 0:
        raise InvalidDirectionError("true directions are all zero")
    estimated_basis = orthonormal_basis(v_hat)
    if estimated_basis.shape[1] < v_hat.shape[1]:
        logger.debug("estimated directions have rank %d of %d", estimated_basis.shape[1], v_hat.shape[1])
    overlap = float(numpy.sum((estimated_basis.T @ true_basis) ** 2))
    loss = estimated_basis.shape[1] + true_basis.shape[1] - 2 * overlap
    return max(loss, 0.0)


def aligned_direction_error(v_hat: numpy.ndarray, v_star: numpy.ndarray) -> float:
    """
    ``|V_hat C - V*|_{1,2}`` where ``C`` is the diagonal least-squares alignment of each
    estimated column to its true counterpart, which removes sign and scale.
    """
    v_hat = numpy.atleast_2d(numpy.asarray(v_hat, dtype=float).T).T
    v_star = numpy.atleast_2d(numpy.asarray(v_star, dtype=float).T).T
    check_same_size(v_hat.shape[0], v_star.shape[0], "rows of the estimate", "rows of the truth")
    check_same_size(v_hat.shape[1], v_star.shape[1], "columns of the estimate", "columns of the truth")
    squared_norms = numpy.sum(v_hat ** 2, axis=0)
    inner = numpy.sum(v_hat * v_star, axis=0)
    scales = numpy.divide(inner, squared_norms, out=numpy.zeros_like(inner), where=squared_norms > 0)
    return norm_12(v_hat * scales - v_star)
