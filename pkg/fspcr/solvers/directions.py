"""
Estimators for supervised principal component directions.

The penalized estimator solves, column by column,

    minimize  1/2 v^T Sigma_x v - u_k^T v + lambda |v|_1

which has the same minimizer as ``1/2 |Sigma_x^{-1/2} u_k - Sigma_x^{1/2} v|^2 + lambda |v|_1``.
All ``K`` columns share the Gram matrix, so one coordinate update is applied to the whole row
``V[j]`` at once. The residual ``R = U - Sigma_x V`` is maintained through rank-one updates and
recomputed exactly after every full sweep.
"""
from typing import List, NamedTuple, Optional, Sequence
from dataclasses import dataclass
import logging

import numpy
from pyhocon import ConfigTree
from scipy import linalg

from fspcr.common.checks import (ConvergenceError, InvalidDirectionError, InvalidParameterError,
                                 NumericalError, PreconditionError, check_finite,
                                 check_same_size, check_symmetric)
from fspcr.common.config import check_keys, reading
from fspcr.linalg.spectral import matrix_power, top_k_eigen

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name

NORMALIZATIONS = ("raw", "sigma_x_unit")
KKT_TOLERANCE = 1e-6
UNIT_TOLERANCE = 1e-8


@dataclass(frozen=True, eq=False)
class DirectionMatrix:
    """
    Parameters
    ----------
    columns : ``numpy.ndarray``
        ``p x K`` matrix, one direction per column.
    normalization : ``str``, optional (default = "raw")
        ``"sigma_x_unit"`` when every column has ``v^T Sigma_x v = 1`` for the covariance it was
        computed with, ``"raw"`` otherwise.
    """
    columns: numpy.ndarray
    normalization: str = "raw"

    def __post_init__(self):
        columns = numpy.array(self.columns, dtype=float, copy=True)
        if columns.ndim == 1:
            columns = columns[:, numpy.newaxis]
        if columns.ndim != 2:
            raise InvalidDirectionError("directions must be a p x K matrix, got shape {}".format(columns.shape))
        if self.normalization not in NORMALIZATIONS:
            raise InvalidDirectionError("normalization must be one of {}, got {}".format(NORMALIZATIONS,
                                                                                       self.normalization))
        check_finite(columns, "directions")
        columns.setflags(write=False)
        object.__setattr__(self, "columns", columns)

    @property
    def num_directions(self) -> int:
        return self.columns.shape[1]

    @property
    def num_covariates(self) -> int:
        return self.columns.shape[0]

    def leading(self, k: int) -> 'DirectionMatrix':
        if not 0 <= k <= self.num_directions:
            raise InvalidParameterError("cannot take {} of {} directions".format(k, self.num_directions))
        return DirectionMatrix(self.columns[:, :k], self.normalization)

    def is_zero(self) -> bool:
        return not numpy.any(self.columns)

    def support(self) -> numpy.ndarray:
        """Indices of the rows with at least one non-zero entry."""
        return numpy.flatnonzero(numpy.any(self.columns != 0, axis=1))


@dataclass(frozen=True)
class SolverConfig:
    """
    Parameters
    ----------
    max_iterations : ``int``, optional (default = 10000)
        Budget of sweeps, counting both full and active-set sweeps.
    tolerance : ``float``, optional (default = 1e-8)
        A solve has converged once a full sweep changes no coefficient by more than this.
    warm_start : ``DirectionMatrix``, optional
        Starting point; zeros when absent.
    """
    max_iterations: int = 10000
    tolerance: float = 1e-8
    warm_start: Optional[DirectionMatrix] = None

    def __post_init__(self):
        if self.max_iterations < 1:
            raise InvalidParameterError("max_iterations must be at least 1, got {}".format(self.max_iterations))
        if not self.tolerance > 0:
            raise InvalidParameterError("tolerance must be positive, got {}".format(self.tolerance))

    def with_warm_start(self, warm_start: Optional[DirectionMatrix]) -> 'SolverConfig':
        return SolverConfig(self.max_iterations, self.tolerance, warm_start)

    @classmethod
    def from_config(cls, config: ConfigTree) -> 'SolverConfig':
        check_keys(config, ("max_iterations", "tolerance"), cls.__name__)
        with reading(cls.__name__):
            return cls(max_iterations=config.get_int("max_iterations", 10000),
                       tolerance=config.get_float("tolerance", 1e-8))


class CoordinateDescentResult(NamedTuple):
    directions: DirectionMatrix
    objective_history: numpy.ndarray
    num_sweeps: int
    kkt_residual: float


def soft_threshold(values, threshold: float):
    """``sign(z) max(|z| - threshold, 0)``, elementwise."""
    return numpy.sign(values) * numpy.maximum(numpy.abs(values) - threshold, 0.0)


def _objective(coefficients: numpy.ndarray,
               residual: numpy.ndarray,
               correlate: numpy.ndarray,
               penalty: float) -> float:
    # With R = U - G V the quadratic part 1/2 V^T G V - U^T V equals -1/2 <V, U + R>.
    smooth = -0.5 * float(numpy.sum(coefficients * (correlate + residual)))
    return smooth + penalty * float(numpy.abs(coefficients).sum())


def kkt_residual(coefficients: numpy.ndarray, residual: numpy.ndarray, penalty: float) -> float:
    """
    Largest violation of the subgradient conditions: ``|r_j| <= lambda`` where ``v_j = 0`` and
    ``r_j = lambda sign(v_j)`` elsewhere, with ``r = u - Sigma_x v``.
    """
    zero = coefficients == 0
    violation = numpy.where(zero,
                            numpy.maximum(numpy.abs(residual) - penalty, 0.0),
                            numpy.abs(residual - penalty * numpy.sign(coefficients)))
    return float(violation.max(initial=0.0))


def _sweep(gram: numpy.ndarray,
           diagonal: numpy.ndarray,
           coefficients: numpy.ndarray,
           residual: numpy.ndarray,
           coordinates: Sequence[int],
           penalty: float) -> float:
    largest_change = 0.0
    for j in coordinates:
        old = coefficients[j].copy()
        new = soft_threshold(residual[j] + diagonal[j] * old, penalty) / diagonal[j]
        delta = new - old
        if numpy.any(delta):
            coefficients[j] = new
            residual -= numpy.outer(gram[:, j], delta)
            largest_change = max(largest_change, float(numpy.abs(delta).max()))
    return largest_change


def _validate(gram: numpy.ndarray, correlate: numpy.ndarray, penalty: float) -> None:
    check_symmetric(gram, "sigma_x")
    check_same_size(gram.shape[0], correlate.shape[0], "size of sigma_x", "rows of u_hat")
    check_finite(gram, "sigma_x")
    check_finite(correlate, "u_hat")
    if numpy.any(numpy.diag(gram) <= 0):
        raise PreconditionError("sigma_x must have a strictly positive diagonal")
    if not penalty >= 0:
        raise InvalidParameterError("lambda must be non-negative, got {}".format(penalty))


def coordinate_descent(gram: numpy.ndarray,
                       correlate: numpy.ndarray,
                       penalty: float,
                       config: SolverConfig = SolverConfig()) -> CoordinateDescentResult:
    """
    Cyclic coordinate descent with an active set: after each full sweep, only the rows that are
    currently non-zero are cycled until they settle, then another full sweep checks whether the
    active set is complete. A solve returns only when a full sweep moves nothing by more than
    ``config.tolerance`` and the KKT residual is at most ``1e-6``.
    """
    gram = numpy.asarray(gram, dtype=float)
    correlate = numpy.atleast_2d(numpy.asarray(correlate, dtype=float).T).T
    _validate(gram, correlate, penalty)
    p, k = correlate.shape
    diagonal = numpy.diag(gram).copy()
    if config.warm_start is None:
        coefficients = numpy.zeros((p, k))
    else:
        coefficients = numpy.array(config.warm_start.columns, dtype=float, copy=True)
        check_same_size(coefficients.shape[0], p, "rows of warm start", "size of sigma_x")
        check_same_size(coefficients.shape[1], k, "columns of warm start", "columns of u_hat")
    residual = correlate - gram @ coefficients
    history = [_objective(coefficients, residual, correlate, penalty)]
    all_coordinates = range(p)
    active = numpy.arange(p)
    full = True
    sweeps = 0
    while sweeps < config.max_iterations:
        change = _sweep(gram, diagonal, coefficients, residual,
                        all_coordinates if full else active, penalty)
        sweeps += 1
        if full:
            residual = correlate - gram @ coefficients
            history.append(_objective(coefficients, residual, correlate, penalty))
            if change < config.tolerance:
                violation = kkt_residual(coefficients, residual, penalty)
                if violation <= KKT_TOLERANCE:
                    logger.debug("coordinate descent converged after %d sweeps (lambda=%g, KKT %.2e)",
                                 sweeps, penalty, violation)
                    return CoordinateDescentResult(DirectionMatrix(coefficients), numpy.array(history),
                                                   sweeps, violation)
            active = numpy.flatnonzero(numpy.any(coefficients != 0, axis=1))
            full = active.size == 0
        else:
            history.append(_objective(coefficients, residual, correlate, penalty))
            full = change < config.tolerance
    raise ConvergenceError("coordinate descent did not converge in {} sweeps "
                           "(lambda={})".format(config.max_iterations, penalty),
                           last_iterate=DirectionMatrix(coefficients))


def fit_directions(sigma_x: numpy.ndarray,
                   u_hat: numpy.ndarray,
                   penalty: float,
                   config: SolverConfig = SolverConfig()) -> DirectionMatrix:
    """
    The l1-penalized supervised directions for the leading eigenvectors ``u_hat`` of the
    cross moment.
    """
    return coordinate_descent(sigma_x, u_hat, penalty, config).directions


def fit_directions_path(sigma_x: numpy.ndarray,
                        u_hat: numpy.ndarray,
                        penalties: Sequence[float],
                        config: SolverConfig = SolverConfig(),
                        skip_failures: bool = False) -> List[Optional[DirectionMatrix]]:
    """
    Solves for every penalty in ``penalties``, from the largest to the smallest, each solve
    warm-started at the previous solution. The result is aligned with ``penalties``.

    With ``skip_failures`` a penalty whose solve runs out of sweeps gets ``None`` and the next
    one starts from the last iterate; otherwise the ``ConvergenceError`` propagates.
    """
    penalties = numpy.asarray(penalties, dtype=float)
    solutions: List[Optional[DirectionMatrix]] = [None] * penalties.shape[0]
    warm_start = config.warm_start
    for index in numpy.argsort(-penalties, kind="stable"):
        try:
            solution = fit_directions(sigma_x, u_hat, float(penalties[index]), config.with_warm_start(warm_start))
        except ConvergenceError as error:
            if not skip_failures:
                raise
            logger.warning("skipping lambda=%g: %s", penalties[index], error)
            warm_start = error.last_iterate
            continue
        solutions[index] = solution
        warm_start = solution
    return solutions


def fit_directions_unpenalized(sigma_x: numpy.ndarray, u_hat: numpy.ndarray) -> DirectionMatrix:
    """``Sigma_x^{-1} U`` through a Cholesky solve."""
    sigma_x = numpy.asarray(sigma_x, dtype=float)
    u_hat = numpy.atleast_2d(numpy.asarray(u_hat, dtype=float).T).T
    check_symmetric(sigma_x, "sigma_x")
    check_same_size(sigma_x.shape[0], u_hat.shape[0], "size of sigma_x", "rows of u_hat")
    try:
        factor = linalg.cho_factor(sigma_x, lower=True)
    except linalg.LinAlgError:
        raise NumericalError("sigma_x is singular; repair it before an unpenalized fit")
    return DirectionMatrix(linalg.cho_solve(factor, u_hat))


def _whitened_eigenvectors(sigma_x: numpy.ndarray, sigma_xy: numpy.ndarray, k: int) -> numpy.ndarray:
    inverse_root = matrix_power(sigma_x, -0.5)
    whitened = inverse_root @ sigma_xy @ inverse_root
    return top_k_eigen((whitened + whitened.T) / 2, k).vectors


def spcra_correlate(sigma_x: numpy.ndarray, sigma_xy: numpy.ndarray, k: int) -> numpy.ndarray:
    """
    ``Sigma_x^{1/2} S`` where ``S`` holds the ``k`` leading eigenvectors of the whitened cross
    moment ``Sigma_x^{-1/2} Sigma_xy Sigma_x^{-1/2}``.
    """
    check_symmetric(sigma_xy, "sigma_xy")
    check_same_size(sigma_x.shape[0], sigma_xy.shape[0], "size of sigma_x", "size of sigma_xy")
    return matrix_power(sigma_x, 0.5) @ _whitened_eigenvectors(sigma_x, sigma_xy, k)


def fit_directions_spcra(sigma_x: numpy.ndarray,
                         sigma_xy: numpy.ndarray,
                         k: int,
                         penalty: float,
                         config: SolverConfig = SolverConfig()) -> DirectionMatrix:
    """
    The alternative estimator: eigenvectors ``s_k`` of the whitened cross moment, then an
    l1-penalized regression of ``s_k`` on ``Sigma_x^{1/2}``.
    """
    return fit_directions(sigma_x, spcra_correlate(sigma_x, sigma_xy, k), penalty, config)


def sequential_generalized_eigen(sigma_xy: numpy.ndarray, sigma_x: numpy.ndarray, k: int) -> DirectionMatrix:
    """
    The ``k`` leading solutions of ``max w^T Sigma_xy w`` subject to ``w^T Sigma_x w = 1`` and
    ``Sigma_x``-orthogonality to the earlier solutions, as ``Sigma_x^{-1/2} q`` for the leading
    eigenvectors ``q`` of the whitened cross moment.
    """
    sigma_x = numpy.asarray(sigma_x, dtype=float)
    check_symmetric(sigma_x, "sigma_x")
    check_symmetric(sigma_xy, "sigma_xy")
    check_same_size(sigma_x.shape[0], sigma_xy.shape[0], "size of sigma_x", "size of sigma_xy")
    try:
        linalg.cholesky(sigma_x, lower=True)
    except linalg.LinAlgError:
        raise PreconditionError("sigma_x must be positive definite")
    directions = matrix_power(sigma_x, -0.5) @ _whitened_eigenvectors(sigma_x, sigma_xy, k)
    gram = directions.T @ sigma_x @ directions
    deviation = float(numpy.abs(gram - numpy.eye(k)).max(initial=0.0))
    if deviation > UNIT_TOLERANCE:
        raise NumericalError("generalized eigenvectors are not sigma_x-orthonormal "
                             "(deviation {:.2e})".format(deviation))
    return DirectionMatrix(directions, normalization="sigma_x_unit")


def rayleigh_quotient(w: numpy.ndarray, sigma_xy: numpy.ndarray, sigma_x: numpy.ndarray) -> float:
    w = numpy.asarray(w, dtype=float).ravel()
    check_same_size(w.shape[0], sigma_x.shape[0], "length of w", "size of sigma_x")
    denominator = float(w @ sigma_x @ w)
    if not denominator > 0:
        raise InvalidDirectionError("w^T sigma_x w must be positive, got {}".format(denominator))
    return float(w @ sigma_xy @ w) / denominator
