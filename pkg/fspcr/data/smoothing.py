"""
Curve-by-curve cubic smoothing splines for responses observed with measurement error.

For a curve ``y`` on grid points ``t_1 < ... < t_L`` the fitted values ``f`` minimize

    sum_l (y_l - f_l)^2 + lambda int f''(t)^2 dt

over natural cubic splines with knots at the grid points. With the usual banded matrices ``Q``
(``L x (L-2)``) and ``R`` (``(L-2) x (L-2)``), ``(R + lambda Q^T Q) g = Q^T y`` and
``f = y - lambda Q g``; the effective degrees of freedom use only the central five bands of
``(R + lambda Q^T Q)^{-1}``, which come from its banded Cholesky factor.
"""
from typing import Dict, List, NamedTuple, Optional, Tuple
from dataclasses import dataclass
import logging

import numpy
from scipy import linalg

from fspcr.common.checks import (EmptyDatasetError, InsufficientPointsError, InvalidParameterError,
                                 NumericalError, check_same_size, check_finite)
from fspcr.data.dataset import FunctionalDataset, Grid

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name

MIN_POINTS = 4
NUM_CANDIDATES = 50
CANDIDATE_RANGE = (1e-9, 1e3)


@dataclass(frozen=True, eq=False)
class SplineFit:
    """
    ``gcv`` is infinite when the fit interpolates (``edf == L``), where the criterion is
    undefined.
    """
    lambda_s: float
    fitted: numpy.ndarray
    gcv: float
    edf: float


class _SystemBands(NamedTuple):
    matrix: numpy.ndarray    # upper banded storage of R + lambda Q^T Q
    edf: float


class SmoothingSpline:
    """
    The banded matrices for one grid. Factorizations are cached per smoothing parameter, so
    many curves on the same grid share the work.

    Parameters
    ----------
    grid : ``Grid``
        Needs at least 4 points.
    """
    def __init__(self, grid: Grid) -> None:
        if len(grid) < MIN_POINTS:
            raise InsufficientPointsError("a cubic smoothing spline needs at least {} grid points, "
                                          "got {}".format(MIN_POINTS, len(grid)))
        self.grid = grid
        spacing = numpy.diff(grid.points)
        # Column i of Q has (a_i, b_i, c_i) in rows i, i + 1, i + 2.
        self._q_lower = 1.0 / spacing[:-1]
        self._q_upper = 1.0 / spacing[1:]
        self._q_middle = -self._q_lower - self._q_upper
        self._r_bands = [(spacing[:-1] + spacing[1:]) / 3, spacing[1:-1] / 6, numpy.zeros(len(grid) - 4)]
        a, b, c = self._q_lower, self._q_middle, self._q_upper
        self._qtq_bands = [a ** 2 + b ** 2 + c ** 2,
                           b[:-1] * a[1:] + c[:-1] * b[1:],
                           c[:-2] * a[2:]]
        self._cache: Dict[float, _SystemBands] = {}

    @property
    def size(self) -> int:
        return len(self.grid) - 2

    def _q_transpose_times(self, values: numpy.ndarray) -> numpy.ndarray:
        return (self._q_lower[:, numpy.newaxis] * values[:-2]
                + self._q_middle[:, numpy.newaxis] * values[1:-1]
                + self._q_upper[:, numpy.newaxis] * values[2:])

    def _q_times(self, coefficients: numpy.ndarray) -> numpy.ndarray:
        result = numpy.zeros((coefficients.shape[0] + 2, coefficients.shape[1]))
        result[:-2] += self._q_lower[:, numpy.newaxis] * coefficients
        result[1:-1] += self._q_middle[:, numpy.newaxis] * coefficients
        result[2:] += self._q_upper[:, numpy.newaxis] * coefficients
        return result

    def _banded(self, lambda_s: float) -> numpy.ndarray:
        m = self.size
        upper = min(2, m - 1)
        banded = numpy.zeros((upper + 1, m))
        for offset in range(upper + 1):
            band = self._r_bands[offset] + lambda_s * self._qtq_bands[offset]
            banded[upper - offset, offset:] = band
        return banded

    def _inverse_bands(self, banded: numpy.ndarray) -> List[numpy.ndarray]:
        """
        The diagonal and first two super-diagonals of the inverse, by back-recursion on the
        unit upper triangular factor of ``A = U^T D U``.
        """
        upper = banded.shape[0] - 1
        m = banded.shape[1]
        try:
            factor = linalg.cholesky_banded(banded, lower=False)
        except linalg.LinAlgError as error:
            raise NumericalError("smoothing spline system is singular: {}".format(error))
        root = factor[upper]
        pivots = root ** 2
        first = numpy.zeros(m)
        second = numpy.zeros(m)
        if upper >= 1:
            first[:-1] = factor[upper - 1, 1:] / root[:-1]
        if upper >= 2:
            second[:-2] = factor[upper - 2, 2:] / root[:-2]
        diagonal = numpy.zeros(m + 2)
        off_1 = numpy.zeros(m + 1)
        off_2 = numpy.zeros(m)
        for i in range(m - 1, -1, -1):
            off_2[i] = -first[i] * off_1[i + 1] - second[i] * diagonal[i + 2]
            off_1[i] = -first[i] * diagonal[i + 1] - second[i] * off_1[i + 1]
            diagonal[i] = 1.0 / pivots[i] - first[i] * off_1[i] - second[i] * off_2[i]
        return [diagonal[:m], off_1[:m - 1], off_2[:m - 2]]

    def _system(self, lambda_s: float) -> _SystemBands:
        if lambda_s not in self._cache:
            banded = self._banded(lambda_s)
            inverse = self._inverse_bands(banded)
            trace = (inverse[0] @ self._qtq_bands[0]
                     + 2 * inverse[1] @ self._qtq_bands[1]
                     + 2 * inverse[2] @ self._qtq_bands[2])
            self._cache[lambda_s] = _SystemBands(banded, len(self.grid) - lambda_s * float(trace))
        return self._cache[lambda_s]

    def fit(self, values: numpy.ndarray, lambda_s: float) -> Tuple[numpy.ndarray, numpy.ndarray, float]:
        """
        Smooths every column of ``values`` (shape ``(L, n)``) with one smoothing parameter.

        Returns
        -------
        The fitted values, the residual sum of squares of each column and the effective degrees
        of freedom.
        """
        if not lambda_s >= 0:
            raise InvalidParameterError("lambda_s must be non-negative, got {}".format(lambda_s))
        system = self._system(float(lambda_s))
        try:
            coefficients = linalg.solveh_banded(system.matrix, self._q_transpose_times(values), lower=False)
        except linalg.LinAlgError as error:
            raise NumericalError("smoothing spline system is singular: {}".format(error))
        fitted = values - lambda_s * self._q_times(coefficients)
        rss = numpy.sum((values - fitted) ** 2, axis=0)
        return fitted, rss, system.edf

    def gcv(self, rss: numpy.ndarray, edf: float) -> numpy.ndarray:
        num_points = len(self.grid)
        denominator = (num_points - edf) ** 2
        if denominator <= 0 or not numpy.isfinite(denominator):
            return numpy.full_like(rss, numpy.inf)
        return num_points * rss / denominator

    def candidates(self) -> numpy.ndarray:
        low, high = CANDIDATE_RANGE
        return numpy.logspace(numpy.log10(low), numpy.log10(high), NUM_CANDIDATES) * self.grid.span ** 3

    def smooth(self, values: numpy.ndarray, lambda_s: Optional[float] = None) -> List[SplineFit]:
        """
        Smooths each column of ``values``. Without ``lambda_s`` every column gets the candidate
        with the smallest GCV score, ties going to the smaller parameter.
        """
        values = numpy.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[:, numpy.newaxis]
        check_same_size(values.shape[0], len(self.grid), "curve length", "grid length")
        check_finite(values, "curve values")
        if lambda_s is not None:
            fitted, rss, edf = self.fit(values, lambda_s)
            scores = self.gcv(rss, edf)
            return [SplineFit(float(lambda_s), fitted[:, i], float(scores[i]), edf) for i in range(values.shape[1])]
        num_curves = values.shape[1]
        best_scores = numpy.full(num_curves, numpy.inf)
        best_fitted = numpy.array(values, copy=True)
        best_lambdas = numpy.zeros(num_curves)
        best_edf = numpy.full(num_curves, float(len(self.grid)))
        for candidate in self.candidates():
            fitted, rss, edf = self.fit(values, candidate)
            scores = self.gcv(rss, edf)
            better = scores < best_scores
            best_scores[better] = scores[better]
            best_fitted[:, better] = fitted[:, better]
            best_lambdas[better] = candidate
            best_edf[better] = edf
        unselected = numpy.isinf(best_scores)
        if numpy.any(unselected):
            # Every candidate interpolated these curves; keep the smallest parameter's fit.
            smallest = float(self.candidates()[0])
            fitted, rss, edf = self.fit(values[:, unselected], smallest)
            best_fitted[:, unselected] = fitted
            best_lambdas[unselected] = smallest
            best_edf[unselected] = edf
        return [SplineFit(float(best_lambdas[i]), best_fitted[:, i], float(best_scores[i]), float(best_edf[i]))
                for i in range(num_curves)]


def smooth_curve(values: numpy.ndarray, grid: Grid, lambda_s: Optional[float] = None) -> SplineFit:
    values = numpy.asarray(values, dtype=float)
    if values.ndim != 1:
        raise InvalidParameterError("smooth_curve takes a single curve, got shape {}".format(values.shape))
    return SmoothingSpline(grid).smooth(values, lambda_s)[0]


def smooth_dataset(dataset: FunctionalDataset, lambda_s: Optional[float] = None) -> FunctionalDataset:
    """
    Replaces every response curve by its smoothing spline fit. Works on the raw curves, so the
    result is uncentered.
    """
    if dataset.num_samples == 0:
        raise EmptyDatasetError("cannot smooth a dataset with no samples")
    raw = dataset.uncentered()
    fits = SmoothingSpline(raw.grid).smooth(raw.Y.T, lambda_s)
    smoothed = numpy.vstack([fit.fitted for fit in fits])
    lambdas = numpy.array([fit.lambda_s for fit in fits])
    logger.info("smoothed %d curves on %d grid points (median lambda %.3g, median edf %.1f)",
                len(fits), len(raw.grid), float(numpy.median(lambdas)),
                float(numpy.median([fit.edf for fit in fits])))
    return raw.with_responses(smoothed)
