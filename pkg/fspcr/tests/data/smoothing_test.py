import numpy
import pytest

from fspcr.common.checks import InsufficientPointsError
from fspcr.data.dataset import FunctionalDataset, Grid
from fspcr.data.smoothing import SmoothingSpline, smooth_curve, smooth_dataset


class TestSmoothingSpline:
    def test_needs_four_points(self):
        with pytest.raises(InsufficientPointsError):
            SmoothingSpline(Grid.uniform(3))

    def test_linear_curves_are_reproduced(self):
        grid = Grid(numpy.array([0.0, 0.1, 0.35, 0.5, 0.8, 1.0]))
        line = 2.0 - 3.0 * grid.points
        for lambda_s in (1e-6, 1.0, 1e6):
            fit = smooth_curve(line, grid, lambda_s)
            numpy.testing.assert_allclose(fit.fitted, line, atol=1e-9)

    def test_large_penalty_gives_the_least_squares_line(self, rng):
        grid = Grid.uniform(20)
        values = rng.standard_normal(20)
        slope, intercept = numpy.polyfit(grid.points, values, 1)
        fit = smooth_curve(values, grid, 1e10)
        numpy.testing.assert_allclose(fit.fitted, intercept + slope * grid.points, atol=1e-5)
        assert fit.edf == pytest.approx(2.0, abs=1e-3)

    def test_small_penalty_nearly_interpolates(self, rng):
        grid = Grid.uniform(15)
        values = rng.standard_normal(15)
        fit = smooth_curve(values, grid, 1e-14)
        numpy.testing.assert_allclose(fit.fitted, values, atol=1e-6)

    def test_edf_matches_the_dense_hat_matrix(self, rng):
        grid = Grid(numpy.sort(rng.uniform(0, 1, size=9)))
        spline = SmoothingSpline(grid)
        lambda_s = 0.01
        hat = numpy.column_stack([spline.fit(column[:, numpy.newaxis], lambda_s)[0][:, 0]
                                  for column in numpy.eye(9)])
        _, _, edf = spline.fit(numpy.eye(9), lambda_s)
        assert edf == pytest.approx(numpy.trace(hat), rel=1e-8)

    def test_gcv_selection_reduces_error(self):
        grid = Grid.uniform(200)
        truth = numpy.sin(2 * numpy.pi * grid.points)
        noisy = truth + 0.3 * numpy.random.default_rng(0).standard_normal(200)
        fit = smooth_curve(noisy, grid)
        assert numpy.mean((fit.fitted - truth) ** 2) < 0.5 * numpy.mean((noisy - truth) ** 2)
        assert 2.0 < fit.edf < 200.0
        assert numpy.isfinite(fit.gcv)


class TestSmoothDataset:
    def test_returns_uncentered_smoothed_curves(self, rng):
        grid = Grid.uniform(30)
        X = rng.standard_normal((6, 3))
        Y = numpy.outer(X[:, 0], numpy.cos(numpy.pi * grid.points)) + 0.1 * rng.standard_normal((6, 30))
        smoothed = smooth_dataset(FunctionalDataset(X, Y, grid))
        assert not smoothed.centered
        assert smoothed.Y.shape == Y.shape
        numpy.testing.assert_array_equal(smoothed.X, X)
