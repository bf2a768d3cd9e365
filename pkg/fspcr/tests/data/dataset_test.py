import numpy
import pytest

from fspcr.common.checks import DimensionError, EmptyDatasetError, InvalidGridError
from fspcr.data.dataset import FunctionalDataset, Grid, center, center_with, integrate_curve, trapezoid_weights


class TestTrapezoidWeights:
    @pytest.mark.parametrize("points, expected", [
            ([0.0, 0.5, 1.0], [0.25, 0.5, 0.25]),
            ([0.0, 1.0], [0.5, 0.5]),
            ([0.0, 0.1, 1.0], [0.05, 0.5, 0.45]),
    ])
    def test_examples(self, points, expected):
        numpy.testing.assert_allclose(trapezoid_weights(numpy.array(points)), expected, rtol=1e-12)

    def test_weights_sum_to_span(self, rng):
        points = numpy.sort(rng.uniform(0, 3, size=17))
        assert abs(trapezoid_weights(points).sum() - (points[-1] - points[0])) <= 1e-12 * points[-1]

    @pytest.mark.parametrize("points", [[0.0, 0.0, 1.0], [1.0, 0.5], [0.0]])
    def test_invalid_grids(self, points):
        with pytest.raises(InvalidGridError):
            trapezoid_weights(numpy.array(points))


class TestIntegrateCurve:
    def test_constant_and_linear_are_exact(self):
        grid = Grid.uniform(101)
        assert integrate_curve(numpy.ones(101), grid) == pytest.approx(1.0, rel=1e-12)
        assert integrate_curve(grid.points, grid) == pytest.approx(0.5, rel=1e-12)

    def test_cosine_vanishes(self):
        grid = Grid.uniform(1001)
        assert abs(integrate_curve(numpy.cos(2 * numpy.pi * grid.points), grid)) < 1e-5

    def test_linearity(self, rng):
        grid = Grid(numpy.sort(rng.uniform(0, 1, size=9)))
        f, g = rng.standard_normal(9), rng.standard_normal(9)
        combined = integrate_curve(2.0 * f - 3.0 * g, grid)
        expected = 2.0 * integrate_curve(f, grid) - 3.0 * integrate_curve(g, grid)
        assert combined == pytest.approx(expected, rel=1e-12, abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            integrate_curve(numpy.ones(4), Grid.uniform(5))


class TestCenter:
    def test_examples(self):
        grid = Grid.uniform(3)
        dataset = FunctionalDataset(numpy.array([[1.0, 5.0], [3.0, 5.0]]),
                                    numpy.array([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]]), grid)
        centered, x_means, y_means = center(dataset)
        numpy.testing.assert_array_equal(centered.X, [[-1.0, 0.0], [1.0, 0.0]])
        numpy.testing.assert_array_equal(x_means, [2.0, 5.0])
        numpy.testing.assert_array_equal(centered.Y, numpy.zeros((2, 3)))
        numpy.testing.assert_array_equal(y_means, [1.0, 2.0, 3.0])
        assert centered.centered

    def test_idempotent(self, centered_small):
        again, x_means, _ = center(centered_small)
        assert again is centered_small
        numpy.testing.assert_array_equal(x_means, centered_small.x_means)

    def test_column_means_vanish(self, centered_small):
        assert numpy.abs(centered_small.X.mean(axis=0)).max() < 1e-10
        assert numpy.abs(centered_small.Y.mean(axis=0)).max() < 1e-10

    def test_empty(self):
        empty = FunctionalDataset(numpy.zeros((0, 2)), numpy.zeros((0, 3)), Grid.uniform(3))
        with pytest.raises(EmptyDatasetError):
            center(empty)

    def test_subset_returns_raw_rows(self, small_setting1, centered_small):
        raw, _ = small_setting1
        numpy.testing.assert_allclose(centered_small.subset(numpy.arange(5)).X, raw.X[:5], atol=1e-12)

    def test_center_with_external_means(self, small_setting1):
        raw, _ = small_setting1
        train, _, _ = center(raw.subset(numpy.arange(40)))
        test = center_with(raw.subset(numpy.arange(40, 80)), train.x_means, train.y_means)
        numpy.testing.assert_allclose(test.X + train.x_means, raw.X[40:], atol=1e-12)

    def test_rows_must_match(self):
        with pytest.raises(DimensionError):
            FunctionalDataset(numpy.zeros((2, 2)), numpy.zeros((3, 3)), Grid.uniform(3))
