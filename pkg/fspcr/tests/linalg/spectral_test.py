import numpy
import pytest
from scipy import linalg

from fspcr.common.checks import DimensionError, InvalidParameterError, NotPsdError
from fspcr.data.dataset import FunctionalDataset, Grid, center
from fspcr.data.simulation import Setting1Config, ar_covariance, setting1_directions, setting1_gamma
from fspcr.linalg.spectral import cross_moment, fix_signs, matrix_power, population_cross_moment, top_k_eigen
from fspcr.tests.conftest import random_spd


class TestTopKEigen:
    def test_diagonal_matrix(self):
        system = top_k_eigen(numpy.diag([1.0, 4.0, 2.0]), 2)
        numpy.testing.assert_allclose(system.values, [4.0, 2.0])
        numpy.testing.assert_allclose(numpy.abs(system.vectors), [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], atol=1e-12)
        assert system.rank == 2

    def test_k_out_of_range(self):
        with pytest.raises(InvalidParameterError):
            top_k_eigen(numpy.eye(3), 4)

    def test_gram_route_matches_dense_route(self, rng):
        grid = Grid.uniform(4)
        dataset, _, _ = center(FunctionalDataset(rng.standard_normal((5, 30)), rng.standard_normal((5, 4)), grid))
        moment = cross_moment(dataset)
        through_gram = top_k_eigen(moment, 3)
        dense = top_k_eigen(moment.matrix, 3)
        numpy.testing.assert_allclose(through_gram.values, dense.values, rtol=1e-8, atol=1e-12)
        assert numpy.max(linalg.subspace_angles(through_gram.vectors, dense.vectors)) < 1e-6

    def test_rank_deficiency_pads_with_zeros(self, rng):
        vector = rng.standard_normal((6, 1))
        system = top_k_eigen(vector @ vector.T, 3)
        assert system.rank == 1
        numpy.testing.assert_array_equal(system.values[1:], [0.0, 0.0])
        numpy.testing.assert_allclose(system.vectors.T @ system.vectors, numpy.eye(3), atol=1e-10)


class TestPopulationCrossMoment:
    def test_range_is_spanned_by_the_covariance_times_the_true_directions(self):
        config = Setting1Config(n=2, p=10, L=101)
        sigma_x = ar_covariance(config.p, config.rho)
        directions = setting1_directions(config.p).columns
        moment = population_cross_moment(sigma_x, directions @ setting1_gamma(config.grid.points), config.grid)
        system = top_k_eigen(moment, 4)
        assert system.values[3] == pytest.approx(0.0, abs=1e-8 * system.values[0])
        assert numpy.max(linalg.subspace_angles(system.vectors[:, :3], sigma_x @ directions)) < 1e-6

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            population_cross_moment(numpy.eye(3), numpy.ones((4, 5)), Grid.uniform(5))


class TestMatrixPower:
    def test_inverse_square_root(self, rng):
        sigma = random_spd(rng, 5)
        root = matrix_power(sigma, -0.5)
        numpy.testing.assert_allclose(root @ sigma @ root, numpy.eye(5), atol=1e-10)

    def test_square_root_squares_back(self, rng):
        sigma = random_spd(rng, 4)
        root = matrix_power(sigma, 0.5)
        numpy.testing.assert_allclose(root @ root, sigma, atol=1e-10)

    def test_indefinite(self):
        with pytest.raises(NotPsdError):
            matrix_power(numpy.array([[1.0, 2.0], [2.0, 1.0]]), 0.5)


class TestFixSigns:
    def test_largest_entry_positive(self):
        fixed = fix_signs(numpy.array([[0.1, 0.5], [-0.9, -0.2]]))
        numpy.testing.assert_array_equal(fixed, [[-0.1, 0.5], [0.9, -0.2]])
