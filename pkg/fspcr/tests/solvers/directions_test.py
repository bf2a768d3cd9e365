import numpy
import pytest
from scipy import linalg, optimize

from fspcr.common.checks import ConvergenceError, InvalidDirectionError, PreconditionError
from fspcr.linalg.spectral import top_k_eigen
from fspcr.solvers.directions import (DirectionMatrix, SolverConfig, coordinate_descent, fit_directions,
                                      fit_directions_path, fit_directions_spcra, fit_directions_unpenalized,
                                      kkt_residual, rayleigh_quotient, sequential_generalized_eigen,
                                      soft_threshold, spcra_correlate)
from fspcr.tests.conftest import random_spd

TIGHT = SolverConfig(max_iterations=100000, tolerance=1e-12)
EIGEN_GRID = [(p, k) for p in (10, 20, 30) for k in (1, 2, 3)]


def _low_rank_cross_moment(rng, p, k):
    factor = rng.standard_normal((p, k))
    return factor @ factor.T


def _qp_oracle(sigma, u, penalty):
    """Minimizes the penalized quadratic with v = a - b, a, b >= 0."""
    p = u.shape[0]

    def objective(z):
        v = z[:p] - z[p:]
        gradient = sigma @ v - u
        value = 0.5 * v @ sigma @ v - u @ v + penalty * z.sum()
        return value, numpy.concatenate([gradient + penalty, -gradient + penalty])

    result = optimize.minimize(objective, numpy.zeros(2 * p), jac=True, method="L-BFGS-B",
                               bounds=[(0, None)] * (2 * p),
                               options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 10000})
    return result.x[:p] - result.x[p:]


def _whitened_qp_oracle(root, s, penalty):
    """Minimizes ``1/2 |s - root v|^2 + penalty |v|_1`` with v = a - b, a, b >= 0."""
    p = s.shape[0]

    def objective(z):
        v = z[:p] - z[p:]
        misfit = root @ v - s
        gradient = root.T @ misfit
        value = 0.5 * misfit @ misfit + penalty * z.sum()
        return value, numpy.concatenate([gradient + penalty, -gradient + penalty])

    result = optimize.minimize(objective, numpy.zeros(2 * p), jac=True, method="L-BFGS-B",
                               bounds=[(0, None)] * (2 * p),
                               options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 10000})
    return result.x[:p] - result.x[p:]


class TestSoftThreshold:
    def test_values(self):
        numpy.testing.assert_array_equal(soft_threshold(numpy.array([-3.0, -0.5, 0.0, 0.5, 3.0]), 1.0),
                                         [-2.0, 0.0, 0.0, 0.0, 2.0])


class TestCoordinateDescent:
    def test_zero_penalty_solves_the_linear_system(self, rng):
        sigma = random_spd(rng, 6)
        u = rng.standard_normal((6, 2))
        directions = fit_directions(sigma, u, 0.0)
        numpy.testing.assert_allclose(directions.columns, numpy.linalg.solve(sigma, u), atol=1e-6)

    def test_large_penalty_gives_zero(self, rng):
        sigma = random_spd(rng, 5)
        u = rng.standard_normal((5, 2))
        assert fit_directions(sigma, u, float(numpy.abs(u).max())).is_zero()

    def test_identity_gram_is_soft_thresholding(self, rng):
        u = rng.standard_normal((7, 3))
        directions = fit_directions(numpy.eye(7), u, 0.4)
        numpy.testing.assert_allclose(directions.columns, soft_threshold(u, 0.4), atol=1e-12)

    def test_kkt_and_monotone_objective(self, rng):
        sigma = random_spd(rng, 10)
        u = rng.standard_normal((10, 3))
        result = coordinate_descent(sigma, u, 0.2)
        assert result.kkt_residual <= 1e-6
        residual = u - sigma @ result.directions.columns
        assert kkt_residual(result.directions.columns, residual, 0.2) <= 1e-6
        assert numpy.all(numpy.diff(result.objective_history) <= 1e-12)

    @pytest.mark.parametrize("instance", range(20))
    def test_matches_the_qp_oracle(self, instance):
        rng = numpy.random.default_rng(100 + instance)
        p, k = 6 + instance % 5, 1 + instance % 3
        sigma = random_spd(rng, p)
        u = rng.standard_normal((p, k))
        penalty = 0.3 * float(numpy.abs(u).max())
        result = coordinate_descent(sigma, u, penalty, TIGHT)
        assert result.kkt_residual <= 1e-6
        for column in range(k):
            numpy.testing.assert_allclose(result.directions.columns[:, column],
                                          _qp_oracle(sigma, u[:, column], penalty), atol=1e-6)

    def test_columns_are_separable(self, rng):
        sigma = random_spd(rng, 8)
        u = rng.standard_normal((8, 3))
        joint = fit_directions(sigma, u, 0.1)
        for k in range(3):
            single = fit_directions(sigma, u[:, k], 0.1)
            numpy.testing.assert_allclose(joint.columns[:, k], single.columns[:, 0], atol=1e-7)

    def test_budget_exhaustion_keeps_the_last_iterate(self, rng):
        sigma = random_spd(rng, 8)
        u = rng.standard_normal((8, 2))
        with pytest.raises(ConvergenceError) as error:
            fit_directions(sigma, u, 0.01, SolverConfig(max_iterations=1))
        assert isinstance(error.value.last_iterate, DirectionMatrix)

    def test_non_positive_diagonal(self):
        with pytest.raises(PreconditionError):
            fit_directions(numpy.diag([1.0, 0.0]), numpy.ones(2), 0.1)


class TestPath:
    def test_path_matches_independent_solves(self, rng):
        sigma = random_spd(rng, 7)
        u = rng.standard_normal((7, 2))
        penalties = [0.05, 0.5, 0.2]
        path = fit_directions_path(sigma, u, penalties)
        for penalty, solution in zip(penalties, path):
            numpy.testing.assert_allclose(solution.columns, fit_directions(sigma, u, penalty).columns, atol=1e-6)

    def test_skipped_failures_are_none(self, rng):
        sigma = random_spd(rng, 7)
        u = rng.standard_normal((7, 2))
        path = fit_directions_path(sigma, u, [0.01, 0.02], SolverConfig(max_iterations=1), skip_failures=True)
        assert path == [None, None]


class TestGeneralizedEigen:
    @pytest.mark.parametrize("instance", range(50))
    def test_zero_penalty_spans_the_generalized_eigenvectors(self, instance):
        p, k = EIGEN_GRID[instance % len(EIGEN_GRID)]
        rng = numpy.random.default_rng(7000 + instance)
        sigma_x = random_spd(rng, p)
        sigma_xy = _low_rank_cross_moment(rng, p, k)
        u_hat = top_k_eigen(sigma_xy, k).vectors
        penalized = fit_directions(sigma_x, u_hat, 0.0, TIGHT)
        oracle = sequential_generalized_eigen(sigma_xy, sigma_x, k)
        assert numpy.max(linalg.subspace_angles(penalized.columns, oracle.columns)) <= 1e-6

    def test_directions_are_sigma_x_orthonormal(self, rng):
        sigma_x = random_spd(rng, 8)
        oracle = sequential_generalized_eigen(_low_rank_cross_moment(rng, 8, 2), sigma_x, 2)
        numpy.testing.assert_allclose(oracle.columns.T @ sigma_x @ oracle.columns, numpy.eye(2), atol=1e-8)
        assert oracle.normalization == "sigma_x_unit"

    def test_rayleigh_quotients_are_decreasing(self, rng):
        sigma_x = random_spd(rng, 8)
        sigma_xy = _low_rank_cross_moment(rng, 8, 3)
        oracle = sequential_generalized_eigen(sigma_xy, sigma_x, 3)
        quotients = [rayleigh_quotient(oracle.columns[:, k], sigma_xy, sigma_x) for k in range(3)]
        assert quotients[0] >= quotients[1] >= quotients[2] > 0

    def test_singular_sigma_x(self, rng):
        with pytest.raises(PreconditionError):
            sequential_generalized_eigen(numpy.eye(3), numpy.diag([1.0, 1.0, 0.0]), 1)

    def test_zero_direction_has_no_quotient(self):
        with pytest.raises(InvalidDirectionError):
            rayleigh_quotient(numpy.zeros(3), numpy.eye(3), numpy.eye(3))


class TestOtherEstimators:
    def test_unpenalized_is_the_inverse(self, rng):
        sigma = random_spd(rng, 5)
        u = rng.standard_normal((5, 2))
        numpy.testing.assert_allclose(fit_directions_unpenalized(sigma, u).columns, numpy.linalg.solve(sigma, u),
                                      atol=1e-10)

    def test_spcra_with_zero_penalty_recovers_the_whitened_directions(self, rng):
        sigma_x = random_spd(rng, 6)
        sigma_xy = _low_rank_cross_moment(rng, 6, 2)
        directions = fit_directions_spcra(sigma_x, sigma_xy, 2, 0.0,
                                          SolverConfig(max_iterations=100000, tolerance=1e-12))
        oracle = sequential_generalized_eigen(sigma_xy, sigma_x, 2)
        assert numpy.max(linalg.subspace_angles(directions.columns, oracle.columns)) <= 1e-6

    @pytest.mark.parametrize("instance", range(20))
    def test_spcra_matches_the_qp_oracle(self, instance):
        rng = numpy.random.default_rng(300 + instance)
        p, k = 6 + instance % 5, 1 + instance % 3
        sigma_x = random_spd(rng, p)
        sigma_xy = _low_rank_cross_moment(rng, p, k)
        values, vectors = linalg.eigh(sigma_x)
        root = vectors @ numpy.diag(numpy.sqrt(values)) @ vectors.T
        inverse_root = vectors @ numpy.diag(values ** -0.5) @ vectors.T
        _, whitened_vectors = linalg.eigh(inverse_root @ sigma_xy @ inverse_root)
        leading = whitened_vectors[:, ::-1][:, :k]
        penalty = 0.3 * float(numpy.abs(root @ leading).max())

        directions = fit_directions_spcra(sigma_x, sigma_xy, k, penalty, TIGHT)
        for column in range(k):
            oracle = _whitened_qp_oracle(root, leading[:, column], penalty)
            estimate = directions.columns[:, column]
            # Eigenvectors are defined up to sign, and so is each column of the solution.
            sign = 1.0 if estimate @ oracle >= 0 else -1.0
            numpy.testing.assert_allclose(sign * estimate, oracle, atol=1e-6)

    @pytest.mark.parametrize("instance", range(20))
    def test_spcra_satisfies_the_kkt_conditions(self, instance):
        rng = numpy.random.default_rng(400 + instance)
        p, k = 8 + instance % 5, 1 + instance % 3
        sigma_x = random_spd(rng, p)
        sigma_xy = _low_rank_cross_moment(rng, p, k)
        correlate = spcra_correlate(sigma_x, sigma_xy, k)
        penalty = 0.2 * float(numpy.abs(correlate).max())
        directions = fit_directions_spcra(sigma_x, sigma_xy, k, penalty)
        residual = correlate - sigma_x @ directions.columns
        assert kkt_residual(directions.columns, residual, penalty) <= 1e-6
        assert not directions.is_zero()
