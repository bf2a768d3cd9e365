import numpy
import pytest

from fspcr.common.checks import ConfigurationError, InvalidParameterError
from fspcr.common.config import as_config
from fspcr.data.simulation import (MeasurementErrorConfig, Setting1Config, Setting2Config, ar_covariance, generate,
                                   generate_measurement_error, generate_setting1, generate_setting2,
                                   setting_config)


class TestArCovariance:
    def test_entries(self):
        numpy.testing.assert_allclose(ar_covariance(3, 0.5), [[1.0, 0.5, 0.25], [0.5, 1.0, 0.5], [0.25, 0.5, 1.0]])

    def test_rho_out_of_range(self):
        with pytest.raises(InvalidParameterError):
            ar_covariance(3, 1.0)


class TestSettings:
    def test_setting1_shapes_and_truth(self):
        dataset, truth = generate_setting1(Setting1Config(n=20, p=10, L=15, seed=1))
        assert dataset.X.shape == (20, 10)
        assert dataset.Y.shape == (20, 15)
        assert truth.true_dimension == 3
        numpy.testing.assert_array_equal(truth.v_star.support(), [0, 1, 2, 3, 8, 9])
        numpy.testing.assert_allclose(truth.beta, truth.v_star.columns @ truth.gamma)

    def test_noise_free_responses_are_exact(self):
        dataset, truth = generate_setting1(Setting1Config(n=10, p=8, L=11, seed=2, noise=False))
        numpy.testing.assert_allclose(dataset.Y, dataset.X @ truth.beta, atol=1e-12)

    def test_setting2_has_no_directions(self):
        dataset, truth = generate_setting2(Setting2Config(n=10, p=8, L=11, seed=2))
        assert truth.v_star is None
        assert truth.beta.shape == (8, 11)
        assert dataset.num_samples == 10

    def test_same_seed_same_data(self):
        first, _ = generate("1", Setting1Config(n=15, p=7, L=9, seed=5))
        second, _ = generate("1", Setting1Config(n=15, p=7, L=9, seed=5))
        numpy.testing.assert_array_equal(first.X, second.X)
        numpy.testing.assert_array_equal(first.Y, second.Y)

    def test_unknown_setting(self):
        with pytest.raises(InvalidParameterError):
            generate("3", Setting1Config(n=15, p=7))

    def test_too_few_covariates(self):
        with pytest.raises(InvalidParameterError):
            Setting1Config(n=10, p=5)
        assert isinstance(setting_config("2", n=10, p=2), Setting2Config)
        with pytest.raises(InvalidParameterError):
            setting_config("1", n=10, p=2)


class TestMeasurementError:
    def test_contamination_has_the_requested_variance(self):
        config = MeasurementErrorConfig(base=Setting1Config(n=200, p=8, L=50, seed=4), noise_var=4.0, seed=4)
        clean, contaminated, _ = generate_measurement_error(config)
        numpy.testing.assert_array_equal(clean.X, contaminated.X)
        errors = contaminated.Y - clean.Y
        assert errors.var() == pytest.approx(4.0, rel=0.05)

    def test_variance_must_be_positive(self):
        with pytest.raises(InvalidParameterError):
            MeasurementErrorConfig(base=Setting1Config(n=10, p=8), noise_var=0.0)

    def test_from_config_defaults_to_a_dense_grid(self):
        block = as_config({"base": {"n": 20, "p": 8, "seed": 3}, "noise_var": 2.0})
        config = MeasurementErrorConfig.from_config(block)
        assert config.base.L == 1000
        assert config.seed == 3
        assert config.noise_var == 2.0

    def test_from_config_needs_a_base(self):
        with pytest.raises(ConfigurationError):
            MeasurementErrorConfig.from_config(as_config({"noise_var": 2.0}))


class TestSettingConfigFromConfig:
    def test_reads_every_field(self):
        config = Setting1Config.from_config(as_config({"n": 20, "p": 8, "L": 11, "rho": 0.5, "noise": False}))
        assert config == Setting1Config(n=20, p=8, L=11, rho=0.5, noise=False)

    def test_rejects_unknown_and_missing_keys(self):
        with pytest.raises(ConfigurationError):
            Setting1Config.from_config(as_config({"n": 20, "p": 8, "rho_x": 0.5}))
        with pytest.raises(ConfigurationError):
            Setting1Config.from_config(as_config({"n": 20}))
