import numpy
import pandas
import pytest

from fspcr.common.checks import ConfigurationError, InvalidParameterError, NumericalError
from fspcr.common.config import as_config
from fspcr.models import Upcr
from fspcr.training.harness import (HarnessConfig, mean_and_se, replicate_harness, run_replicate, summarize,
                                    summary_table)

SMALL_METHODS = {"spcr": {"k_max": 3, "num_lambdas": 4, "folds": 3},
                 "upcr": {"k_max": 3, "folds": 3}}


def _small_config(**overrides):
    settings = dict(setting="1", sizes=((30, 8),), replicates=2, methods=("spcr", "upcr"), seed=5,
                    test_size=40, num_points=11, method_params=SMALL_METHODS)
    settings.update(overrides)
    return HarnessConfig(**settings)


class TestMeanAndSe:
    def test_values(self):
        mean, se = mean_and_se([1.0, 2.0, 3.0])
        assert mean == pytest.approx(2.0)
        assert se == pytest.approx(1.0 / numpy.sqrt(3))
        assert mean_and_se([4.0]) == (4.0, 0.0)


class TestHarnessConfig:
    def test_unknown_method(self):
        with pytest.raises(InvalidParameterError):
            _small_config(methods=("spcr", "lasso"))

    def test_oracle_only_in_the_measurement_setting(self):
        with pytest.raises(InvalidParameterError):
            _small_config(methods=("oracle",))
        assert _small_config(setting="measurement", methods=("oracle",)).grid_length == 11

    def test_default_grid_lengths(self):
        assert _small_config(num_points=None).grid_length == 101
        assert _small_config(setting="measurement", num_points=None).grid_length == 1000

    def test_from_config(self):
        config = HarnessConfig.from_config(as_config({"setting": "2", "sizes": [[20, 10]], "replicates": 3,
                                                      "methods": ["upcr"], "seed": 1,
                                                      "method_params": {"upcr": {"k_max": 4}}}))
        assert config.sizes == ((20, 10),)
        assert config.methods == ("upcr",)
        assert config.method("upcr", 7).config.k_max == 4
        assert config.method("upcr", 7).config.seed == 7

    def test_from_config_rejects_unknown_keys(self):
        with pytest.raises(ConfigurationError):
            HarnessConfig.from_config(as_config({"setting": "1", "sizes": [[20, 10]], "replicates": 3,
                                                 "methods": ["upcr"], "replicate": 4}))

    def test_from_config_requires_sizes(self):
        with pytest.raises(ConfigurationError):
            HarnessConfig.from_config(as_config({"setting": "1", "replicates": 3, "methods": ["upcr"]}))


class TestReplicates:
    def test_run_replicate_rows(self):
        rows = run_replicate(_small_config(), 30, 8, 0)
        assert [row["method"] for row in rows] == ["spcr", "upcr"]
        for row in rows:
            assert not row["failed"]
            assert row["prediction_error"] > 0
            assert 0 <= row["projection_loss"] <= 6
            assert 1 <= row["k_hat"] <= 3

    def test_replicates_are_reproducible(self):
        first = run_replicate(_small_config(), 30, 8, 1)
        second = run_replicate(_small_config(), 30, 8, 1)
        assert first == second

    def test_setting2_has_no_subspace_metrics(self):
        rows = run_replicate(_small_config(setting="2"), 30, 8, 0)
        assert all(row["projection_loss"] is None for row in rows)

    @pytest.mark.parametrize("error", [numpy.linalg.LinAlgError("singular matrix"),
                                       ValueError("n_components must be at most n_features"),
                                       NumericalError("no convergence")])
    def test_a_failing_fit_is_recorded(self, monkeypatch, error):
        def failing_fit(self, dataset, num_jobs=1, fold_ids=None):
            raise error
        monkeypatch.setattr(Upcr, "fit", failing_fit)
        rows = run_replicate(_small_config(), 30, 8, 0)
        spcr_row, upcr_row = rows
        assert not spcr_row["failed"]
        assert upcr_row["failed"]
        assert upcr_row["prediction_error"] is None
        assert upcr_row["k_hat"] is None

    def test_failures_do_not_stop_the_harness(self, monkeypatch):
        def failing_fit(self, dataset, num_jobs=1, fold_ids=None):
            raise numpy.linalg.LinAlgError("singular matrix")
        monkeypatch.setattr(Upcr, "fit", failing_fit)
        summaries, raw = replicate_harness(_small_config(), num_jobs=1, quiet=True)
        assert int(raw["failed"].sum()) == 2
        upcr = next(summary for summary in summaries if summary.method == "upcr")
        assert upcr.failures == 2
        assert upcr.replicates == 0
        assert upcr.prediction_error_mean is None

    def test_summaries_count_failures(self):
        raw = pandas.DataFrame([
                {"n": 10, "p": 6, "method": "spcr", "failed": False, "prediction_error": 1.0,
                 "projection_loss": 0.1, "direction_error": 0.2, "k_hat": 3.0},
                {"n": 10, "p": 6, "method": "spcr", "failed": True, "prediction_error": None,
                 "projection_loss": None, "direction_error": None, "k_hat": None},
                {"n": 10, "p": 6, "method": "spcr", "failed": False, "prediction_error": 3.0,
                 "projection_loss": 0.3, "direction_error": 0.4, "k_hat": 3.0}])
        summary, = summarize(raw)
        assert summary.replicates == 2
        assert summary.failures == 1
        assert summary.prediction_error_mean == pytest.approx(2.0)
        assert summary.k_hat_se == pytest.approx(0.0)

    def test_harness_tables(self):
        summaries, raw = replicate_harness(_small_config(), num_jobs=1, quiet=True)
        assert len(raw) == 4
        table = summary_table(summaries, "1")
        assert set(table["metric"]) == {"prediction_error", "projection_loss", "direction_error", "k_hat"}
        assert set(table["method"]) == {"spcr", "upcr"}


def _means(summaries, metric):
    return {summary.method: getattr(summary, metric + "_mean") for summary in summaries}


@pytest.mark.slow
class TestMonteCarloStudies:
    def test_sparse_setting_at_moderate_size(self):
        config = HarnessConfig(setting="1", sizes=((100, 200),), replicates=50,
                               methods=("spcr", "upcr", "spcr-nopen"), seed=11, test_size=5000)
        summaries, _ = replicate_harness(config, num_jobs=4, quiet=True)
        errors = _means(summaries, "prediction_error")
        assert 1.2 <= errors["spcr"] <= 1.9
        assert errors["upcr"] >= 15
        assert errors["spcr-nopen"] >= 10
        assert _means(summaries, "projection_loss")["spcr"] <= 0.10
        assert 2.5 <= _means(summaries, "k_hat")["spcr"] <= 4.0

    def test_method_ordering_at_large_n(self):
        config = HarnessConfig(setting="1", sizes=((500, 200),), replicates=25,
                               methods=("spcr", "superpc", "upcr", "spcr-nopen"), seed=12, test_size=5000)
        errors = _means(replicate_harness(config, num_jobs=4, quiet=True)[0], "prediction_error")
        assert errors["spcr"] < errors["superpc"] < errors["upcr"]
        assert errors["spcr"] < errors["spcr-nopen"]

    def test_smoothing_helps_under_measurement_error(self):
        config = HarnessConfig(setting="measurement", sizes=((100, 200),), replicates=20,
                               methods=("spcr-smoothing", "spcr", "oracle"), seed=13, test_size=5000,
                               noise_var=10.0)
        errors = _means(replicate_harness(config, num_jobs=4, quiet=True)[0], "prediction_error")
        assert errors["spcr-smoothing"] < errors["spcr"]
        assert errors["spcr-smoothing"] <= 1.25 * errors["oracle"]

    def test_direction_error_decreases_with_n(self):
        config = HarnessConfig(setting="1", sizes=((100, 200), (200, 200), (400, 200)), replicates=20,
                               methods=("spcr",), seed=14, test_size=500)
        summaries = sorted(replicate_harness(config, num_jobs=4, quiet=True)[0], key=lambda summary: summary.n)
        errors = [summary.direction_error_mean for summary in summaries]
        assert errors[0] > errors[1] > errors[2]
