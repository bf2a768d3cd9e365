"""
Monte Carlo comparison of fitting methods on simulated data.

Every replicate draws its training and test sets from sub-streams of the master seed keyed by
``(n, p, replicate)``, so the tables do not depend on how many workers run them. A method that
fails on a replicate is recorded as failed, left out of the aggregates and counted.
"""
from typing import Any, Dict, List, Optional, Sequence, Tuple
from dataclasses import dataclass, field, fields
import logging

import numpy
import pandas
import tqdm
from joblib import Parallel, delayed
from pyhocon import ConfigTree
from scipy import linalg

from fspcr.common.checks import FspcrError, InvalidParameterError
from fspcr.common.config import check_keys, reading, sub_config, to_dict
from fspcr.common.random import derive_seed
from fspcr.data.dataset import FunctionalDataset
from fspcr.data.simulation import (GroundTruth, MeasurementErrorConfig, generate, generate_measurement_error,
                                   setting_config)
from fspcr.models import Method, SpcrModel, available_methods, method_from_name
from fspcr.training.metrics.prediction import prediction_error
from fspcr.training.metrics.subspace import aligned_direction_error, projection_loss

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name

SETTINGS = ("1", "2", "measurement")
# Errors that fail one fit instead of the whole run.
FIT_ERRORS = (FspcrError, ValueError, numpy.linalg.LinAlgError, linalg.LinAlgError)
ORACLE = "oracle"
METRICS = ("prediction_error", "projection_loss", "direction_error", "k_hat")
RAW_COLUMNS = ("setting", "n", "p", "replicate", "method", "failed",
               "prediction_error", "projection_loss", "direction_error", "k_hat")
SUMMARY_COLUMNS = ("setting", "n", "p", "method", "metric", "mean", "se", "R", "failures")


@dataclass(frozen=True)
class HarnessConfig:
    """
    Parameters
    ----------
    setting : ``str``
        ``"1"`` (sparse, rank three), ``"2"`` (dense) or ``"measurement"`` (setting 1 on a dense
        grid with the training curves contaminated by ``N(0, noise_var)`` errors).
    sizes : ``Tuple[Tuple[int, int], ...]``
        ``(n, p)`` pairs.
    replicates : ``int``
    methods : ``Tuple[str, ...]``
        Method names; the measurement setting also accepts ``"oracle"``, which is
        ``spcr`` fitted on the curves before contamination.
    seed : ``int``
    test_size : ``int``, optional (default = 5000)
    num_points : ``int``, optional
        Grid length; 101, or 1000 for the measurement setting.
    noise_var : ``float``, optional (default = 1.0)
        Measurement error variance.
    method_params : ``Dict[str, Dict[str, Any]]``, optional
        Extra configuration per method name, e.g. ``{"spcr": {"k_max": 8}}``.
    """
    setting: str
    sizes: Tuple[Tuple[int, int], ...]
    replicates: int
    methods: Tuple[str, ...]
    seed: int = 0
    test_size: int = 5000
    num_points: Optional[int] = None
    noise_var: float = 1.0
    method_params: Dict[str, Dict[str, Any]] = field(default_factory=dict)

    def __post_init__(self):
        if self.setting not in SETTINGS:
            raise InvalidParameterError("setting must be one of {}, got {}".format(SETTINGS, self.setting))
        if self.replicates < 1:
            raise InvalidParameterError("replicates must be at least 1, got {}".format(self.replicates))
        if not self.sizes:
            raise InvalidParameterError("at least one (n, p) pair is required")
        if not self.methods:
            raise InvalidParameterError("at least one method is required")
        available = set(available_methods())
        if self.setting == "measurement":
            available.add(ORACLE)
        unknown = [method for method in self.methods if method not in available]
        if unknown:
            raise InvalidParameterError("unknown methods {}; choose from {}".format(unknown, sorted(available)))
        if self.test_size < 1:
            raise InvalidParameterError("test_size must be at least 1, got {}".format(self.test_size))
        object.__setattr__(self, "sizes", tuple((int(n), int(p)) for n, p in self.sizes))
        object.__setattr__(self, "methods", tuple(self.methods))

    @property
    def grid_length(self) -> int:
        if self.num_points is not None:
            return self.num_points
        return 1000 if self.setting == "measurement" else 101

    def method(self, name: str, seed: int) -> Method:
        settings = {"seed": seed, **self.method_params.get(name, {})}
        return method_from_name("spcr" if name == ORACLE else name, settings)

    @classmethod
    def from_config(cls, config: ConfigTree) -> 'HarnessConfig':
        check_keys(config, [item.name for item in fields(cls)], cls.__name__)
        with reading(cls.__name__):
            return cls(setting=config.get_string("setting"),
                       sizes=tuple(tuple(size) for size in config.get_list("sizes")),
                       replicates=config.get_int("replicates"),
                       methods=tuple(config.get_list("methods")),
                       seed=config.get_int("seed", 0),
                       test_size=config.get_int("test_size", 5000),
                       num_points=config.get_int("num_points", None),
                       noise_var=config.get_float("noise_var", 1.0),
                       method_params=to_dict(sub_config(config, "method_params")))


@dataclass(frozen=True)
class ReplicateSummary:
    """
    Aggregates of one method at one ``(n, p)``. Standard errors are the sample standard
    deviation over ``sqrt(R)``, and zero when ``R = 1``. The subspace metrics exist only when
    the true directions are known.
    """
    method: str
    n: int
    p: int
    prediction_error_mean: float
    prediction_error_se: float
    k_hat_mean: float
    k_hat_se: float
    replicates: int
    failures: int = 0
    projection_loss_mean: Optional[float] = None
    projection_loss_se: Optional[float] = None
    direction_error_mean: Optional[float] = None
    direction_error_se: Optional[float] = None

    def rows(self, setting: str) -> List[Dict[str, Any]]:
        rows = []
        for metric in METRICS:
            mean = getattr(self, metric + "_mean")
            if mean is None:
                continue
            rows.append({"setting": setting, "n": self.n, "p": self.p, "method": self.method,
                         "metric": metric, "mean": mean, "se": getattr(self, metric + "_se"),
                         "R": self.replicates, "failures": self.failures})
        return rows


def mean_and_se(values: Sequence[float]) -> Tuple[float, float]:
    values = numpy.asarray(values, dtype=float)
    if values.size == 0:
        return numpy.nan, numpy.nan
    if values.size == 1:
        return float(values[0]), 0.0
    return float(values.mean()), float(values.std(ddof=1) / numpy.sqrt(values.size))


def _datasets(config: HarnessConfig, n: int, p: int, replicate: int) -> Tuple[Dict[str, FunctionalDataset],
                                                                              FunctionalDataset, GroundTruth]:
    setting = "1" if config.setting == "measurement" else config.setting
    train_seed = derive_seed(config.seed, "replicate", n, p, replicate, "train")
    test_seed = derive_seed(config.seed, "replicate", n, p, replicate, "test")
    train_config = setting_config(setting, n=n, p=p, L=config.grid_length, seed=train_seed)
    test, _ = generate(setting, setting_config(setting, n=config.test_size, p=p, L=config.grid_length, seed=test_seed))
    if config.setting != "measurement":
        train, truth = generate(setting, train_config)
        return {name: train for name in config.methods}, test, truth
    train, contaminated, truth = generate_measurement_error(
            MeasurementErrorConfig(base=train_config, noise_var=config.noise_var, seed=train_seed))
    return ({name: train if name == ORACLE else contaminated for name in config.methods}, test, truth)


def _score(model: SpcrModel, test: FunctionalDataset, truth: GroundTruth) -> Dict[str, Optional[float]]:
    scores = {"prediction_error": prediction_error(model, test),
              "projection_loss": None,
              "direction_error": None,
              "k_hat": float(model.k_star)}
    if truth.v_star is not None:
        estimate = model.leading_directions(truth.true_dimension).columns
        scores["projection_loss"] = projection_loss(estimate, truth.v_star.columns)
        scores["direction_error"] = aligned_direction_error(estimate, truth.v_star.columns)
    return scores


def run_replicate(config: HarnessConfig, n: int, p: int, replicate: int) -> List[Dict[str, Any]]:
    """Fits every method on one replicate; returns one raw row per method."""
    trains, test, truth = _datasets(config, n, p, replicate)
    fit_seed = derive_seed(config.seed, "replicate", n, p, replicate, "fit")
    rows = []
    for name in config.methods:
        row = {"setting": config.setting, "n": n, "p": p, "replicate": replicate, "method": name, "failed": False}
        try:
            model = config.method(name, fit_seed).fit(trains[name])
            row.update(_score(model, test, truth))
        except FIT_ERRORS as error:
            logger.warning("%s failed on replicate %d at (n=%d, p=%d): %s", name, replicate, n, p, error)
            row.update({"failed": True, "prediction_error": None, "projection_loss": None,
                        "direction_error": None, "k_hat": None})
        rows.append(row)
    return rows


def summarize(raw: pandas.DataFrame) -> List[ReplicateSummary]:
    summaries = []
    for (n, p, method), group in raw.groupby(["n", "p", "method"], sort=False):
        succeeded = group[~group["failed"].astype(bool)]
        statistics = {}
        for metric in METRICS:
            values = succeeded[metric].dropna().to_numpy(dtype=float)
            statistics[metric] = mean_and_se(values) if values.size else (None, None)
        summaries.append(ReplicateSummary(method=method, n=int(n), p=int(p),
                                          prediction_error_mean=statistics["prediction_error"][0],
                                          prediction_error_se=statistics["prediction_error"][1],
                                          k_hat_mean=statistics["k_hat"][0],
                                          k_hat_se=statistics["k_hat"][1],
                                          replicates=len(succeeded),
                                          failures=len(group) - len(succeeded),
                                          projection_loss_mean=statistics["projection_loss"][0],
                                          projection_loss_se=statistics["projection_loss"][1],
                                          direction_error_mean=statistics["direction_error"][0],
                                          direction_error_se=statistics["direction_error"][1]))
    return summaries


def replicate_harness(config: HarnessConfig,
                      num_jobs: int = 1,
                      quiet: bool = False) -> Tuple[List[ReplicateSummary], pandas.DataFrame]:
    """
    Returns
    -------
    The per-method summaries and the raw per-replicate table.
    """
    tasks = [(n, p, replicate) for n, p in config.sizes for replicate in range(config.replicates)]
    logger.info("running %d replicates of setting %s for methods %s",
                len(tasks), config.setting, ", ".join(config.methods))
    results = Parallel(n_jobs=num_jobs)(
            delayed(run_replicate)(config, n, p, replicate)
            for n, p, replicate in tqdm.tqdm(tasks, disable=True if quiet else None))
    raw = pandas.DataFrame([row for rows in results for row in rows], columns=list(RAW_COLUMNS))
    summaries = summarize(raw)
    failures = int(raw["failed"].sum())
    if failures:
        logger.warning("%d of %d fits failed and are excluded from the summary", failures, len(raw))
    return summaries, raw


def summary_table(summaries: Sequence[ReplicateSummary], setting: str) -> pandas.DataFrame:
    rows = [row for summary in summaries for row in summary.rows(setting)]
    return pandas.DataFrame(rows, columns=list(SUMMARY_COLUMNS))
