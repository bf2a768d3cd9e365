"""
Supervised principal component regression for functional responses.

The pipeline: optionally smooth each response curve, center, band the covariate covariance at
a selected bandwidth (repairing it to PSD when banding breaks definiteness), form the response
weighted cross moment and its leading eigenvectors ``U``, pick ``(K, lambda)`` by K-fold
cross-validation, refit the directions on the full data and regress the curves on ``X V``.
"""
from typing import Any, Dict, List, NamedTuple, Optional, Tuple
from dataclasses import asdict, dataclass, field, fields, replace
import logging

import numpy
from overrides import overrides
from pyhocon import ConfigTree

from fspcr.common.checks import ConfigurationError, InvalidParameterError, NumericalError
from fspcr.common.config import as_config, check_keys, reading, sub_config, to_dict
from fspcr.data.dataset import FunctionalDataset, center
from fspcr.data.smoothing import smooth_dataset
from fspcr.linalg.covariance import (DEFAULT_FLOOR_EPS, BandedCovariance, BandSelectConfig,
                                     banded_covariance, select_bandwidth)
from fspcr.linalg.spectral import CrossMoment, cross_moment, top_k_eigen
from fspcr.models.model import Method, SpcrModel
from fspcr.solvers.directions import (DirectionMatrix, SolverConfig, fit_directions_path,
                                      fit_directions_unpenalized, spcra_correlate)
from fspcr.solvers.regression import DEFAULT_RIDGE_FALLBACK, gamma_or_zero
from fspcr.training.cross_validation import CrossValidationResult, cross_validate

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name


@dataclass(frozen=True)
class FitConfig:
    """
    Parameters
    ----------
    k_max : ``int``, optional (default = 10)
        Largest number of directions tried; clipped to ``p``.
    k_min : ``int``, optional (default = 1)
        Smallest number of directions tried. Setting ``k_min = k_max`` forces ``K``.
    lambda_grid : ``Tuple[float, ...]``, optional
        Explicit penalties. By default ``num_lambdas`` log-spaced values from ``lambda_max``, the
        largest absolute entry of the correlate, down to ``lambda_ratio * lambda_max``.
    num_lambdas : ``int``, optional (default = 30)
    lambda_ratio : ``float``, optional (default = 1e-3)
    folds : ``int``, optional (default = 5)
    band_config : ``BandSelectConfig``, optional
        Bandwidth selection settings; its seed defaults to ``seed``.
    bandwidth : ``int``, optional
        Use this bandwidth instead of selecting one.
    floor_eps : ``float``, optional (default = 1e-8)
        Relative eigenvalue floor of the PSD repair.
    smoothing : ``bool``, optional (default = False)
        Smooth every response curve with a GCV-tuned cubic smoothing spline first.
    ridge_fallback : ``float``, optional (default = 1e-8)
    seed : ``int``, optional (default = 0)
        Seeds the fold assignment and, unless set there, the bandwidth selection.
    solver : ``SolverConfig``, optional
    """
    k_max: int = 10
    k_min: int = 1
    lambda_grid: Optional[Tuple[float, ...]] = None
    num_lambdas: int = 30
    lambda_ratio: float = 1e-3
    folds: int = 5
    band_config: BandSelectConfig = field(default_factory=BandSelectConfig)
    bandwidth: Optional[int] = None
    floor_eps: float = DEFAULT_FLOOR_EPS
    smoothing: bool = False
    ridge_fallback: float = DEFAULT_RIDGE_FALLBACK
    seed: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.folds < 2:
            raise InvalidParameterError("folds must be at least 2, got {}".format(self.folds))
        if self.k_max < 1:
            raise InvalidParameterError("k_max must be at least 1, got {}".format(self.k_max))
        if not 1 <= self.k_min <= self.k_max:
            raise InvalidParameterError("k_min must be in [1, k_max], got {}".format(self.k_min))
        if self.num_lambdas < 1:
            raise InvalidParameterError("num_lambdas must be at least 1, got {}".format(self.num_lambdas))
        if not 0 < self.lambda_ratio <= 1:
            raise InvalidParameterError("lambda_ratio must be in (0, 1], got {}".format(self.lambda_ratio))
        if self.lambda_grid is not None:
            grid = tuple(float(value) for value in self.lambda_grid)
            if not grid or min(grid) < 0:
                raise InvalidParameterError("lambda_grid must hold non-negative values")
            object.__setattr__(self, "lambda_grid", grid)
        if self.bandwidth is not None and self.bandwidth < 0:
            raise InvalidParameterError("bandwidth must be non-negative, got {}".format(self.bandwidth))

    def penalties(self, correlate: numpy.ndarray) -> List[float]:
        if self.lambda_grid is not None:
            return list(self.lambda_grid)
        lambda_max = float(numpy.abs(correlate).max(initial=0.0))
        if lambda_max == 0:
            return [0.0]
        return list(numpy.geomspace(lambda_max, self.lambda_ratio * lambda_max, self.num_lambdas))

    def as_dict(self) -> Dict[str, Any]:
        document = asdict(self)
        document["solver"].pop("warm_start", None)
        return document

    @classmethod
    def from_config(cls, config: ConfigTree) -> 'FitConfig':
        check_keys(config, [item.name for item in fields(cls)], cls.__name__)
        with reading(cls.__name__):
            seed = config.get_int("seed", 0)
            band_config = sub_config(config, "band_config")
            solver = sub_config(config, "solver")
            lambda_grid = config.get_list("lambda_grid", None)
            return cls(k_max=config.get_int("k_max", 10),
                       k_min=config.get_int("k_min", 1),
                       lambda_grid=None if lambda_grid is None else tuple(lambda_grid),
                       num_lambdas=config.get_int("num_lambdas", 30),
                       lambda_ratio=config.get_float("lambda_ratio", 1e-3),
                       folds=config.get_int("folds", 5),
                       band_config=BandSelectConfig.from_config(as_config({"seed": seed, **to_dict(band_config)})),
                       bandwidth=config.get_int("bandwidth", None),
                       floor_eps=config.get_float("floor_eps", DEFAULT_FLOOR_EPS),
                       smoothing=config.get_bool("smoothing", False),
                       ridge_fallback=config.get_float("ridge_fallback", DEFAULT_RIDGE_FALLBACK),
                       seed=seed,
                       solver=SolverConfig() if solver is None else SolverConfig.from_config(solver))


class SpcrComponents(NamedTuple):
    """Full-data quantities shared by cross-validation and the final refit."""
    dataset: FunctionalDataset
    sigma_x: BandedCovariance
    moment: CrossMoment
    k_max: int


def estimate_components(dataset: FunctionalDataset, config: FitConfig) -> SpcrComponents:
    if config.smoothing:
        dataset = smooth_dataset(dataset)
    centered, _, _ = center(dataset)
    n, p = centered.num_samples, centered.num_covariates
    if n // config.folds < 2:
        raise ConfigurationError("{} samples are too few for {}-fold cross-validation".format(n, config.folds))
    if config.bandwidth is None:
        bandwidth, _ = select_bandwidth(centered.X, config.band_config)
    else:
        bandwidth = min(config.bandwidth, p - 1)
    sigma_x = banded_covariance(centered.X, bandwidth, config.floor_eps)
    if sigma_x.psd_repaired:
        logger.warning("banded covariance was indefinite (smallest eigenvalue %.3g); repaired",
                       sigma_x.min_eig_clipped)
    return SpcrComponents(centered, sigma_x, cross_moment(centered), min(config.k_max, p))


class FoldDirectionPath:
    """
    Rebuilds the covariance (at the full-data bandwidth) and the cross moment on a training
    fold and solves the method's direction path there.
    """
    def __init__(self, method: 'Spcr', bandwidth: int, k_max: int, penalties: List[float]) -> None:
        self.method = method
        self.bandwidth = bandwidth
        self.k_max = k_max
        self.penalties = penalties

    def __call__(self, train: FunctionalDataset) -> List[Optional[DirectionMatrix]]:
        sigma_x = banded_covariance(train.X, self.bandwidth, self.method.config.floor_eps).matrix
        correlate = self.method.correlate(sigma_x, cross_moment(train), self.k_max)
        return self.method.solve(sigma_x, correlate, self.penalties, skip_failures=True)


class Spcr(Method):
    """
    The l1-penalized estimator, with ``(K, lambda)`` chosen on a two-dimensional grid by K-fold
    cross-validation.

    Parameters
    ----------
    config : ``FitConfig``
    """
    name = "spcr"
    penalized = True

    def __init__(self, config: FitConfig = FitConfig()) -> None:
        self.config = config

    def correlate(self, sigma_x: numpy.ndarray, moment: CrossMoment, k_max: int) -> numpy.ndarray:
        """The right-hand side of the column problems; the leading eigenvectors of the cross moment."""
        return top_k_eigen(moment, k_max).vectors

    def penalties(self, correlate: numpy.ndarray) -> List[float]:
        return self.config.penalties(correlate)

    def solve(self,
              sigma_x: numpy.ndarray,
              correlate: numpy.ndarray,
              penalties: List[float],
              skip_failures: bool = False) -> List[Optional[DirectionMatrix]]:
        return fit_directions_path(sigma_x, correlate, penalties, self.config.solver, skip_failures)

    def cross_validate(self,
                       components: SpcrComponents,
                       num_jobs: int = 1,
                       fold_ids: Optional[numpy.ndarray] = None) -> CrossValidationResult:
        correlate = self._full_correlate(components)
        penalties = self.penalties(correlate)
        path = FoldDirectionPath(self, components.sigma_x.bandwidth, components.k_max, penalties)
        k_values = range(min(self.config.k_min, components.k_max), components.k_max + 1)
        return cross_validate(components.dataset, path, k_values, penalties,
                              folds=self.config.folds,
                              seed=self.config.seed,
                              ridge_fallback=self.config.ridge_fallback,
                              fold_ids=fold_ids,
                              num_jobs=num_jobs)

    def _full_correlate(self, components: SpcrComponents) -> numpy.ndarray:
        return self.correlate(components.sigma_x.matrix, components.moment, components.k_max)

    def refit(self, components: SpcrComponents, lambda_star: float) -> DirectionMatrix:
        """All ``k_max`` directions on the full data, following the path down to ``lambda_star``."""
        correlate = self._full_correlate(components)
        penalties = [penalty for penalty in self.penalties(correlate) if penalty >= lambda_star]
        solutions = self.solve(components.sigma_x.matrix, correlate, penalties)
        return solutions[int(numpy.argmin(penalties))]

    @overrides
    def fit(self,
            dataset: FunctionalDataset,
            num_jobs: int = 1,
            fold_ids: Optional[numpy.ndarray] = None) -> SpcrModel:
        components = estimate_components(dataset, self.config)
        logger.info("%s: n=%d, p=%d, bandwidth %d, k_max %d", self.name, components.dataset.num_samples,
                    components.dataset.num_covariates, components.sigma_x.bandwidth, components.k_max)
        result = self.cross_validate(components, num_jobs, fold_ids)
        candidates = self.refit(components, result.lambda_star)
        directions = candidates.leading(result.k_star)
        gamma = gamma_or_zero(components.dataset, directions, self.config.ridge_fallback)
        return SpcrModel(method=self.name,
                         directions=directions,
                         gamma=gamma,
                         k_star=result.k_star,
                         lambda_star=result.lambda_star if self.penalized else None,
                         bandwidth=components.sigma_x.bandwidth,
                         x_means=components.dataset.x_means,
                         y_means=components.dataset.y_means,
                         grid=components.dataset.grid,
                         candidate_directions=candidates,
                         cv_errors=result.errors)

    @overrides
    def config_dict(self) -> Dict[str, Any]:
        return {"type": self.name, **self.config.as_dict()}

    @classmethod
    def from_config(cls, config: ConfigTree) -> 'Spcr':
        return cls(FitConfig.from_config(config))


class SmoothedSpcr(Spcr):
    """:class:`Spcr` on responses smoothed curve by curve; ``smoothing`` defaults to on."""
    name = "spcr-smoothing"

    def __init__(self, config: FitConfig = FitConfig(smoothing=True)) -> None:
        super(SmoothedSpcr, self).__init__(config)

    @classmethod
    def from_config(cls, config: ConfigTree) -> 'SmoothedSpcr':
        return cls(FitConfig.from_config(as_config({"smoothing": True, **to_dict(config)})))


class UnpenalizedSpcr(Spcr):
    """Directions ``Sigma_x^{-1} U`` without a penalty; only ``K`` is cross-validated."""
    name = "spcr-nopen"
    penalized = False

    @overrides
    def penalties(self, correlate: numpy.ndarray) -> List[float]:
        return [0.0]

    @overrides
    def solve(self,
              sigma_x: numpy.ndarray,
              correlate: numpy.ndarray,
              penalties: List[float],
              skip_failures: bool = False) -> List[Optional[DirectionMatrix]]:
        try:
            return [fit_directions_unpenalized(sigma_x, correlate)]
        except NumericalError:
            if not skip_failures:
                raise
            logger.warning("unpenalized directions failed on a fold")
            return [None]


class SpcrA(Spcr):
    """
    The alternative estimator: eigenvectors ``S`` of the whitened cross moment, then the same
    l1-penalized path with ``Sigma_x^{1/2} S`` as the correlate.
    """
    name = "spcr-a"

    @overrides
    def correlate(self, sigma_x: numpy.ndarray, moment: CrossMoment, k_max: int) -> numpy.ndarray:
        return spcra_correlate(sigma_x, moment.matrix, k_max)


def fit(dataset: FunctionalDataset,
        config: FitConfig = FitConfig(),
        num_jobs: int = 1,
        fold_ids: Optional[numpy.ndarray] = None) -> SpcrModel:
    method = SmoothedSpcr(config) if config.smoothing else Spcr(config)
    return method.fit(dataset, num_jobs, fold_ids)


def with_seed(config: FitConfig, seed: int) -> FitConfig:
    """The same configuration reseeded, bandwidth selection included."""
    return replace(config, seed=seed, band_config=replace(config.band_config, seed=seed))
