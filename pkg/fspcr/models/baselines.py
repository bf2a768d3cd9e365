"""
Unsupervised comparison methods.

``upcr`` is conventional principal component regression: the directions are the leading
eigenvectors of the unbanded sample covariance of ``X`` and only ``K`` is cross-validated.
``superpc`` first screens the covariates by the marginal statistic
``m_j^2 = sum_l (sum_i Y_i(t_l) X_ij)^2``, keeps the ``m`` largest and runs principal component
regression on those; ``(m, K)`` are chosen by cross-validation with the screening redone
inside every training fold.
"""
from typing import Any, Dict, List, Optional, Tuple
from dataclasses import asdict, dataclass, fields
import logging
import math

import numpy
from overrides import overrides
from pyhocon import ConfigTree
from sklearn.decomposition import PCA

from fspcr.common.checks import ConfigurationError, InvalidParameterError, PreconditionError
from fspcr.common.config import check_keys, reading
from fspcr.common.random import derive_seed
from fspcr.data.dataset import FunctionalDataset, center
from fspcr.data.smoothing import smooth_dataset
from fspcr.linalg.spectral import fix_signs
from fspcr.models.model import Method, SpcrModel
from fspcr.solvers.directions import DirectionMatrix
from fspcr.solvers.regression import DEFAULT_RIDGE_FALLBACK, gamma_or_zero
from fspcr.training.cross_validation import CrossValidationResult, cross_validate

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name

DEFAULT_RETAIN_GRID = (10, 25, 50, 100)
# Penalty label of the single cross-validation column of the unpenalized baselines.
NO_PENALTY = (0.0,)


@dataclass(frozen=True)
class UpcrConfig:
    """
    Parameters
    ----------
    k_max : ``int``, optional (default = 10)
        Largest number of principal components tried.
    folds : ``int``, optional (default = 5)
    smoothing : ``bool``, optional (default = False)
    ridge_fallback : ``float``, optional (default = 1e-8)
    seed : ``int``, optional (default = 0)
        Seeds the fold assignment, independently of the supervised methods' folds.
    """
    k_max: int = 10
    folds: int = 5
    smoothing: bool = False
    ridge_fallback: float = DEFAULT_RIDGE_FALLBACK
    seed: int = 0

    def __post_init__(self):
        if self.k_max < 1:
            raise InvalidParameterError("k_max must be at least 1, got {}".format(self.k_max))
        if self.folds < 2:
            raise InvalidParameterError("folds must be at least 2, got {}".format(self.folds))

    @classmethod
    def from_config(cls, config: ConfigTree) -> 'UpcrConfig':
        check_keys(config, [item.name for item in fields(cls)], cls.__name__)
        with reading(cls.__name__):
            return cls(**cls._read(config))

    @classmethod
    def _read(cls, config: ConfigTree) -> Dict[str, Any]:
        return {"k_max": config.get_int("k_max", 10),
                "folds": config.get_int("folds", 5),
                "smoothing": config.get_bool("smoothing", False),
                "ridge_fallback": config.get_float("ridge_fallback", DEFAULT_RIDGE_FALLBACK),
                "seed": config.get_int("seed", 0)}


@dataclass(frozen=True)
class SuperpcConfig(UpcrConfig):
    """
    Parameters
    ----------
    retain_grid : ``Tuple[int, ...]``, optional (default = (10, 25, 50, 100))
        Candidate numbers of screened covariates; values above ``p`` are dropped.
    """
    retain_grid: Tuple[int, ...] = DEFAULT_RETAIN_GRID

    def __post_init__(self):
        super(SuperpcConfig, self).__post_init__()
        grid = tuple(sorted(set(int(m) for m in self.retain_grid)))
        if not grid or grid[0] < 1:
            raise InvalidParameterError("retain_grid must hold positive counts, got {}".format(self.retain_grid))
        object.__setattr__(self, "retain_grid", grid)

    def candidates(self, p: int) -> List[int]:
        """The retain grid restricted to ``[1, p]``; just ``p`` when nothing fits."""
        return [m for m in self.retain_grid if m <= p] or [p]

    @classmethod
    def _read(cls, config: ConfigTree) -> Dict[str, Any]:
        retain_grid = config.get_list("retain_grid", None)
        return {**super(SuperpcConfig, cls)._read(config),
                "retain_grid": DEFAULT_RETAIN_GRID if retain_grid is None else tuple(retain_grid)}


def principal_directions(X: numpy.ndarray, k: int) -> DirectionMatrix:
    """The ``k`` leading eigenvectors of the sample covariance of ``X``, sign-fixed."""
    pca = PCA(n_components=k, svd_solver="full")
    pca.fit(X)
    return DirectionMatrix(fix_signs(pca.components_.T))


def superpc_screen(dataset: FunctionalDataset, retain: int) -> numpy.ndarray:
    """
    Indices of the ``retain`` covariates with the largest ``m_j^2``, in decreasing order of the
    statistic; ties keep index order. The sum over the grid is unweighted.
    """
    if not dataset.centered:
        raise PreconditionError("screening needs a centered dataset")
    if not 1 <= retain <= dataset.num_covariates:
        raise InvalidParameterError("retain must be in [1, {}], got {}".format(dataset.num_covariates, retain))
    scores = screening_scores(dataset)
    return numpy.argsort(-scores, kind="stable")[:retain]


def screening_scores(dataset: FunctionalDataset) -> numpy.ndarray:
    return numpy.sum((dataset.X.T @ dataset.Y) ** 2, axis=1)


def _embed(directions: DirectionMatrix, columns: numpy.ndarray, p: int, k: int) -> DirectionMatrix:
    embedded = numpy.zeros((p, k))
    embedded[columns, :directions.num_directions] = directions.columns
    return DirectionMatrix(embedded)


def _component_limit(n: int, folds: int) -> int:
    """Fewest rows any training fold can have, which bounds the number of components."""
    return n - math.ceil(n / folds)


class PrincipalDirectionPath:
    """Leading principal directions of a training fold, optionally after screening."""
    def __init__(self, k_max: int, retain: Optional[int] = None) -> None:
        self.k_max = k_max
        self.retain = retain

    def __call__(self, train: FunctionalDataset) -> List[Optional[DirectionMatrix]]:
        p = train.num_covariates
        if self.retain is None:
            return [principal_directions(train.X, self.k_max)]
        columns = superpc_screen(train, self.retain)
        directions = principal_directions(train.X[:, columns], self.k_max)
        return [_embed(directions, columns, p, self.k_max)]


def _prepare(dataset: FunctionalDataset, config: UpcrConfig) -> FunctionalDataset:
    if config.smoothing:
        dataset = smooth_dataset(dataset)
    centered, _, _ = center(dataset)
    if centered.num_samples // config.folds < 2:
        raise ConfigurationError("{} samples are too few for {}-fold "
                                 "cross-validation".format(centered.num_samples, config.folds))
    return centered


def _model(name: str,
           centered: FunctionalDataset,
           candidates: DirectionMatrix,
           result: CrossValidationResult,
           ridge_fallback: float) -> SpcrModel:
    directions = candidates.leading(result.k_star)
    return SpcrModel(method=name,
                     directions=directions,
                     gamma=gamma_or_zero(centered, directions, ridge_fallback),
                     k_star=result.k_star,
                     lambda_star=None,
                     bandwidth=None,
                     x_means=centered.x_means,
                     y_means=centered.y_means,
                     grid=centered.grid,
                     candidate_directions=candidates,
                     cv_errors=result.errors)


def fit_upcr(dataset: FunctionalDataset,
             config: UpcrConfig = UpcrConfig(),
             num_jobs: int = 1,
             fold_ids: Optional[numpy.ndarray] = None) -> SpcrModel:
    centered = _prepare(dataset, config)
    n, p = centered.num_samples, centered.num_covariates
    k_max = min(config.k_max, p, _component_limit(n, config.folds))
    result = cross_validate(centered, PrincipalDirectionPath(k_max), range(1, k_max + 1), NO_PENALTY,
                            folds=config.folds,
                            seed=derive_seed(config.seed, "upcr"),
                            ridge_fallback=config.ridge_fallback,
                            fold_ids=fold_ids,
                            num_jobs=num_jobs)
    return _model("upcr", centered, principal_directions(centered.X, k_max), result, config.ridge_fallback)


def fit_superpc(dataset: FunctionalDataset,
                config: SuperpcConfig = SuperpcConfig(),
                num_jobs: int = 1,
                fold_ids: Optional[numpy.ndarray] = None) -> SpcrModel:
    centered = _prepare(dataset, config)
    n, p = centered.num_samples, centered.num_covariates
    seed = derive_seed(config.seed, "superpc")
    best: Optional[Tuple[float, int, CrossValidationResult]] = None
    for retain in config.candidates(p):
        k_max = min(config.k_max, retain, _component_limit(n, config.folds))
        result = cross_validate(centered, PrincipalDirectionPath(k_max, retain), range(1, k_max + 1), NO_PENALTY,
                                folds=config.folds,
                                seed=seed,
                                ridge_fallback=config.ridge_fallback,
                                fold_ids=fold_ids,
                                num_jobs=num_jobs)
        error = float(result.errors.loc[result.k_star, result.lambda_star])
        if best is None or error < best[0]:
            best = (error, retain, result)
    _, retain, result = best
    logger.info("superpc kept %d of %d covariates with K=%d", retain, p, result.k_star)
    k_max = min(config.k_max, retain, _component_limit(n, config.folds))
    columns = superpc_screen(centered, retain)
    candidates = _embed(principal_directions(centered.X[:, columns], k_max), columns, p, k_max)
    return _model("superpc", centered, candidates, result, config.ridge_fallback)


class Upcr(Method):
    name = "upcr"

    def __init__(self, config: UpcrConfig = UpcrConfig()) -> None:
        self.config = config

    @overrides
    def fit(self,
            dataset: FunctionalDataset,
            num_jobs: int = 1,
            fold_ids: Optional[numpy.ndarray] = None) -> SpcrModel:
        return fit_upcr(dataset, self.config, num_jobs, fold_ids)

    @overrides
    def config_dict(self) -> Dict[str, Any]:
        return {"type": self.name, **asdict(self.config)}

    @classmethod
    def from_config(cls, config: ConfigTree) -> 'Upcr':
        return cls(UpcrConfig.from_config(config))


class Superpc(Method):
    name = "superpc"

    def __init__(self, config: SuperpcConfig = SuperpcConfig()) -> None:
        self.config = config

    @overrides
    def fit(self,
            dataset: FunctionalDataset,
            num_jobs: int = 1,
            fold_ids: Optional[numpy.ndarray] = None) -> SpcrModel:
        return fit_superpc(dataset, self.config, num_jobs, fold_ids)

    @overrides
    def config_dict(self) -> Dict[str, Any]:
        return {"type": self.name, **asdict(self.config)}

    @classmethod
    def from_config(cls, config: ConfigTree) -> 'Superpc':
        return cls(SuperpcConfig.from_config(config))
