"""
Data-generating processes for the simulation studies: a sparse, exactly rank-three
coefficient (``setting1``), a dense coefficient with slowly decaying weights (``setting2``), and
dense-grid measurement error on top of either.
"""
from typing import Any, Optional, Tuple, Union
from dataclasses import dataclass
import logging

import numpy
from pyhocon import ConfigTree
from scipy import linalg

from fspcr.common.checks import ConfigurationError, InvalidParameterError, NumericalError
from fspcr.common.config import as_config, check_keys, reading, sub_config, to_dict
from fspcr.common.random import stream
from fspcr.data.dataset import FunctionalDataset, Grid
from fspcr.solvers.directions import DirectionMatrix

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name

INITIAL_JITTER = 1e-10
MAX_JITTER = 1e-6
TRUE_DIMENSION = 3

Seed = Union[int, numpy.random.Generator]


@dataclass(frozen=True)
class Setting1Config:
    """
    Parameters
    ----------
    n : ``int``
        Sample size.
    p : ``int``
        Number of covariates; at least 6 so the three supports of the true directions fit.
    L : ``int``, optional (default = 101)
        Number of equally spaced grid points on [0, 1].
    seed : ``int``
    rho : ``float``, optional (default = 0.25)
        Covariate covariance is ``rho ** |j - j'|``.
    gp_scale : ``float``, optional (default = 5)
        Rate of the squared exponential error kernel ``exp(-gp_scale (t1 - t2)^2)``.
    noise : ``bool``, optional (default = True)
        Set to ``False`` to drop the Gaussian process error and return ``X beta(t)`` exactly.
    """
    n: int
    p: int
    L: int = 101
    seed: int = 0
    rho: float = 0.25
    gp_scale: float = 5.0
    noise: bool = True

    min_covariates = 6

    def __post_init__(self):
        if self.n < 2:
            raise InvalidParameterError("n must be at least 2, got {}".format(self.n))
        if self.p < self.min_covariates:
            raise InvalidParameterError("p must be at least {}, got {}".format(self.min_covariates, self.p))
        if self.L < 2:
            raise InvalidParameterError("L must be at least 2, got {}".format(self.L))
        if abs(self.rho) >= 1:
            raise InvalidParameterError("|rho| must be below 1, got {}".format(self.rho))
        if self.gp_scale <= 0:
            raise InvalidParameterError("gp_scale must be positive, got {}".format(self.gp_scale))

    @property
    def grid(self) -> Grid:
        return Grid.uniform(self.L)

    @classmethod
    def from_config(cls, config: ConfigTree) -> 'Setting1Config':
        check_keys(config, ("n", "p", "L", "seed", "rho", "gp_scale", "noise"), cls.__name__)
        with reading(cls.__name__):
            return cls(n=config.get_int("n"),
                       p=config.get_int("p"),
                       L=config.get_int("L", 101),
                       seed=config.get_int("seed", 0),
                       rho=config.get_float("rho", 0.25),
                       gp_scale=config.get_float("gp_scale", 5.0),
                       noise=config.get_bool("noise", True))


@dataclass(frozen=True)
class Setting2Config(Setting1Config):
    """The dense setting has the same fields; its coefficient function is defined for any ``p >= 1``."""
    min_covariates = 1


@dataclass(frozen=True)
class MeasurementErrorConfig:
    base: Setting1Config
    noise_var: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not self.noise_var > 0:
            raise InvalidParameterError("noise_var must be positive, got {}".format(self.noise_var))

    @classmethod
    def from_config(cls, config: ConfigTree) -> 'MeasurementErrorConfig':
        """The base block defaults to a 1000 point grid."""
        check_keys(config, ("base", "noise_var", "seed"), cls.__name__)
        base_config = sub_config(config, "base")
        if base_config is None:
            raise ConfigurationError("{} requires a base block".format(cls.__name__))
        base = Setting1Config.from_config(as_config({"L": 1000, **to_dict(base_config)}))
        with reading(cls.__name__):
            return cls(base=base,
                       noise_var=config.get_float("noise_var", 1.0),
                       seed=config.get_int("seed", base.seed))


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """
    ``v_star`` and ``gamma`` exist only for the sparse setting, where ``beta = v_star @ gamma``.
    """
    beta: numpy.ndarray
    sigma_x: numpy.ndarray
    v_star: Optional[DirectionMatrix] = None
    gamma: Optional[numpy.ndarray] = None

    @property
    def true_dimension(self) -> Optional[int]:
        return None if self.v_star is None else self.v_star.num_directions


def ar_covariance(p: int, rho: float) -> numpy.ndarray:
    if p < 1:
        raise InvalidParameterError("p must be at least 1, got {}".format(p))
    if abs(rho) >= 1:
        raise InvalidParameterError("|rho| must be below 1, got {}".format(rho))
    lags = numpy.abs(numpy.subtract.outer(numpy.arange(p), numpy.arange(p)))
    return numpy.power(float(rho), lags)


def squared_exponential_kernel(points_1: numpy.ndarray, points_2: numpy.ndarray, scale: float) -> numpy.ndarray:
    return numpy.exp(-scale * numpy.subtract.outer(points_1, points_2) ** 2)


def _rng(seed: Seed) -> numpy.random.Generator:
    if isinstance(seed, numpy.random.Generator):
        return seed
    return stream(seed)


def _jittered_cholesky(kernel: numpy.ndarray) -> numpy.ndarray:
    jitter = INITIAL_JITTER
    identity = numpy.eye(kernel.shape[0])
    while jitter <= MAX_JITTER:
        try:
            return linalg.cholesky(kernel + jitter * identity, lower=True)
        except linalg.LinAlgError:
            logger.debug("kernel factorization failed with jitter %g", jitter)
            jitter *= 2
    raise NumericalError("kernel matrix could not be factorized with jitter up to {}".format(MAX_JITTER))


def sample_gaussian_process(grid: Grid, n: int, scale: float, seed: Seed) -> numpy.ndarray:
    """
    ``n`` independent draws of the zero-mean Gaussian process with kernel
    ``exp(-scale (t1 - t2)^2)`` restricted to ``grid``, shape ``(n, L)``.
    """
    if n < 1:
        raise InvalidParameterError("n must be at least 1, got {}".format(n))
    factor = _jittered_cholesky(squared_exponential_kernel(grid.points, grid.points, scale))
    standard = _rng(seed).standard_normal((n, len(grid)))
    return standard @ factor.T


def sample_covariates(n: int, sigma_x: numpy.ndarray, seed: Seed) -> numpy.ndarray:
    factor = linalg.cholesky(sigma_x, lower=True)
    return _rng(seed).standard_normal((n, sigma_x.shape[0])) @ factor.T


def setting1_directions(p: int) -> DirectionMatrix:
    columns = numpy.zeros((p, TRUE_DIMENSION))
    columns[[0, 1], 0] = 1.0
    columns[[2, 3], 1] = 1.0
    columns[[p - 2, p - 1], 2] = 1.0
    return DirectionMatrix(columns)


def setting1_gamma(points: numpy.ndarray) -> numpy.ndarray:
    return numpy.vstack([2 * numpy.cos(numpy.pi * points),
                         3 * numpy.cos(2 * numpy.pi * points),
                         5 * numpy.cos(3 * numpy.pi * points) + 3 * numpy.sin(3 * numpy.pi * points) ** 2])


def setting2_beta(p: int, points: numpy.ndarray) -> numpy.ndarray:
    j = numpy.arange(1, p + 1)[:, numpy.newaxis]
    return numpy.cos(numpy.pi * points[numpy.newaxis, :] * (j + 20) / 10) * (15.0 / j ** 2)


def _generate(config: Setting1Config, beta: numpy.ndarray) -> Tuple[FunctionalDataset, numpy.ndarray]:
    grid = config.grid
    sigma_x = ar_covariance(config.p, config.rho)
    X = sample_covariates(config.n, sigma_x, stream(config.seed, "covariates"))
    Y = X @ beta
    if config.noise:
        Y = Y + sample_gaussian_process(grid, config.n, config.gp_scale, stream(config.seed, "process-error"))
    return FunctionalDataset(X, Y, grid), sigma_x


def generate_setting1(config: Setting1Config) -> Tuple[FunctionalDataset, GroundTruth]:
    v_star = setting1_directions(config.p)
    gamma = setting1_gamma(config.grid.points)
    beta = v_star.columns @ gamma
    dataset, sigma_x = _generate(config, beta)
    return dataset, GroundTruth(beta=beta, sigma_x=sigma_x, v_star=v_star, gamma=gamma)


def generate_setting2(config: Setting2Config) -> Tuple[FunctionalDataset, GroundTruth]:
    beta = setting2_beta(config.p, config.grid.points)
    dataset, sigma_x = _generate(config, beta)
    return dataset, GroundTruth(beta=beta, sigma_x=sigma_x)


GENERATORS = {"1": generate_setting1, "2": generate_setting2}
CONFIGS = {"1": Setting1Config, "2": Setting2Config}


def setting_config(setting: str, **fields: Any) -> Setting1Config:
    """The configuration class of ``setting`` built from ``fields``."""
    if str(setting) not in CONFIGS:
        raise InvalidParameterError("unknown setting {}; choose from {}".format(setting, sorted(CONFIGS)))
    return CONFIGS[str(setting)](**fields)


def generate(setting: str, config: Setting1Config) -> Tuple[FunctionalDataset, GroundTruth]:
    try:
        generator = GENERATORS[str(setting)]
    except KeyError:
        raise InvalidParameterError("unknown setting {}; choose from {}".format(setting, sorted(GENERATORS)))
    return generator(config)


def add_measurement_error(dataset: FunctionalDataset, noise_var: float, seed: Seed) -> FunctionalDataset:
    """``W_il = Y_i(t_l) + e_il`` with ``e_il`` i.i.d. ``N(0, noise_var)``."""
    if not noise_var > 0:
        raise InvalidParameterError("noise_var must be positive, got {}".format(noise_var))
    errors = numpy.sqrt(noise_var) * _rng(seed).standard_normal(dataset.Y.shape)
    return dataset.with_responses(dataset.Y + errors)


def generate_measurement_error(config: MeasurementErrorConfig,
                               setting: str = "1") -> Tuple[FunctionalDataset, FunctionalDataset, GroundTruth]:
    """Returns the clean dataset, its contaminated copy and the ground truth."""
    clean, truth = generate(setting, config.base)
    contaminated = add_measurement_error(clean, config.noise_var, stream(config.seed, "measurement-error"))
    return clean, contaminated, truth
