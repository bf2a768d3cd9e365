import numpy
import pytest

from fspcr.data.dataset import FunctionalDataset, Grid, center
from fspcr.data.simulation import Setting1Config, generate_setting1


def random_spd(rng: numpy.random.Generator, p: int) -> numpy.ndarray:
    factor = rng.standard_normal((p, p))
    return factor @ factor.T / p + numpy.eye(p)


@pytest.fixture
def rng():
    return numpy.random.default_rng(12345)


@pytest.fixture
def small_setting1():
    """A small sparse-setting dataset and its truth."""
    return generate_setting1(Setting1Config(n=80, p=12, L=21, seed=3))


@pytest.fixture
def centered_small(small_setting1):
    dataset, _ = small_setting1
    centered, _, _ = center(dataset)
    return centered


@pytest.fixture
def linear_dataset(rng):
    """Noise-free responses ``Y = X b c(t)^T`` with a single true direction."""
    grid = Grid.uniform(11)
    X = rng.standard_normal((30, 5))
    direction = numpy.array([1.0, -1.0, 0.0, 0.0, 0.5])
    curve = numpy.sin(numpy.pi * grid.points) + 1.0
    return FunctionalDataset(X, numpy.outer(X @ direction, curve), grid), direction, curve
