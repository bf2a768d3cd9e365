from typing import Any, Dict, Optional
import logging
import os

import numpy
import tqdm

from fspcr.common.checks import ConfigurationError, DimensionError, MissingFileError
from fspcr.common.file_utils import read_json, read_matrix_csv, write_json, write_matrix_csv
from fspcr.data.dataset import FunctionalDataset, Grid
from fspcr.data.simulation import GroundTruth
from fspcr.solvers.directions import DirectionMatrix

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name

MANIFEST_NAME = "manifest.json"
TRUTH_NAME = "truth.json"
# Column means of a dataset flagged as centered must vanish to this absolute tolerance.
CENTERING_TOLERANCE = 1e-10


class ManifestReader:
    """
    Reads a dataset described by a JSON manifest of the form

        {"x": "X.csv", "y": "Y.csv", "grid": "grid.csv", "centered": false, "provenance": {...}}

    Each of ``x``, ``y`` and ``grid`` names a CSV file with a header row and a numeric body;
    ``grid.csv`` holds a single column of time points. Relative paths resolve against the
    directory of the manifest. The provenance block is optional and ignored.

    The result of ``read`` is a :class:`FunctionalDataset`. A dataset flagged ``centered`` is
    checked to have vanishing column means; its means are recorded as zero.

    Parameters
    ----------
    quiet : ``bool``, optional (default = False)
        Disables the progress bar over the files being read.
    """
    def __init__(self, quiet: bool = False) -> None:
        self._quiet = quiet

    def read(self, path: str) -> FunctionalDataset:
        if os.path.isdir(path):
            path = os.path.join(path, MANIFEST_NAME)
        manifest = read_json(path)
        directory = os.path.dirname(os.path.abspath(path))
        matrices = {}
        for key in tqdm.tqdm(("x", "y", "grid"), disable=True if self._quiet else None):
            if key not in manifest:
                raise ConfigurationError("manifest {} does not name a '{}' file".format(path, key))
            file_path = os.path.join(directory, manifest[key])
            if not os.path.exists(file_path):
                raise MissingFileError("{} file of manifest {} not found: {}".format(key, path, file_path))
            matrices[key] = read_matrix_csv(file_path)
        return self.matrices_to_dataset(matrices["x"], matrices["y"], matrices["grid"],
                                        bool(manifest.get("centered", False)))

    def matrices_to_dataset(self,
                            X: numpy.ndarray,
                            Y: numpy.ndarray,
                            grid_column: numpy.ndarray,
                            centered: bool = False) -> FunctionalDataset:
        if grid_column.ndim == 2 and grid_column.shape[1] != 1:
            raise DimensionError("grid file must have a single column, got {}".format(grid_column.shape[1]))
        grid = Grid(numpy.ravel(grid_column))
        dataset = FunctionalDataset(X, Y, grid)
        if not centered:
            return dataset
        largest = max(numpy.abs(dataset.X.mean(axis=0)).max(initial=0.0),
                      numpy.abs(dataset.Y.mean(axis=0)).max(initial=0.0))
        if largest > CENTERING_TOLERANCE:
            raise ConfigurationError("dataset is flagged centered but has a column mean of {:g}".format(largest))
        return FunctionalDataset(dataset.X, dataset.Y, grid, centered=True)


def write_dataset(directory: str,
                  dataset: FunctionalDataset,
                  provenance: Optional[Dict[str, Any]] = None) -> str:
    """
    Writes ``X.csv``, ``Y.csv``, ``grid.csv`` and the manifest into ``directory`` and returns
    the manifest path. Centered datasets are written on their original scale.
    """
    raw = dataset.uncentered()
    write_matrix_csv(os.path.join(directory, "X.csv"), raw.X,
                     ["x{}".format(j + 1) for j in range(raw.num_covariates)])
    write_matrix_csv(os.path.join(directory, "Y.csv"), raw.Y,
                     ["y{}".format(l + 1) for l in range(len(raw.grid))])
    write_matrix_csv(os.path.join(directory, "grid.csv"), raw.grid.points[:, numpy.newaxis], ["t"])
    manifest = {"x": "X.csv", "y": "Y.csv", "grid": "grid.csv", "centered": False}
    if provenance is not None:
        manifest["provenance"] = provenance
    path = os.path.join(directory, MANIFEST_NAME)
    write_json(path, manifest)
    logger.info("wrote %d samples with %d covariates on %d grid points to %s",
                raw.num_samples, raw.num_covariates, len(raw.grid), directory)
    return path


def truth_to_dict(truth: GroundTruth) -> Dict[str, Any]:
    document = {"beta": truth.beta, "sigma_x": truth.sigma_x}
    if truth.v_star is not None:
        document["v_star"] = truth.v_star.columns
        document["gamma"] = truth.gamma
    return document


def truth_from_dict(document: Dict[str, Any]) -> GroundTruth:
    try:
        beta = numpy.asarray(document["beta"], dtype=float)
        sigma_x = numpy.asarray(document["sigma_x"], dtype=float)
    except KeyError as error:
        raise ConfigurationError("truth document is missing the field {}".format(error))
    v_star = document.get("v_star")
    gamma = document.get("gamma")
    return GroundTruth(beta=beta,
                       sigma_x=sigma_x,
                       v_star=None if v_star is None else DirectionMatrix(numpy.asarray(v_star, dtype=float)),
                       gamma=None if gamma is None else numpy.asarray(gamma, dtype=float))


def write_truth(directory: str, truth: GroundTruth, provenance: Optional[Dict[str, Any]] = None) -> str:
    document = truth_to_dict(truth)
    if provenance is not None:
        document["provenance"] = provenance
    path = os.path.join(directory, TRUTH_NAME)
    write_json(path, document)
    return path


def read_truth(path: str) -> GroundTruth:
    return truth_from_dict(read_json(path))
