"""
Helpers for reading and writing the on-disk formats: CSV matrices, JSON documents and their
provenance block. Every write goes to a temporary file in the target directory first and is
then renamed into place.
"""
from typing import Any, Dict, List, Optional, Sequence
import contextlib
import hashlib
import json
import logging
import os
import tempfile

import numpy
import pandas

from fspcr.common.checks import ConfigurationError, MissingFileError
from fspcr.common.config import config_hash

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name

FLOAT_FORMAT = "%.17g"
NUM_JOBS_ENVIRONMENT_VARIABLE = "FSPCR_NUM_JOBS"


@contextlib.contextmanager
def atomic_open(path: str, mode: str = "w"):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    handle, temp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(handle, mode, newline="" if "b" not in mode else None) as temp_file:
            yield temp_file
        os.replace(temp_path, path)
    except BaseException:
        if os.path.exists(temp_path):
            os.remove(temp_path)
        raise


def write_matrix_csv(path: str, matrix: numpy.ndarray, header: Sequence[str]) -> None:
    matrix = numpy.atleast_2d(numpy.asarray(matrix, dtype=float))
    if matrix.shape[1] != len(header):
        raise ConfigurationError("header has {} names but matrix has {} columns".format(len(header),
                                                                                        matrix.shape[1]))
    frame = pandas.DataFrame(matrix, columns=list(header))
    with atomic_open(path) as csv_file:
        frame.to_csv(csv_file, index=False, float_format=FLOAT_FORMAT)


def write_table_csv(path: str, rows: List[Dict[str, Any]], columns: Sequence[str]) -> None:
    frame = pandas.DataFrame(rows, columns=list(columns))
    with atomic_open(path) as csv_file:
        frame.to_csv(csv_file, index=False, float_format=FLOAT_FORMAT)


def read_matrix_csv(path: str) -> numpy.ndarray:
    if not os.path.exists(path):
        raise MissingFileError("file not found: {}".format(path))
    frame = pandas.read_csv(path, header=0, float_precision="round_trip")
    try:
        return frame.to_numpy(dtype=float)
    except ValueError as error:
        raise ConfigurationError("{} has non-numeric entries: {}".format(path, error))


def write_json(path: str, document: Dict[str, Any]) -> None:
    with atomic_open(path) as json_file:
        json.dump(_jsonable(document), json_file, indent=2, sort_keys=True)
        json_file.write("\n")


def read_json(path: str) -> Dict[str, Any]:
    if not os.path.exists(path):
        raise MissingFileError("file not found: {}".format(path))
    with open(path) as json_file:
        try:
            return json.load(json_file)
        except json.JSONDecodeError as error:
            raise ConfigurationError("{} is not valid JSON: {}".format(path, error))


def provenance(config: Dict[str, Any], seed: Optional[int]) -> Dict[str, Any]:
    return {"config_hash": config_hash(config), "seed": seed}


def command_provenance(command: str, settings: Dict[str, Any], seed: Optional[int]) -> Dict[str, Any]:
    """Provenance block over a command name and its effective settings."""
    return provenance({"command": command, **settings}, seed)


def file_digest(path: str) -> str:
    with open(path, "rb") as input_file:
        return hashlib.sha256(input_file.read()).hexdigest()


def resolve_num_jobs(requested: Optional[int] = None) -> int:
    """Explicit request, else ``FSPCR_NUM_JOBS``, else every available core."""
    if requested is not None:
        num_jobs = int(requested)
    elif os.environ.get(NUM_JOBS_ENVIRONMENT_VARIABLE):
        num_jobs = int(os.environ[NUM_JOBS_ENVIRONMENT_VARIABLE])
    else:
        num_jobs = os.cpu_count() or 1
    if num_jobs < 1:
        raise ConfigurationError("number of jobs must be at least 1, got {}".format(num_jobs))
    return num_jobs


def _jsonable(value: Any) -> Any:
    # Python floats round-trip through repr, which json uses, so no precision is lost here.
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if isinstance(value, numpy.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, numpy.integer):
        return int(value)
    if isinstance(value, numpy.floating):
        return float(value)
    if isinstance(value, numpy.bool_):
        return bool(value)
    return value
