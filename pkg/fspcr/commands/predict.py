"""
The ``predict`` subcommand applies a fitted model to new covariates and writes one predicted
curve per row. ``--data`` is either a dataset manifest, whose responses are ignored, or a
CSV file of covariates with a header row.

.. code-block:: bash

   $ python -m fspcr.run predict --model model.json --data data/test --out predictions.csv
"""
from typing import List
import argparse
import os

from fspcr.common.file_utils import (command_provenance, file_digest, read_matrix_csv, write_json,
                                     write_matrix_csv)
from fspcr.dataset_readers.manifest import ManifestReader
from fspcr.predictors.curve_predictor import CurvePredictor


def add_subparser(name: str,
                  subparsers: argparse._SubParsersAction,  # pylint: disable=protected-access
                  parents: List[argparse.ArgumentParser]) -> argparse.ArgumentParser:
    description = """Predict response curves for new covariates."""
    subparser = subparsers.add_parser(name, description=description, help="Predict response curves.",
                                      parents=parents)
    subparser.add_argument("--model", required=True, help="model JSON written by fit")
    subparser.add_argument("--data", required=True, help="dataset manifest, its directory, or a covariate CSV")
    subparser.add_argument("--out", required=True, help="output CSV of predicted curves")
    subparser.set_defaults(func=predict_from_args)
    return subparser


def predict_from_args(args: argparse.Namespace, num_jobs: int) -> None:  # pylint: disable=unused-argument
    predictor = CurvePredictor.from_path(args.model)
    if args.data.endswith(".csv"):
        X_new = read_matrix_csv(args.data)
    else:
        X_new = ManifestReader().read(args.data).uncentered().X
    curves = predictor.predict_matrix(X_new)
    grid = predictor.model.grid
    write_matrix_csv(args.out, curves, ["y{}".format(l + 1) for l in range(len(grid))])
    stamp = command_provenance("predict", {"model": file_digest(args.model)}, None)
    write_json(args.out + ".provenance.json", {"provenance": stamp, "model": os.path.basename(args.model)})
