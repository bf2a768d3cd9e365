"""
The ``evaluate`` subcommand scores a fitted model on a test dataset. It always reports the
mean integrated squared prediction error; given the ``truth.json`` of a simulated dataset with
known directions it also reports the projection loss and the aligned (1,2)-norm error of the
leading directions.

.. code-block:: bash

   $ python -m fspcr.run evaluate --model model.json --data data/test \\
         --truth data/test/truth.json --out metrics.json
"""
from typing import List
import argparse

from fspcr.common.file_utils import command_provenance, file_digest, write_json
from fspcr.dataset_readers.manifest import ManifestReader, read_truth
from fspcr.predictors.curve_predictor import load_model
from fspcr.training.metrics.prediction import prediction_error
from fspcr.training.metrics.subspace import aligned_direction_error, projection_loss


def add_subparser(name: str,
                  subparsers: argparse._SubParsersAction,  # pylint: disable=protected-access
                  parents: List[argparse.ArgumentParser]) -> argparse.ArgumentParser:
    description = """Score a fitted model on a test dataset."""
    subparser = subparsers.add_parser(name, description=description, help="Evaluate a model.",
                                      parents=parents)
    subparser.add_argument("--model", required=True, help="model JSON written by fit")
    subparser.add_argument("--data", required=True, help="test dataset manifest or its directory")
    subparser.add_argument("--truth", default=None, help="truth.json of the simulated dataset")
    subparser.add_argument("--out", required=True, help="output metrics JSON")
    subparser.set_defaults(func=evaluate_from_args)
    return subparser


def evaluate_from_args(args: argparse.Namespace, num_jobs: int) -> None:  # pylint: disable=unused-argument
    model = load_model(args.model)
    test = ManifestReader().read(args.data)
    metrics = {"prediction_error": prediction_error(model, test),
               "k_hat": model.k_star,
               "num_test_curves": test.num_samples}
    if args.truth is not None:
        truth = read_truth(args.truth)
        if truth.v_star is not None:
            estimate = model.leading_directions(truth.true_dimension).columns
            metrics["projection_loss"] = projection_loss(estimate, truth.v_star.columns)
            metrics["direction_error"] = aligned_direction_error(estimate, truth.v_star.columns)
    stamp = command_provenance("evaluate", {"model": file_digest(args.model)}, None)
    write_json(args.out, {**metrics, "provenance": stamp})
