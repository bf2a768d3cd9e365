"""
The ``fit`` subcommand fits one of the methods to a dataset and writes the model
JSON. The configuration file, when given, is the method block; its ``type`` key and the
``--method`` flag both select the method, the flag taking precedence.

.. code-block:: bash

   $ python -m fspcr.run fit --data data/train --method spcr --config experiments/spcr.json \\
         --seed 5 --out model.json
"""
from typing import List
import argparse
import logging

from fspcr.common.config import load_config, to_dict
from fspcr.common.file_utils import command_provenance
from fspcr.dataset_readers.manifest import ManifestReader
from fspcr.models import Method, available_methods, method_from_config
from fspcr.predictors.curve_predictor import save_model

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name


def add_subparser(name: str,
                  subparsers: argparse._SubParsersAction,  # pylint: disable=protected-access
                  parents: List[argparse.ArgumentParser]) -> argparse.ArgumentParser:
    description = """Fit a method to a dataset and write the model."""
    subparser = subparsers.add_parser(name, description=description, help="Fit a model.",
                                      parents=parents)
    subparser.add_argument("--data", required=True, help="dataset manifest or its directory")
    subparser.add_argument("--out", required=True, help="output model JSON")
    subparser.add_argument("--method", default=None,
                           help="method name: {}".format(", ".join(available_methods())))
    subparser.add_argument("--config", default=None, help="JSON file with the method configuration")
    subparser.add_argument("--seed", type=int, default=None, help="overrides the seed of the configuration")
    subparser.set_defaults(func=fit_from_args)
    return subparser


def method_from_args(args: argparse.Namespace) -> Method:
    settings = to_dict(load_config(args.config)) if args.config else {}
    if args.method is not None:
        settings["type"] = args.method
    if args.seed is not None:
        settings["seed"] = args.seed
    return method_from_config(settings)


def fit_from_args(args: argparse.Namespace, num_jobs: int) -> None:
    method = method_from_args(args)
    dataset = ManifestReader().read(args.data)
    model = method.fit(dataset, num_jobs=num_jobs)
    logger.info("%s selected K=%d, lambda=%s", model.method, model.k_star, model.lambda_star)
    settings = method.config_dict()
    save_model(args.out, model, command_provenance("fit", settings, settings.get("seed")))
