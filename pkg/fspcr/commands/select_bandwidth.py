"""
The ``select-bandwidth`` subcommand runs the split-sample bandwidth selection on the centered
covariates of a dataset and writes the selected bandwidth with its risk curve.

.. code-block:: bash

   $ python -m fspcr.run select-bandwidth --data data/train --seed 3 --out bandwidth.json
"""
from typing import List
import argparse
from dataclasses import asdict

from fspcr.common.config import as_config, load_config, to_dict
from fspcr.common.file_utils import command_provenance, write_json
from fspcr.data.dataset import center
from fspcr.dataset_readers.manifest import ManifestReader
from fspcr.linalg.covariance import BandSelectConfig, select_bandwidth


def add_subparser(name: str,
                  subparsers: argparse._SubParsersAction,  # pylint: disable=protected-access
                  parents: List[argparse.ArgumentParser]) -> argparse.ArgumentParser:
    description = """Select the covariance bandwidth by random sample splitting."""
    subparser = subparsers.add_parser(name, description=description, help="Select the covariance bandwidth.",
                                      parents=parents)
    subparser.add_argument("--data", required=True, help="dataset manifest or its directory")
    subparser.add_argument("--out", required=True, help="output JSON file")
    subparser.add_argument("--seed", type=int, default=None, help="overrides the seed of the configuration")
    subparser.add_argument("--config", default=None,
                           help="JSON file with n_splits, n1, candidate_bandwidths and seed")
    subparser.set_defaults(func=select_bandwidth_from_args)
    return subparser


def select_bandwidth_from_args(args: argparse.Namespace, num_jobs: int) -> None:  # pylint: disable=unused-argument
    settings = to_dict(load_config(args.config)) if args.config else {}
    if args.seed is not None:
        settings["seed"] = args.seed
    config = BandSelectConfig.from_config(as_config(settings))
    centered, _, _ = center(ManifestReader().read(args.data))
    bandwidth, risks = select_bandwidth(centered.X, config)
    write_json(args.out, {"bandwidth": bandwidth,
                          "candidates": [int(b) for b in risks.index],
                          "risks": risks.to_numpy(),
                          "provenance": command_provenance("select-bandwidth", asdict(config), config.seed)})
