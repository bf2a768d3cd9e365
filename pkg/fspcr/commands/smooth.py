"""
The ``smooth`` subcommand replaces every response curve of a dataset by its cubic smoothing
spline fit, tuned per curve by generalized cross-validation unless ``--lambda-s`` fixes the
parameter. Next to the smoothed dataset it writes ``smoothing.csv`` with the parameter, GCV
score and effective degrees of freedom of every curve.

.. code-block:: bash

   $ python -m fspcr.run smooth --data data/train --out data/smoothed
"""
from typing import List
import argparse
import os

import numpy

from fspcr.common.file_utils import command_provenance, write_json, write_table_csv
from fspcr.data.smoothing import SmoothingSpline
from fspcr.dataset_readers.manifest import ManifestReader, write_dataset


def add_subparser(name: str,
                  subparsers: argparse._SubParsersAction,  # pylint: disable=protected-access
                  parents: List[argparse.ArgumentParser]) -> argparse.ArgumentParser:
    description = """Smooth the response curves of a dataset with GCV-tuned cubic splines."""
    subparser = subparsers.add_parser(name, description=description, help="Smooth response curves.",
                                      parents=parents)
    subparser.add_argument("--data", required=True, help="dataset manifest or its directory")
    subparser.add_argument("--out", required=True, help="output directory")
    subparser.add_argument("--lambda-s", type=float, default=None,
                           help="fixed smoothing parameter instead of GCV selection")
    subparser.set_defaults(func=smooth_from_args)
    return subparser


def smooth_from_args(args: argparse.Namespace, num_jobs: int) -> None:  # pylint: disable=unused-argument
    raw = ManifestReader().read(args.data).uncentered()
    fits = SmoothingSpline(raw.grid).smooth(raw.Y.T, args.lambda_s)
    smoothed = raw.with_responses(numpy.vstack([fit.fitted for fit in fits]))
    stamp = command_provenance("smooth", {"lambda_s": args.lambda_s}, None)
    write_dataset(args.out, smoothed, stamp)
    rows = [{"curve": i, "lambda_s": fit.lambda_s, "gcv": fit.gcv, "edf": fit.edf} for i, fit in enumerate(fits)]
    table_path = os.path.join(args.out, "smoothing.csv")
    write_table_csv(table_path, rows, ["curve", "lambda_s", "gcv", "edf"])
    write_json(table_path + ".provenance.json", {"provenance": stamp})
