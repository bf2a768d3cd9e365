"""
The ``replicate`` subcommand runs the Monte Carlo comparison of methods and writes
``summary.csv`` (mean and standard error of every metric per method and size) and ``raw.csv``
(one row per replicate and method) into ``--out``.

.. code-block:: bash

   $ python -m fspcr.run replicate --setting 1 --n 100 --p 200 --R 50 \\
         --methods spcr,upcr,spcr-nopen --seed 11 --out results/sparse

A ``--config`` file holds a full harness configuration (``setting``, ``sizes``,
``replicates``, ``methods``, ``seed``, ``method_params``, ...); flags given on the command
line replace its entries. Several sizes are given as ``--n 100 500 --p 200 200``.
"""
from typing import Any, Dict, List
import argparse
import logging
import os

from fspcr.common.checks import InvalidParameterError
from fspcr.common.config import as_config, load_config, to_dict
from fspcr.common.file_utils import command_provenance, write_json, write_table_csv
from fspcr.training.harness import RAW_COLUMNS, SUMMARY_COLUMNS, HarnessConfig, replicate_harness, summary_table

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name


def add_subparser(name: str,
                  subparsers: argparse._SubParsersAction,  # pylint: disable=protected-access
                  parents: List[argparse.ArgumentParser]) -> argparse.ArgumentParser:
    description = """Compare methods over Monte Carlo replicates of a simulation setting."""
    subparser = subparsers.add_parser(name, description=description, help="Run the replicate harness.",
                                      parents=parents)
    subparser.add_argument("--config", default=None, help="JSON file with the harness configuration")
    subparser.add_argument("--setting", choices=["1", "2", "measurement"], default=None)
    subparser.add_argument("--n", type=int, nargs="+", default=None, help="sample sizes")
    subparser.add_argument("--p", type=int, nargs="+", default=None,
                           help="numbers of covariates, one per sample size or a single value for all")
    subparser.add_argument("--R", type=int, default=None, dest="replicates", help="number of replicates")
    subparser.add_argument("--methods", default=None, help="comma separated method names")
    subparser.add_argument("--seed", type=int, default=None, help="master seed")
    subparser.add_argument("--num-points", type=int, default=None, help="grid length")
    subparser.add_argument("--noise-var", type=float, default=None, help="measurement error variance")
    subparser.add_argument("--out", required=True, help="output directory")
    subparser.add_argument("--quiet", action="store_true", help="no progress bar")
    subparser.set_defaults(func=replicate_from_args)
    return subparser


def _sizes(n_values, p_values):
    if len(p_values) == 1:
        p_values = p_values * len(n_values)
    if len(p_values) != len(n_values):
        raise InvalidParameterError("--p needs one value or one per --n value, got {} for {}".format(len(p_values),
                                                                                                  len(n_values)))
    return [[n, p] for n, p in zip(n_values, p_values)]


def harness_settings(args: argparse.Namespace) -> Dict[str, Any]:
    """The configuration file, if any, with the command line flags laid over it."""
    settings = to_dict(load_config(args.config)) if args.config else {}
    if (args.n is None) != (args.p is None):
        raise InvalidParameterError("--n and --p must be given together")
    if args.n is not None:
        settings["sizes"] = _sizes(args.n, args.p)
    flags = {"setting": args.setting,
             "replicates": args.replicates,
             "seed": args.seed,
             "num_points": args.num_points,
             "noise_var": args.noise_var,
             "methods": None if args.methods is None else [m.strip() for m in args.methods.split(",") if m.strip()]}
    settings.update({key: value for key, value in flags.items() if value is not None})
    if "seed" not in settings:
        raise InvalidParameterError("replicate needs a master seed (--seed or 'seed' in the configuration)")
    return settings


def replicate_from_args(args: argparse.Namespace, num_jobs: int) -> None:
    settings = harness_settings(args)
    config = HarnessConfig.from_config(as_config(settings))
    summaries, raw = replicate_harness(config, num_jobs=num_jobs, quiet=args.quiet)
    stamp = command_provenance("replicate", settings, config.seed)
    summary_path = os.path.join(args.out, "summary.csv")
    raw_path = os.path.join(args.out, "raw.csv")
    write_table_csv(summary_path, summary_table(summaries, config.setting).to_dict("records"), SUMMARY_COLUMNS)
    write_table_csv(raw_path, raw.to_dict("records"), RAW_COLUMNS)
    for path in (summary_path, raw_path):
        write_json(path + ".provenance.json", {"provenance": stamp})
    logger.info("wrote %d summary rows to %s", len(summaries), summary_path)
