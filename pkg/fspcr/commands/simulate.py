"""
The ``simulate`` subcommand draws a dataset from one of the simulation settings and writes it
as a manifest with CSV matrices, together with ``truth.json``.

.. code-block:: bash

   $ python -m fspcr.run simulate --setting 1 --n 100 --p 200 --seed 7 --out data/train

The ``measurement`` setting writes the contaminated curves to ``--out`` and the curves
before contamination to ``<out>/clean``.
"""
from typing import Any, Dict, List
import argparse
import logging
import os

from fspcr.common.config import as_config, load_config, to_dict
from fspcr.common.file_utils import command_provenance
from fspcr.data.simulation import CONFIGS, MeasurementErrorConfig, generate, generate_measurement_error
from fspcr.dataset_readers.manifest import write_dataset, write_truth

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name


def add_subparser(name: str,
                  subparsers: argparse._SubParsersAction,  # pylint: disable=protected-access
                  parents: List[argparse.ArgumentParser]) -> argparse.ArgumentParser:
    description = """Draw a simulated dataset and write it with its ground truth."""
    subparser = subparsers.add_parser(name, description=description, help="Draw a simulated dataset.",
                                      parents=parents)
    subparser.add_argument("--setting", required=True, choices=["1", "2", "measurement"])
    subparser.add_argument("--n", type=int, required=True, help="sample size")
    subparser.add_argument("--p", type=int, required=True, help="number of covariates")
    subparser.add_argument("--seed", type=int, required=True)
    subparser.add_argument("--out", required=True, help="output directory")
    subparser.add_argument("--num-points", type=int, default=None,
                           help="grid length (default: 101, or 1000 for the measurement setting)")
    subparser.add_argument("--noise-var", type=float, default=1.0,
                           help="measurement error variance (measurement setting only)")
    subparser.add_argument("--config", default=None,
                           help="JSON file with extra generator settings such as rho or gp_scale")
    subparser.set_defaults(func=simulate_from_args)
    return subparser


def simulate_from_args(args: argparse.Namespace, num_jobs: int) -> None:  # pylint: disable=unused-argument
    extra: Dict[str, Any] = to_dict(load_config(args.config)) if args.config else {}
    measurement = args.setting == "measurement"
    num_points = args.num_points or (1000 if measurement else 101)
    block = as_config({**extra, "n": args.n, "p": args.p, "L": num_points, "seed": args.seed})
    config = CONFIGS["1" if measurement else args.setting].from_config(block)
    settings = {"setting": args.setting, "n": config.n, "p": config.p, "L": config.L,
                "rho": config.rho, "gp_scale": config.gp_scale, "noise": config.noise}
    if measurement:
        settings["noise_var"] = args.noise_var
    stamp = command_provenance("simulate", settings, args.seed)

    if measurement:
        clean, contaminated, truth = generate_measurement_error(
                MeasurementErrorConfig(base=config, noise_var=args.noise_var, seed=args.seed))
        write_dataset(args.out, contaminated, stamp)
        write_dataset(os.path.join(args.out, "clean"), clean, stamp)
    else:
        dataset, truth = generate(args.setting, config)
        write_dataset(args.out, dataset, stamp)
    write_truth(args.out, truth, stamp)
