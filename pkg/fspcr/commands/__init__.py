from typing import Callable, Dict, List, Optional
import argparse
import logging
import sys

from fspcr.commands import evaluate, fit, predict, replicate, select_bandwidth, simulate, smooth
from fspcr.common.checks import ConfigurationError, NumericalError
from fspcr.common.file_utils import resolve_num_jobs

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
LOG_FORMAT = "%(asctime)s - %(levelname)s - %(name)s - %(message)s"

# Each adds its parser to the subparsers action and points its ``func`` default at the runner,
# which receives the parsed arguments and the resolved number of jobs.
SubParsers = argparse._SubParsersAction  # pylint: disable=protected-access
AddSubparser = Callable[[str, SubParsers, List[argparse.ArgumentParser]], argparse.ArgumentParser]

COMMANDS: Dict[str, AddSubparser] = {
        "simulate": simulate.add_subparser,
        "smooth": smooth.add_subparser,
        "select-bandwidth": select_bandwidth.add_subparser,
        "fit": fit.add_subparser,
        "predict": predict.add_subparser,
        "evaluate": evaluate.add_subparser,
        "replicate": replicate.add_subparser,
}


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """Raises on usage errors so they map to exit code 1."""
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError("{}: error: {}".format(self.prog, message))


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--num-jobs", type=int, default=None,
                        help="parallel workers (default: $FSPCR_NUM_JOBS, else every core)")
    common.add_argument("--log-level", default="INFO",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help="logging verbosity on stderr")
    return common


def main(argv: Optional[List[str]] = None,
         prog: Optional[str] = None,
         extra_commands: Optional[Dict[str, AddSubparser]] = None) -> int:
    """
    The :mod:`fspcr.run` command knows the subcommands in ``COMMANDS``; extra ones can be
    passed in ``extra_commands``. Returns the process exit code: 0 on success, 1 for
    usage and configuration errors, 2 for numerical failures.
    """
    parser = ArgumentParser(description="Supervised principal component regression for functional responses",
                            usage="%(prog)s", prog=prog)
    subparsers = parser.add_subparsers(title="Commands", metavar="", parser_class=ArgumentParser)

    commands = {**COMMANDS, **(extra_commands or {})}
    common = _common_flags()
    for name, add_subparser in commands.items():
        add_subparser(name, subparsers, [common])

    try:
        args = parser.parse_args(argv)
    except UsageError as error:
        print(error, file=sys.stderr)
        return EXIT_USAGE
    if "func" not in dir(args):
        parser.print_help()
        return EXIT_USAGE

    logging.basicConfig(format=LOG_FORMAT, level=getattr(logging, args.log_level), stream=sys.stderr)
    try:
        args.func(args, resolve_num_jobs(args.num_jobs))
    except ConfigurationError as error:
        logger.error("%s", error)
        return EXIT_USAGE
    except NumericalError as error:
        logger.error("%s", error)
        return EXIT_NUMERICAL
    return EXIT_OK
