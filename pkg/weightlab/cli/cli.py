from __future__ import annotations

import argparse
import logging
from typing import Optional, Sequence

from weightlab._version import __version__
from weightlab.cli.ap import create_ap_parser
from weightlab.cli.duality import create_duality_parser
from weightlab.cli.extrapolate import create_extrapolate_parser
from weightlab.cli.intop import create_intop_parser
from weightlab.cli.kernel_check import create_kernel_check_parser
from weightlab.cli.lsbound import create_lsbound_parser
from weightlab.cli.maximal import create_maximal_parser
from weightlab.cli.suite import create_suite_parser
from weightlab.cli.utils import configure_threads
from weightlab.core.utils import DomainError, JSONParseError, PropertyCheckError

# exit codes
SUCCESS = 0
CHECK_FAILED = 1
USAGE = 2


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='weightlab',
        description='Numerical lab for weighted norm inequalities',
        formatter_class=argparse.RawTextHelpFormatter,
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    parser.add_argument(
        '-v', '--verbose', action='count', default=0, help="""more logging"""
    )

    subparsers = parser.add_subparsers()

    create_ap_parser(subparsers)

    create_maximal_parser(subparsers)

    create_kernel_check_parser(subparsers)

    create_lsbound_parser(subparsers)

    create_extrapolate_parser(subparsers)

    create_intop_parser(subparsers)

    create_duality_parser(subparsers)

    create_suite_parser(subparsers)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run a weightlab command and return its exit code: 0 when every check
    passes, 1 when a property check fails and 2 on bad input."""
    parser = create_parser()
    try:
        arg = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code is None else e.code

    logging.basicConfig(format='%(levelname)s: %(message)s')
    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(arg.verbose, 2)]
    logging.getLogger('weightlab').setLevel(level)

    if not hasattr(arg, "func"):
        parser.print_help()
        return USAGE

    try:
        configure_threads()
        return arg.func(arg)
    except PropertyCheckError as error:
        logging.error('check failed: %s', error)
        return CHECK_FAILED
    except (JSONParseError, DomainError) as error:
        logging.error(error)
        return USAGE
    except OSError as error:
        logging.error(error)
        return USAGE


if __name__ == "__main__":
    raise SystemExit(main())
