"""
DEPTS command-line application.

Wires the subcommands together and maps failures to exit codes:
0 success, 1 usage, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence

import config
from commands import register_commands
from utils.constants import EXIT_DATA_ERROR, EXIT_NUMERICAL_ERROR, EXIT_OK, EXIT_USAGE
from utils.logging import app_logger, set_level
from utils.validation import DataError, NumericalError, UsageError


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser that raises UsageError instead of exiting."""

    def error(self, message: str):  # type: ignore[override]
        raise UsageError(message)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog='depts',
        description='DEPTS - periodic time-series forecasting',
        epilog='Environment variables: DEPTS_LOG_LEVEL, DEPTS_ITERATIONS, DEPTS_BATCH_SIZE, DEPTS_JOBS, ...'
    )
    parser.add_argument('--version', action='version', version=f'DEPTS v{config.VERSION}')
    parser.add_argument('-v', '--verbose', action='store_true', help='Log progress (INFO)')
    parser.add_argument('-d', '--debug', action='store_true', help='Log everything (DEBUG)')
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
    subparsers.required = True
    register_commands(subparsers)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Main entry point; returns the process exit code."""
    config.configure_logging()
    try:
        args = build_parser().parse_args(argv)
        if args.debug:
            set_level(logging.DEBUG)
        elif args.verbose:
            set_level(logging.INFO)
        return args.handler(args) or EXIT_OK
    except UsageError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as e:
        app_logger.debug("Numerical failure", exc_info=True)
        print(f"Numerical error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL_ERROR
    except (DataError, OSError) as e:
        app_logger.debug("Data failure", exc_info=True)
        print(f"Data error: {e}", file=sys.stderr)
        return EXIT_DATA_ERROR


if __name__ == '__main__':
    sys.exit(main())
