"""`depts eval`: nd / nrmse of a forecast file against the data."""

from __future__ import annotations

import argparse
from pathlib import Path

import pandas as pd

import config
from commands.common import add_out_argument
from utils.constants import EXIT_OK
from utils.evaluation import attach_actuals, build_report, format_report
from utils.fileio import atomic_write_json
from utils.logging import app_logger as logger
from utils.timeseries import load_csv
from utils.validation import DataError


def register(subparsers) -> None:
    parser = subparsers.add_parser('eval', help='Evaluate a forecast CSV')
    parser.add_argument('--forecast', required=True, help='Forecast CSV written by train or forecast')
    parser.add_argument('--data', required=True, help='Input CSV with the actual values')
    parser.add_argument('--horizon', type=int, default=config.HORIZON, help=f'Forecast horizon H (default: {config.HORIZON})')
    parser.add_argument('--members', type=int, default=1, help='Ensemble member count to record (default: 1)')
    add_out_argument(parser, 'Output report (JSON)', required=False)
    parser.set_defaults(handler=cmd_eval)


def cmd_eval(args: argparse.Namespace) -> int:
    path = Path(args.forecast)
    if not path.is_file():
        raise DataError(f"Forecast file not found: {path}")
    try:
        frame = pd.read_csv(path, dtype={'series_id': str})
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataError(f"Could not parse {path}: {e}") from e

    frame = attach_actuals(frame, load_csv(args.data))
    report = build_report(frame, args.horizon, args.members)
    print(format_report(report))

    if args.out:
        atomic_write_json(args.out, report.to_dict())
        logger.info(f"Wrote evaluation report to {args.out}")
    return EXIT_OK
