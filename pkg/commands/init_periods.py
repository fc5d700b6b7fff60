"""`depts init-periods`: initialize periodic coefficients for every series."""

from __future__ import annotations

import argparse

import config
from commands.common import add_out_argument, add_split_arguments, load_dataset, split_from_args
from utils.constants import EXIT_OK
from utils.logging import period_logger as logger
from utils.periodicity import init_periods_many, save_coefficients


def register(subparsers) -> None:
    parser = subparsers.add_parser('init-periods', help='Initialize periodic coefficients (DCT + greedy DTW)')
    parser.add_argument('--data', required=True, help='Input CSV (series_id,t,value)')
    parser.add_argument('-K', '--K', dest='K', type=int, default=config.PERIOD_K,
                        help=f'Candidate atoms (default: {config.PERIOD_K})')
    parser.add_argument('-J', '--J', dest='J', type=int, default=config.PERIOD_J,
                        help=f'Atom budget (default: {config.PERIOD_J})')
    parser.add_argument('--no-refine', dest='refine', action='store_false', default=config.PERIOD_REFINE,
                        help='Use raw DCT atoms without least-squares refinement')
    add_split_arguments(parser)
    add_out_argument(parser, 'Output coefficient document (JSON)')
    parser.set_defaults(handler=cmd_init_periods)


def cmd_init_periods(args: argparse.Namespace) -> int:
    dataset, splits = load_dataset(args.data, split_from_args(args))
    entries = init_periods_many(dataset, splits, args.K, args.J, refine=args.refine)
    save_coefficients(entries, args.out)
    logger.info(f"Wrote coefficients for {len(entries)} series to {args.out}")
    return EXIT_OK
