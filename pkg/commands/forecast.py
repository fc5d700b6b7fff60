"""`depts forecast`: ensembled rolling forecasts from saved checkpoints."""

from __future__ import annotations

import argparse

from commands.common import (
    add_out_argument,
    add_split_arguments,
    evaluation_ranges,
    forecast_frame,
    load_dataset,
    split_from_args,
    write_frame,
)
from utils.constants import EXIT_OK
from utils.logging import app_logger as logger
from utils.training import TrainedModel


def register(subparsers) -> None:
    parser = subparsers.add_parser('forecast', help='Forecast the test region with one or more checkpoints')
    parser.add_argument('--checkpoint', required=True, nargs='+', help='Checkpoint file(s); several are median-ensembled')
    parser.add_argument('--data', required=True, help='Input CSV (series_id,t,value)')
    add_split_arguments(parser)
    add_out_argument(parser, 'Output forecast CSV')
    parser.set_defaults(handler=cmd_forecast)


def cmd_forecast(args: argparse.Namespace) -> int:
    models = [TrainedModel.load(path) for path in args.checkpoint]
    dataset, splits = load_dataset(args.data, split_from_args(args))
    frame = forecast_frame(models, dataset, evaluation_ranges(dataset, splits))
    write_frame(frame, args.out)
    logger.info(f"Wrote {len(frame)} forecast rows from {len(models)} member(s) to {args.out}")
    return EXIT_OK
