"""`depts decompose`: dump the per-layer expansion terms of one window."""

from __future__ import annotations

import argparse

import numpy as np
import pandas as pd

from commands.common import add_out_argument, select_series, write_frame
from utils.constants import DECOMPOSITION_COLUMNS, EXIT_OK
from utils.logging import app_logger as logger
from utils.network import ForecastDecomposition
from utils.timeseries import load_csv
from utils.training import TrainedModel
from utils.validation import DataError


def register(subparsers) -> None:
    parser = subparsers.add_parser('decompose', help='Write the per-layer decomposition of one forecast window')
    parser.add_argument('--checkpoint', required=True, help='Checkpoint file')
    parser.add_argument('--data', required=True, help='Input CSV (series_id,t,value)')
    parser.add_argument('--series', required=True, help='Series id')
    parser.add_argument('--anchor', required=True, type=int, help='Forecast origin t (first forecast step)')
    add_out_argument(parser, 'Output CSV (series_id,layer,component,t,value)')
    parser.set_defaults(handler=cmd_decompose)


def decomposition_frame(series_id: str, anchor: int, lookback: int, decomposition: ForecastDecomposition) -> pd.DataFrame:
    """
    Long table of a single-window decomposition.

    Layer 0 holds the inputs (x, z) and the summed outputs; layers 1..N hold
    that layer's block inputs and u/v terms.
    """
    horizon = decomposition.total.size
    t_back = np.arange(anchor - lookback, anchor)
    t_fore = np.arange(anchor, anchor + horizon)
    t_all = np.arange(anchor - lookback, anchor + horizon)

    parts = []

    def add(layer: int, component: str, t: np.ndarray, values: np.ndarray) -> None:
        parts.append(pd.DataFrame({
            'series_id': series_id,
            'layer': layer,
            'component': component,
            't': t,
            'value': values,
        }))

    add(0, 'x_residue', t_back, decomposition.x_residue)
    add(0, 'z_residue', t_all, decomposition.z_residue)
    add(0, 'total', t_fore, decomposition.total)
    add(0, 'local_part', t_fore, decomposition.local_part)
    add(0, 'periodic_part', t_fore, decomposition.periodic_part)
    for i in range(decomposition.local_back.shape[0]):
        layer = i + 1
        add(layer, 'local_input', t_back, decomposition.local_inputs[i])
        add(layer, 'periodic_input', t_all, decomposition.periodic_inputs[i])
        add(layer, 'local_back', t_back, decomposition.local_back[i])
        add(layer, 'local_fore', t_fore, decomposition.local_fore[i])
        add(layer, 'periodic_back', t_back, decomposition.periodic_back[i])
        add(layer, 'periodic_fore', t_fore, decomposition.periodic_fore[i])
    return pd.concat(parts, ignore_index=True).loc[:, list(DECOMPOSITION_COLUMNS)]


def cmd_decompose(args: argparse.Namespace) -> int:
    model = TrainedModel.load(args.checkpoint)
    series = select_series(load_csv(args.data), args.series)
    L = model.params.lookback
    if args.anchor - L < series.t0 or args.anchor > series.t_end:
        raise DataError(f"Anchor {args.anchor} needs {L} points of history inside series {series.id!r}")

    decomposition = model.predict(model.series_index(series.id), series.window(args.anchor - L, args.anchor), args.anchor)
    frame = decomposition_frame(series.id, args.anchor, L, decomposition)
    write_frame(frame, args.out)
    logger.info(f"Wrote {len(frame)} decomposition rows to {args.out}")
    return EXIT_OK
