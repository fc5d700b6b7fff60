"""Helpers shared by the subcommands."""

from __future__ import annotations

import argparse
import os
from collections.abc import Sequence
from pathlib import Path

import pandas as pd

from utils.evaluation import ensemble_frames, rolling_forecast
from utils.fileio import atomic_write_text
from utils.timeseries import Series, SplitSpec, default_split, frame_to_csv_text, load_csv
from utils.training import TrainedModel
from utils.validation import DataError, UsageError


def add_seed_argument(parser: argparse.ArgumentParser, help_text: str = 'Random seed') -> None:
    parser.add_argument('--seed', type=int, default=None, help=help_text)


def add_out_argument(parser: argparse.ArgumentParser, help_text: str, required: bool = True) -> None:
    parser.add_argument('--out', required=required, help=help_text)


def parse_int_list(value: str) -> list[int]:
    """'2,3,4' -> [2, 3, 4]."""
    try:
        items = [int(v) for v in value.split(',') if v.strip()]
    except ValueError as e:
        raise UsageError(f"Expected comma-separated integers, got {value!r}") from e
    if not items:
        raise UsageError("Expected at least one integer")
    return items


def load_dataset(path: str | os.PathLike, split: SplitSpec | None = None) -> tuple[list[Series], list[SplitSpec]]:
    """Series from a CSV plus one split each (the given one or the default)."""
    dataset = load_csv(path)
    splits = [split if split is not None else default_split(s) for s in dataset]
    for series, spec in zip(dataset, splits):
        spec.validate(series)
    return dataset, splits


def select_series(dataset: Sequence[Series], series_id: str) -> Series:
    for series in dataset:
        if series.id == series_id:
            return series
    raise DataError(f"Series {series_id!r} not in dataset")


def member_name(model: TrainedModel) -> str:
    return f"member-L{model.config.lookback_multiplier}H-seed{model.config.seed}"


def forecast_frame(
    models: Sequence[TrainedModel],
    dataset: Sequence[Series],
    ranges: Sequence[tuple[int, int]],
) -> pd.DataFrame:
    """Median-ensembled rolling forecasts of every series over its range."""
    if not models:
        raise DataError("No models to forecast with")
    member_frames = []
    for model in models:
        frames = [rolling_forecast(model, s, start, end) for s, (start, end) in zip(dataset, ranges)]
        member_frames.append(pd.concat(frames, ignore_index=True))
    return ensemble_frames(member_frames)


def evaluation_ranges(dataset: Sequence[Series], splits: Sequence[SplitSpec]) -> list[tuple[int, int]]:
    ranges = []
    for series, spec in zip(dataset, splits):
        if spec.test_end <= spec.val_end:
            raise DataError(f"Series {series.id!r} has an empty test region")
        ranges.append((spec.val_end, spec.test_end))
    return ranges


def write_frame(frame: pd.DataFrame, path: str | os.PathLike) -> Path:
    return atomic_write_text(path, frame_to_csv_text(frame))


def add_split_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--train-end', type=int, help='Exclusive end of the training region (global t)')
    parser.add_argument('--val-end', type=int, help='Exclusive end of the validation region (global t)')
    parser.add_argument('--test-end', type=int, help='Exclusive end of the test region (global t)')


def split_from_args(args: argparse.Namespace) -> SplitSpec | None:
    """Explicit split when all three ends are given, else None (80/2/18 per series)."""
    ends = (args.train_end, args.val_end, args.test_end)
    if all(e is None for e in ends):
        return None
    if any(e is None for e in ends):
        raise UsageError("--train-end, --val-end and --test-end must be given together")
    return SplitSpec(*ends)
