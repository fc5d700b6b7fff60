"""
Uni-variate series containers, CSV ingestion, splitting and window sampling.

Series live on an integer global time axis: values[i] sits at t0 + i.
"""

from __future__ import annotations

import io
import logging
import os
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from utils.constants import CSV_COLUMNS, DEFAULT_TRAIN_FRACTION, DEFAULT_VAL_FRACTION
from utils.fileio import atomic_write_text
from utils.validation import DataError, validate_finite, validate_non_negative_int, validate_positive_int

logger = logging.getLogger('depts.timeseries')


def _frozen(values: np.ndarray) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True).ravel()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Series:
    """One named uni-variate series on an integer time axis."""
    id: str
    values: np.ndarray
    t0: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, 'values', _frozen(validate_finite(self.values, f"series {self.id!r}")))
        object.__setattr__(self, 't0', int(self.t0))

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def t_end(self) -> int:
        """Exclusive global end index."""
        return self.t0 + len(self)

    def time_index(self) -> np.ndarray:
        return np.arange(self.t0, self.t_end, dtype=np.int64)

    def window(self, start: int, end: int) -> np.ndarray:
        """Values at global indices [start, end)."""
        if start < self.t0 or end > self.t_end or start > end:
            raise DataError(f"Window [{start}, {end}) outside series {self.id!r} [{self.t0}, {self.t_end})")
        return self.values[start - self.t0:end - self.t0]

    def slice(self, start: int, end: int) -> Series:
        """Sub-series over global indices [start, end); may be empty."""
        return Series(self.id, self.window(start, end), start)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return self.id == other.id and self.t0 == other.t0 and np.array_equal(self.values, other.values)

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class SplitSpec:
    """Exclusive global end indices of the train, validation and test regions."""
    train_end: int
    val_end: int
    test_end: int

    def validate(self, series: Series) -> None:
        """Raise DataError unless t0 < train_end <= val_end <= test_end <= t0 + length."""
        if not (series.t0 < self.train_end <= self.val_end <= self.test_end <= series.t_end):
            raise DataError(
                f"Split {self.train_end}/{self.val_end}/{self.test_end} out of range for "
                f"series {series.id!r} covering [{series.t0}, {series.t_end})"
            )

    def to_dict(self) -> dict:
        return {'train_end': self.train_end, 'val_end': self.val_end, 'test_end': self.test_end}

    @classmethod
    def from_dict(cls, data: dict) -> SplitSpec:
        try:
            return cls(int(data['train_end']), int(data['val_end']), int(data['test_end']))
        except (KeyError, TypeError, ValueError) as e:
            raise DataError(f"Invalid split specification: {data!r}") from e


@dataclass(frozen=True)
class WindowSample:
    """One lookback/target pair anchored at global index `anchor`."""
    anchor: int
    lookback: np.ndarray
    target: np.ndarray
    series_index: int = 0


@dataclass(frozen=True)
class WindowBatch:
    """A batch of windows as stacked arrays (the training path)."""
    anchors: np.ndarray        # (B,) global anchor indices
    lookbacks: np.ndarray      # (B, L)
    targets: np.ndarray        # (B, H)
    series_index: np.ndarray   # (B,)
    lookback_len: int = field(default=0)

    def __len__(self) -> int:
        return int(self.anchors.size)


# =============================================================================
# CSV ingestion
# =============================================================================

def load_csv(path: str | os.PathLike) -> list[Series]:
    """
    Load a long-format CSV (series_id, t, value) into one Series per id.

    Series keep the order in which their ids first appear. Rows of a series
    must be sorted by t without gaps or duplicates.

    Raises:
        DataError: Missing file, missing columns, non-numeric values, gaps or duplicates
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"Data file not found: {path}")

    try:
        frame = pd.read_csv(path, dtype={'series_id': str}, encoding='utf-8')
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataError(f"Could not parse {path}: {e}") from e

    missing = [c for c in CSV_COLUMNS if c not in frame.columns]
    if missing:
        raise DataError(f"{path}: missing column(s) {', '.join(missing)}")
    if frame.empty:
        raise DataError(f"{path}: no rows")

    try:
        t_col = pd.to_numeric(frame['t'], errors='raise')
        v_col = pd.to_numeric(frame['value'], errors='raise')
    except (ValueError, TypeError) as e:
        raise DataError(f"{path}: non-numeric value ({e})") from e

    if not np.all(np.isfinite(t_col.to_numpy(dtype=np.float64))) or np.any(t_col % 1 != 0):
        raise DataError(f"{path}: t must be integer")

    frame = frame.assign(t=t_col.astype(np.int64), value=v_col.astype(np.float64))

    series: list[Series] = []
    for series_id, group in frame.groupby('series_id', sort=False):
        t = group['t'].to_numpy()
        steps = np.diff(t)
        if np.any(steps == 0):
            raise DataError(f"{path}: duplicate t in series {series_id!r} at t={int(t[np.flatnonzero(steps == 0)[0]])}")
        if np.any(steps != 1):
            bad = int(np.flatnonzero(steps != 1)[0])
            raise DataError(f"{path}: gap or unsorted t in series {series_id!r} between t={int(t[bad])} and t={int(t[bad + 1])}")
        try:
            series.append(Series(str(series_id), group['value'].to_numpy(), int(t[0])))
        except DataError as e:
            raise DataError(f"{path}: {e}") from e

    logger.info(f"Loaded {len(series)} series from {path}")
    return series


def series_to_frame(series: Sequence[Series]) -> pd.DataFrame:
    """Long-format frame of one or more series."""
    return pd.DataFrame({
        'series_id': np.concatenate([np.full(len(s), s.id, dtype=object) for s in series]) if series else [],
        't': np.concatenate([s.time_index() for s in series]) if series else [],
        'value': np.concatenate([s.values for s in series]) if series else [],
    }, columns=list(CSV_COLUMNS))


def frame_to_csv_text(frame: pd.DataFrame) -> str:
    """Render a frame as CSV with round-trippable floats."""
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format='%.17g', lineterminator='\n')
    return buffer.getvalue()


def write_csv(series: Sequence[Series], path: str | os.PathLike) -> Path:
    """Write series in the long CSV format (atomic overwrite)."""
    target = atomic_write_text(path, frame_to_csv_text(series_to_frame(series)))
    logger.info(f"Wrote {len(series)} series to {target}")
    return target


# =============================================================================
# Splitting
# =============================================================================

def split(series: Series, spec: SplitSpec) -> tuple[Series, Series, Series]:
    """Cut a series into contiguous train / validation / test sub-series."""
    spec.validate(series)
    return (
        series.slice(series.t0, spec.train_end),
        series.slice(spec.train_end, spec.val_end),
        series.slice(spec.val_end, spec.test_end),
    )


def default_split(series: Series) -> SplitSpec:
    """Split at 80% / 82% / 100% of the series length."""
    n = len(series)
    train_len = max(1, int(round(n * DEFAULT_TRAIN_FRACTION)))
    val_len = int(round(n * DEFAULT_VAL_FRACTION))
    train_end = series.t0 + min(train_len, n)
    val_end = min(train_end + val_len, series.t_end)
    return SplitSpec(train_end, val_end, series.t_end)


# =============================================================================
# Window sampling
# =============================================================================

def anchor_bounds(series: Series, lookback: int, horizon: int, horizon_len: int) -> tuple[int, int]:
    """
    Inclusive [low, high] range of valid anchors.

    An anchor t needs x[t-L:t] and x[t:t+H] inside the series, and is drawn
    from the most recent `horizon_len` points of it.

    Raises:
        DataError: If no anchor position is valid
    """
    lookback = validate_positive_int(lookback, 'lookback')
    horizon = validate_positive_int(horizon, 'horizon')
    horizon_len = validate_positive_int(horizon_len, 'training horizon')
    low = max(series.t0 + lookback, series.t_end - horizon_len)
    high = series.t_end - horizon
    if low > high:
        raise DataError(
            f"Series {series.id!r} of length {len(series)} has no valid anchor "
            f"for lookback={lookback}, horizon={horizon}, training horizon={horizon_len}"
        )
    return low, high


def sample_windows(
    series: Series,
    lookback: int,
    horizon: int,
    horizon_len: int,
    count: int,
    rng: np.random.Generator,
    series_index: int = 0,
) -> list[WindowSample]:
    """Draw `count` windows with anchors uniform over the valid range."""
    count = validate_non_negative_int(count, 'count')
    low, high = anchor_bounds(series, lookback, horizon, horizon_len)
    anchors = rng.integers(low, high + 1, size=count)
    samples = []
    for anchor in anchors.tolist():
        samples.append(WindowSample(
            anchor=anchor,
            lookback=series.window(anchor - lookback, anchor),
            target=series.window(anchor, anchor + horizon),
            series_index=series_index,
        ))
    return samples


def gather_windows(
    series: Sequence[Series],
    series_index: np.ndarray,
    anchors: np.ndarray,
    lookback: int,
    horizon: int,
) -> WindowBatch:
    """Stack lookback/target arrays for given (series, anchor) pairs."""
    series_index = np.asarray(series_index, dtype=np.int64)
    anchors = np.asarray(anchors, dtype=np.int64)
    lookbacks = np.empty((anchors.size, lookback))
    targets = np.empty((anchors.size, horizon))
    back_offsets = np.arange(-lookback, 0)
    fore_offsets = np.arange(horizon)
    for s in np.unique(series_index).tolist():
        rows = np.flatnonzero(series_index == s)
        positions = anchors[rows] - series[s].t0
        if positions.min() < lookback or positions.max() + horizon > len(series[s]):
            raise DataError(f"Window outside series {series[s].id!r}")
        lookbacks[rows] = series[s].values[positions[:, None] + back_offsets]
        targets[rows] = series[s].values[positions[:, None] + fore_offsets]
    return WindowBatch(anchors, lookbacks, targets, series_index, lookback)


def sample_batch(
    series: Sequence[Series],
    lookback: int,
    horizon: int,
    horizon_len: int,
    count: int,
    rng: np.random.Generator,
) -> WindowBatch:
    """Draw series uniformly, then anchors uniformly within each series' valid range."""
    bounds = np.array([anchor_bounds(s, lookback, horizon, horizon_len) for s in series], dtype=np.int64)
    series_index = rng.integers(0, len(series), size=count)
    anchors = rng.integers(bounds[series_index, 0], bounds[series_index, 1] + 1)
    return gather_windows(series, series_index, anchors, lookback, horizon)
