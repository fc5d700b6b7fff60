"""
Evaluation: nd / nrmse over the evaluation space, median ensembling,
rolling test forecasts and report rendering.

Forecast maps are pandas Series indexed by (series_id, t); plain dicts keyed
by (series_id, t) tuples are accepted too.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Union

import numpy as np
import pandas as pd

from utils.constants import FORECAST_COLUMNS
from utils.timeseries import Series
from utils.validation import DataError, NumericalError

if TYPE_CHECKING:
    from utils.training import TrainedModel

logger = logging.getLogger('depts.evaluation')

ForecastMap = Union[pd.Series, Mapping]


# =============================================================================
# Metrics
# =============================================================================

def _as_map(values: ForecastMap, name: str) -> pd.Series:
    if isinstance(values, pd.Series):
        series = values
    elif isinstance(values, Mapping):
        series = pd.Series(dict(values), dtype=np.float64)
    else:
        raise DataError(f"{name} must be a keyed map, got {type(values).__name__}")
    if series.index.has_duplicates:
        raise DataError(f"{name} has duplicate keys")
    return series.sort_index()


def _aligned(forecasts: ForecastMap, actuals: ForecastMap) -> tuple[np.ndarray, np.ndarray]:
    f = _as_map(forecasts, 'forecasts')
    a = _as_map(actuals, 'actuals')
    if len(f) != len(a) or not f.index.equals(a.index):
        raise DataError("Forecast and actual key sets differ")
    if len(a) == 0:
        raise DataError("Empty evaluation space")
    return f.to_numpy(dtype=np.float64), a.to_numpy(dtype=np.float64)


def nd(forecasts: ForecastMap, actuals: ForecastMap) -> float:
    """sum |x - xhat| / sum |x| over all keys."""
    f, a = _aligned(forecasts, actuals)
    denom = np.abs(a).sum()
    if denom == 0:
        raise NumericalError("nd is undefined: actuals sum to zero in absolute value")
    return float(np.abs(a - f).sum() / denom)


def nrmse(forecasts: ForecastMap, actuals: ForecastMap) -> float:
    """sqrt(mean (x - xhat)^2) / mean |x| over all keys."""
    f, a = _aligned(forecasts, actuals)
    denom = np.abs(a).mean()
    if denom == 0:
        raise NumericalError("nrmse is undefined: actuals have zero mean absolute value")
    return float(np.sqrt(np.mean((a - f) ** 2)) / denom)


def ensemble(member_forecasts: Sequence[ForecastMap]) -> pd.Series:
    """Pointwise median across members."""
    if len(member_forecasts) == 0:
        raise DataError("Cannot ensemble zero members")
    members = [_as_map(m, f'member {i}') for i, m in enumerate(member_forecasts)]
    index = members[0].index
    for i, m in enumerate(members[1:], start=1):
        if not m.index.equals(index):
            raise DataError(f"Member {i} has a different key set")
    stacked = np.stack([m.to_numpy(dtype=np.float64) for m in members])
    return pd.Series(np.median(stacked, axis=0), index=index)


# =============================================================================
# Forecast tables
# =============================================================================

def _frame_key(frame: pd.DataFrame) -> pd.DataFrame:
    missing = [c for c in FORECAST_COLUMNS if c not in frame.columns]
    if missing:
        raise DataError(f"Forecast table missing column(s) {', '.join(missing)}")
    frame = frame.loc[:, list(FORECAST_COLUMNS)].copy()
    frame['series_id'] = frame['series_id'].astype(str)
    frame = frame.sort_values(['series_id', 't'], kind='stable').reset_index(drop=True)
    if frame.duplicated(['series_id', 't']).any():
        raise DataError("Forecast table has duplicate (series_id, t) rows")
    return frame


def forecast_map(frame: pd.DataFrame, column: str = 'forecast') -> pd.Series:
    """(series_id, t) -> column."""
    return frame.set_index(['series_id', 't'])[column].astype(np.float64)


def ensemble_frames(frames: Sequence[pd.DataFrame]) -> pd.DataFrame:
    """
    Median-ensemble forecast tables.

    The forecast is the pointwise median; local and periodic parts come from
    the median member (the mean of the two middle members for an even count),
    so forecast = local_part + periodic_part still holds per row.
    """
    if len(frames) == 0:
        raise DataError("Cannot ensemble zero members")
    tables = [_frame_key(f) for f in frames]
    keys = tables[0][['series_id', 't']]
    for i, table in enumerate(tables[1:], start=1):
        if not table[['series_id', 't']].equals(keys):
            raise DataError(f"Member {i} has a different key set")

    forecast = np.stack([t['forecast'].to_numpy(dtype=np.float64) for t in tables])
    local = np.stack([t['local_part'].to_numpy(dtype=np.float64) for t in tables])
    periodic = np.stack([t['periodic_part'].to_numpy(dtype=np.float64) for t in tables])

    count = len(tables)
    order = np.argsort(forecast, axis=0, kind='stable')
    middle = [order[(count - 1) // 2], order[count // 2]]
    cols = np.arange(forecast.shape[1])

    result = tables[0][['series_id', 't', 'actual']].copy()
    result['forecast'] = np.median(forecast, axis=0)
    result['local_part'] = 0.5 * (local[middle[0], cols] + local[middle[1], cols])
    result['periodic_part'] = 0.5 * (periodic[middle[0], cols] + periodic[middle[1], cols])
    return result.loc[:, list(FORECAST_COLUMNS)]


def rolling_anchors(start: int, end: int, horizon: int) -> list[tuple[int, int]]:
    """
    Non-overlapping H-step windows covering [start, end).

    Returns (anchor, first kept t) pairs; the last window is anchored at
    end - H and keeps only what earlier windows did not cover.
    """
    if end <= start:
        raise DataError(f"Empty evaluation range [{start}, {end})")
    windows = []
    anchor = start
    while anchor + horizon <= end:
        windows.append((anchor, anchor))
        anchor += horizon
    if anchor < end:
        windows.append((end - horizon, anchor))
    return windows


def rolling_forecast(model: TrainedModel, series: Series, start: int, end: int) -> pd.DataFrame:
    """Forecast [start, end) window by window from true history."""
    L, H = model.params.lookback, model.params.horizon
    index = model.series_index(series.id)
    windows = rolling_anchors(start, end, H)
    if windows[0][0] - L < series.t0 or windows[-1][0] - L < series.t0:
        raise DataError(f"Series {series.id!r} lacks {L} points of history before t={min(w[0] for w in windows)}")
    if end > series.t_end:
        raise DataError(f"Evaluation end {end} is past the end of series {series.id!r}")

    anchors = np.array([a for a, _ in windows])
    lookbacks = np.stack([series.window(a - L, a) for a in anchors])
    decomposition = model.predict(index, lookbacks, anchors)

    rows = []
    for w, (anchor, keep_from) in enumerate(windows):
        t = np.arange(anchor, anchor + H)
        keep = t >= keep_from
        rows.append(pd.DataFrame({
            'series_id': series.id,
            't': t[keep],
            'actual': series.window(anchor, anchor + H)[keep],
            'forecast': decomposition.total[w][keep],
            'local_part': decomposition.local_part[w][keep],
            'periodic_part': decomposition.periodic_part[w][keep],
        }))
    return pd.concat(rows, ignore_index=True).loc[:, list(FORECAST_COLUMNS)]


def attach_actuals(frame: pd.DataFrame, dataset: Sequence[Series]) -> pd.DataFrame:
    """Replace the actual column with values looked up in `dataset`."""
    frame = _frame_key(frame)
    by_id = {s.id: s for s in dataset}
    actual = np.empty(len(frame))
    for series_id, rows in frame.groupby('series_id', sort=False).groups.items():
        if series_id not in by_id:
            raise DataError(f"Forecast for unknown series {series_id!r}")
        series = by_id[series_id]
        t = frame.loc[rows, 't'].to_numpy(dtype=np.int64)
        if t.min() < series.t0 or t.max() >= series.t_end:
            raise DataError(f"Forecast times outside series {series_id!r}")
        actual[frame.index.get_indexer(rows)] = series.values[t - series.t0]
    return frame.assign(actual=actual)


# =============================================================================
# Reports
# =============================================================================

@dataclass
class EvalReport:
    """Aggregate and per-series metrics of one forecast table."""
    nd: float
    nrmse: float
    horizon: int
    members: int
    points: int
    per_series: dict[str, dict] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            'nd': self.nd,
            'nrmse': self.nrmse,
            'horizon': self.horizon,
            'members': self.members,
            'points': self.points,
            'mean_series_nd': self.mean_series_nd,
            'per_series': self.per_series,
        }

    @property
    def mean_series_nd(self) -> float | None:
        values = [v['nd'] for v in self.per_series.values() if v['nd'] is not None]
        return float(np.mean(values)) if values else None


def build_report(frame: pd.DataFrame, horizon: int, members: int = 1) -> EvalReport:
    """Metrics over the whole table (the headline) and per series."""
    frame = _frame_key(frame)
    forecasts = forecast_map(frame, 'forecast')
    actuals = forecast_map(frame, 'actual')

    per_series: dict[str, dict] = {}
    for series_id, group in frame.groupby('series_id', sort=True):
        f = forecast_map(group, 'forecast')
        a = forecast_map(group, 'actual')
        entry: dict = {'points': int(len(group))}
        for name, metric in (('nd', nd), ('nrmse', nrmse)):
            try:
                entry[name] = metric(f, a)
            except NumericalError:
                entry[name] = None
        per_series[str(series_id)] = entry

    return EvalReport(
        nd=nd(forecasts, actuals),
        nrmse=nrmse(forecasts, actuals),
        horizon=int(horizon),
        members=int(members),
        points=int(len(frame)),
        per_series=per_series,
    )


def _fmt(value: float | None) -> str:
    return 'n/a' if value is None else f"{value:.6f}"


def format_report(report: EvalReport) -> str:
    """Human-readable summary table."""
    lines = []
    lines.append(f"Forecast evaluation ({report.points} points, H={report.horizon}, members={report.members})")
    lines.append("")
    lines.append(f"  nd:    {_fmt(report.nd)}")
    lines.append(f"  nrmse: {_fmt(report.nrmse)}")
    lines.append(f"  mean per-series nd: {_fmt(report.mean_series_nd)}")
    lines.append("")

    if report.per_series:
        width = max(9, *(len(s) for s in report.per_series))
        lines.append(f"  {'series_id':<{width}}  {'points':>7}  {'nd':>10}  {'nrmse':>10}")
        for series_id, entry in report.per_series.items():
            lines.append(
                f"  {series_id:<{width}}  {entry['points']:>7}  "
                f"{_fmt(entry['nd']):>10}  {_fmt(entry['nrmse']):>10}"
            )
    return "\n".join(lines)
