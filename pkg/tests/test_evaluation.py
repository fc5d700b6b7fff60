"""Tests for metrics, ensembling, rolling forecasts and reports."""

import json

import numpy as np
import pandas as pd
import pytest

from utils.evaluation import (
    EvalReport,
    attach_actuals,
    build_report,
    ensemble,
    ensemble_frames,
    format_report,
    nd,
    nrmse,
    rolling_anchors,
    rolling_forecast,
)
from utils.periodicity import init_periods_many
from utils.timeseries import Series, SplitSpec
from utils.training import TrainingConfig, train
from utils.validation import DataError, NumericalError


def _keyed(values, series_id='a'):
    return {(series_id, t): float(v) for t, v in enumerate(values)}


def _frame(forecast, actual, series_id='a', local=None):
    forecast = np.asarray(forecast, dtype=float)
    local = forecast / 2 if local is None else np.asarray(local, dtype=float)
    return pd.DataFrame({
        'series_id': series_id,
        't': np.arange(len(forecast)),
        'actual': np.asarray(actual, dtype=float),
        'forecast': forecast,
        'local_part': local,
        'periodic_part': forecast - local,
    })


class TestMetrics:
    """Tests for nd and nrmse."""

    def test_perfect(self):
        actual = _keyed([1, 2, 3])
        assert nd(actual, actual) == 0.0
        assert nrmse(actual, actual) == 0.0

    def test_reference_values(self):
        assert nd(_keyed([2, 2, 3]), _keyed([1, 2, 3])) == pytest.approx(1 / 6)
        assert nrmse(_keyed([2, 2, 3]), _keyed([1, 2, 3])) == pytest.approx(np.sqrt(1 / 3) / 2)
        assert nrmse(_keyed([0]), _keyed([2])) == pytest.approx(1.0)

    def test_scale_covariant(self, rng):
        actual = rng.uniform(1, 5, 20)
        forecast = actual + rng.normal(size=20)
        for metric in (nd, nrmse):
            base = metric(_keyed(forecast), _keyed(actual))
            assert metric(_keyed(7.5 * forecast), _keyed(7.5 * actual)) == pytest.approx(base)

    def test_key_order_irrelevant(self):
        forecast = {('b', 1): 2.0, ('a', 0): 1.0}
        actual = {('a', 0): 2.0, ('b', 1): 2.0}
        assert nd(forecast, actual) == pytest.approx(0.25)

    def test_zero_actuals(self):
        with pytest.raises(NumericalError):
            nd(_keyed([1, 2]), _keyed([0, 0]))
        with pytest.raises(NumericalError):
            nrmse(_keyed([1, 2]), _keyed([0, 0]))

    def test_mismatched_keys(self):
        with pytest.raises(DataError):
            nd(_keyed([1, 2]), _keyed([1, 2, 3]))
        with pytest.raises(DataError):
            nd({}, {})

    def test_pandas_maps(self):
        index = pd.MultiIndex.from_tuples([('a', 0), ('a', 1)])
        assert nd(pd.Series([1.0, 3.0], index=index), pd.Series([1.0, 2.0], index=index)) == pytest.approx(1 / 3)


class TestEnsemble:
    """Tests for median ensembling."""

    def test_single_member(self):
        member = _keyed([1, 5, 2])
        np.testing.assert_array_equal(ensemble([member]).to_numpy(), [1, 5, 2])

    def test_median(self):
        assert ensemble([_keyed([1]), _keyed([3]), _keyed([100])]).iloc[0] == 3.0
        assert ensemble([_keyed([1]), _keyed([3])]).iloc[0] == 2.0

    def test_permutation_invariant_and_bounded(self, rng):
        members = [_keyed(rng.normal(size=6)) for _ in range(5)]
        a = ensemble(members)
        b = ensemble(members[::-1])
        pd.testing.assert_series_equal(a, b)
        stacked = np.stack([list(m.values()) for m in members])
        assert np.all(a.to_numpy() >= stacked.min(axis=0)) and np.all(a.to_numpy() <= stacked.max(axis=0))

    def test_errors(self):
        with pytest.raises(DataError):
            ensemble([])
        with pytest.raises(DataError):
            ensemble([_keyed([1, 2]), _keyed([1])])

    def test_frames_keep_parts_consistent(self):
        frames = [
            _frame([1.0, 10.0], [1, 1], local=[0.5, 4.0]),
            _frame([3.0, 20.0], [1, 1], local=[1.0, 5.0]),
            _frame([2.0, 30.0], [1, 1], local=[1.5, 6.0]),
        ]
        result = ensemble_frames(frames)
        np.testing.assert_array_equal(result['forecast'], [2.0, 20.0])
        np.testing.assert_array_equal(result['local_part'], [1.5, 5.0])
        np.testing.assert_allclose(result['local_part'] + result['periodic_part'], result['forecast'])

    def test_frames_even_count(self):
        frames = [_frame([1.0], [1], local=[0.0]), _frame([3.0], [1], local=[2.0])]
        result = ensemble_frames(frames)
        assert result['forecast'].iloc[0] == 2.0
        assert result['local_part'].iloc[0] + result['periodic_part'].iloc[0] == pytest.approx(2.0)


class TestRollingForecast:
    """Tests for rolling test-region forecasts."""

    def test_anchors_cover_range(self):
        assert rolling_anchors(100, 112, 4) == [(100, 100), (104, 104), (108, 108)]
        assert rolling_anchors(100, 110, 4) == [(100, 100), (104, 104), (106, 108)]
        assert rolling_anchors(0, 3, 4) == [(-1, 0)]
        with pytest.raises(DataError):
            rolling_anchors(5, 5, 4)

    @pytest.fixture
    def model_and_series(self):
        t = np.arange(300)
        series = Series('w', 10 + 2 * np.cos(2 * np.pi * t / 8), 0)
        spec = SplitSpec(250, 270, 300)
        periods = init_periods_many([series], spec, 4, 2)
        config = TrainingConfig(iterations=2, batch_size=4, horizon=4, lookback_multiplier=2,
                                layers=1, width=4, training_horizon=100)
        return train(config, [series], spec, periods), series

    def test_rows(self, model_and_series):
        model, series = model_and_series
        frame = rolling_forecast(model, series, 270, 298)
        np.testing.assert_array_equal(frame['t'], np.arange(270, 298))
        np.testing.assert_array_equal(frame['actual'], series.values[270:298])
        np.testing.assert_allclose(frame['forecast'], frame['local_part'] + frame['periodic_part'])

    def test_matches_direct_prediction(self, model_and_series):
        model, series = model_and_series
        frame = rolling_forecast(model, series, 270, 274)
        direct = model.predict(0, series.window(262, 270), 270)
        np.testing.assert_allclose(frame['forecast'], direct.total)

    def test_not_enough_history(self, model_and_series):
        model, series = model_and_series
        with pytest.raises(DataError):
            rolling_forecast(model, series, 4, 20)
        with pytest.raises(DataError):
            rolling_forecast(model, series, 290, 310)


class TestReports:
    """Tests for evaluation reports."""

    def test_build(self):
        frame = pd.concat([_frame([2, 2, 3], [1, 2, 3], 'a'), _frame([4, 4], [4, 4], 'b')], ignore_index=True)
        report = build_report(frame, horizon=3, members=2)
        assert report.points == 5
        assert report.nd == pytest.approx(1 / 14)
        assert report.per_series['a']['nd'] == pytest.approx(1 / 6)
        assert report.per_series['b']['nd'] == 0.0
        assert report.mean_series_nd == pytest.approx(1 / 12)

    def test_zero_series_reported_as_missing(self):
        frame = pd.concat([_frame([1], [0], 'z'), _frame([2], [2], 'a')], ignore_index=True)
        report = build_report(frame, horizon=1)
        assert report.per_series['z']['nd'] is None
        assert 'n/a' in format_report(report)

    def test_to_dict_is_json(self):
        report = EvalReport(0.1, 0.2, 24, 3, 10, {'a': {'points': 10, 'nd': 0.1, 'nrmse': 0.2}})
        document = json.loads(json.dumps(report.to_dict()))
        assert document['nd'] == 0.1 and document['mean_series_nd'] == 0.1

    def test_format(self):
        report = build_report(_frame([2, 2, 3], [1, 2, 3]), horizon=3)
        text = format_report(report)
        assert 'nd:' in text and 'nrmse:' in text
        assert '0.166667' in text

    def test_missing_columns(self):
        with pytest.raises(DataError):
            build_report(pd.DataFrame({'series_id': ['a'], 't': [0]}), horizon=1)

    def test_attach_actuals(self):
        series = Series('a', [5.0, 6.0, 7.0], 10)
        frame = _frame([1.0, 1.0], [0.0, 0.0]).assign(t=[11, 12])
        attached = attach_actuals(frame, [series])
        np.testing.assert_array_equal(attached['actual'], [6.0, 7.0])
        with pytest.raises(DataError):
            attach_actuals(frame.assign(t=[12, 13]), [series])
        with pytest.raises(DataError):
            attach_actuals(frame.assign(series_id='b'), [series])
