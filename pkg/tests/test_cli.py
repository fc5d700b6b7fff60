"""End-to-end tests of the depts command line."""

import json
import logging

import numpy as np
import pandas as pd
import pytest

from app import main
from commands.benchmark import format_benchmark, run_benchmark
from utils.constants import (
    DECOMPOSITION_COLUMNS,
    EXIT_DATA_ERROR,
    EXIT_NUMERICAL_ERROR,
    EXIT_OK,
    EXIT_USAGE,
    FORECAST_COLUMNS,
)
from utils.timeseries import Series, load_csv
from utils.training import TrainingConfig

TINY_TRAINING = {
    'iterations': 4,
    'batch_size': 8,
    'horizon': 4,
    'lookback_multiplier': 2,
    'layers': 2,
    'width': 8,
    'training_horizon': 200,
}


@pytest.fixture
def synth_csv(tmp_path):
    """600-point linear synthetic series written by `depts synth`."""
    path = tmp_path / 'synth.csv'
    assert main(['synth', '--kind', 'linear', '--seed', '3', '--length', '600', '--out', str(path)]) == EXIT_OK
    return path


@pytest.fixture
def manifest_file(tmp_path, synth_csv):
    """Write a manifest for a tiny two-member ensemble."""
    def _write(name='manifest.json', **overrides):
        document = {
            'data': synth_csv.name,
            'output_dir': 'run',
            'period_init': {'K': 16, 'J': 2},
            'training': dict(TINY_TRAINING),
            'ensemble': {'lookback_multipliers': [2], 'seeds': [0, 1]},
        }
        document.update(overrides)
        path = tmp_path / name
        path.write_text(json.dumps(document))
        return path
    return _write


@pytest.fixture
def trained_run(tmp_path, manifest_file):
    assert main(['train', '--manifest', str(manifest_file())]) == EXIT_OK
    return tmp_path / 'run'


class TestParser:
    """Tests for argument handling and exit codes."""

    def test_missing_command(self):
        assert main([]) == EXIT_USAGE

    def test_unknown_command(self):
        assert main(['fit']) == EXIT_USAGE

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(['--version'])
        assert exc.value.code == 0
        assert 'DEPTS v' in capsys.readouterr().out

    def test_bad_int_list(self):
        assert main(['benchmark', '--data-seeds', 'a,b']) == EXIT_USAGE

    def test_verbosity_flags(self, mocker, tmp_path):
        set_level = mocker.patch('app.set_level')
        main(['-v', 'synth', '--kind', 'linear', '--length', '50', '--out', str(tmp_path / 'a.csv')])
        set_level.assert_called_once_with(logging.INFO)
        set_level.reset_mock()
        main(['-d', 'synth', '--kind', 'linear', '--length', '50', '--out', str(tmp_path / 'b.csv')])
        set_level.assert_called_once_with(logging.DEBUG)


class TestSynth:
    """Tests for `depts synth`."""

    def test_default_length(self, tmp_path):
        path = tmp_path / 'cubic.csv'
        assert main(['synth', '--kind', 'cubic', '--seed', '0', '--out', str(path)]) == EXIT_OK
        frame = pd.read_csv(path)
        assert list(frame.columns) == ['series_id', 't', 'value']
        assert len(frame) == 5000
        np.testing.assert_array_equal(frame['t'], np.arange(5000))

    def test_same_seed_same_bytes(self, tmp_path):
        a, b, c = tmp_path / 'a.csv', tmp_path / 'b.csv', tmp_path / 'c.csv'
        for path, seed in ((a, '7'), (b, '7'), (c, '8')):
            assert main(['synth', '--kind', 'quadratic', '--seed', seed, '--length', '300', '--out', str(path)]) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()
        assert a.read_bytes() != c.read_bytes()

    def test_components(self, tmp_path):
        out, parts = tmp_path / 'x.csv', tmp_path / 'parts.csv'
        args = ['synth', '--kind', 'linear', '--length', '200', '--out', str(out), '--components', str(parts)]
        assert main(args) == EXIT_OK
        frame = pd.read_csv(parts)
        np.testing.assert_allclose(frame['x'], load_csv(out)[0].values)

    def test_invalid_kind(self, tmp_path):
        assert main(['synth', '--kind', 'quartic', '--out', str(tmp_path / 'x.csv')]) == EXIT_USAGE


class TestInitPeriods:
    """Tests for `depts init-periods`."""

    def test_budget_respected(self, tmp_path):
        data, out = tmp_path / 'd.csv', tmp_path / 'coeffs.json'
        main(['synth', '--kind', 'linear', '--seed', '1', '--out', str(data)])
        assert main(['init-periods', '--data', str(data), '-K', '16', '-J', '3', '--out', str(out)]) == EXIT_OK
        document = json.loads(out.read_text())
        (entry,) = document['series']
        assert entry['series_id'] == 'synth-linear-1'
        assert len(entry['atoms']) <= 16
        assert 1 <= sum(a['enabled'] for a in entry['atoms']) <= 3

    def test_constant_series(self, tmp_path, csv_file):
        data = csv_file([Series('flat', np.full(300, 5.0))])
        out = tmp_path / 'coeffs.json'
        assert main(['init-periods', '--data', str(data), '-K', '8', '-J', '2', '--out', str(out)]) == EXIT_OK
        (entry,) = json.loads(out.read_text())['series']
        assert entry['A0'] == 5.0
        assert entry['atoms'] == []

    def test_explicit_split(self, tmp_path, synth_csv):
        out = tmp_path / 'coeffs.json'
        args = ['init-periods', '--data', str(synth_csv), '-K', '8', '-J', '2',
                '--train-end', '400', '--val-end', '450', '--test-end', '600', '--out', str(out)]
        assert main(args) == EXIT_OK
        assert out.is_file()

    def test_partial_split(self, tmp_path, synth_csv):
        args = ['init-periods', '--data', str(synth_csv), '--train-end', '400', '--out', str(tmp_path / 'c.json')]
        assert main(args) == EXIT_USAGE

    def test_missing_file(self, tmp_path):
        args = ['init-periods', '--data', str(tmp_path / 'nope.csv'), '--out', str(tmp_path / 'c.json')]
        assert main(args) == EXIT_DATA_ERROR

    def test_budget_above_candidates(self, tmp_path, synth_csv):
        args = ['init-periods', '--data', str(synth_csv), '-K', '4', '-J', '5', '--out', str(tmp_path / 'c.json')]
        assert main(args) == EXIT_DATA_ERROR


class TestTrainAndForecast:
    """Tests for `depts train`, `depts forecast` and `depts eval`."""

    def test_outputs(self, trained_run, synth_csv):
        names = sorted(p.name for p in trained_run.iterdir())
        assert names == [
            'coefficients.json', 'forecast.csv',
            'member-L2H-seed0.ckpt', 'member-L2H-seed1.ckpt', 'run.json',
        ]
        run = json.loads((trained_run / 'run.json').read_text())
        assert run['checkpoints'] == ['member-L2H-seed0.ckpt', 'member-L2H-seed1.ckpt']
        assert len(run['final_losses']) == 2

        frame = pd.read_csv(trained_run / 'forecast.csv')
        assert list(frame.columns) == list(FORECAST_COLUMNS)
        # default split of 600 points: test region is [492, 600)
        np.testing.assert_array_equal(frame['t'], np.arange(492, 600))
        np.testing.assert_allclose(frame['actual'], load_csv(synth_csv)[0].values[492:])

    def test_deterministic(self, tmp_path, manifest_file):
        path = manifest_file()
        assert main(['train', '--manifest', str(path), '--out', str(tmp_path / 'a')]) == EXIT_OK
        assert main(['train', '--manifest', str(path), '--out', str(tmp_path / 'b')]) == EXIT_OK
        for name in ('member-L2H-seed0.ckpt', 'member-L2H-seed1.ckpt', 'forecast.csv'):
            assert (tmp_path / 'a' / name).read_bytes() == (tmp_path / 'b' / name).read_bytes()

    def test_seed_override(self, tmp_path, manifest_file):
        assert main(['train', '--manifest', str(manifest_file()), '--seed', '5', '--out', str(tmp_path / 's')]) == EXIT_OK
        assert (tmp_path / 's' / 'member-L2H-seed5.ckpt').is_file()
        assert not (tmp_path / 's' / 'member-L2H-seed0.ckpt').exists()

    def test_saved_coefficients_reused(self, tmp_path, trained_run, manifest_file):
        path = manifest_file('reuse.json', period_init={'coefficients': 'run/coefficients.json'})
        assert main(['train', '--manifest', str(path), '--out', str(tmp_path / 'reuse')]) == EXIT_OK
        assert not (tmp_path / 'reuse' / 'coefficients.json').exists()
        assert (tmp_path / 'reuse' / 'forecast.csv').read_bytes() == (trained_run / 'forecast.csv').read_bytes()

    def test_divergence_exit_code(self, tmp_path, manifest_file):
        path = manifest_file('diverge.json', training={**TINY_TRAINING, 'lr_theta': 1e308})
        assert main(['train', '--manifest', str(path)]) == EXIT_NUMERICAL_ERROR

    def test_missing_manifest(self, tmp_path):
        assert main(['train', '--manifest', str(tmp_path / 'nope.json')]) == EXIT_DATA_ERROR

    def test_forecast_matches_train_output(self, tmp_path, trained_run, synth_csv):
        out = tmp_path / 'again.csv'
        checkpoints = [str(trained_run / 'member-L2H-seed0.ckpt'), str(trained_run / 'member-L2H-seed1.ckpt')]
        assert main(['forecast', '--checkpoint', *checkpoints, '--data', str(synth_csv), '--out', str(out)]) == EXIT_OK
        assert out.read_bytes() == (trained_run / 'forecast.csv').read_bytes()

    def test_forecast_corrupt_checkpoint(self, tmp_path, synth_csv):
        bad = tmp_path / 'bad.ckpt'
        bad.write_bytes(b'not a checkpoint')
        args = ['forecast', '--checkpoint', str(bad), '--data', str(synth_csv), '--out', str(tmp_path / 'f.csv')]
        assert main(args) == EXIT_DATA_ERROR

    def test_eval(self, tmp_path, trained_run, synth_csv, capsys):
        report_path = tmp_path / 'report.json'
        args = ['eval', '--forecast', str(trained_run / 'forecast.csv'), '--data', str(synth_csv),
                '--horizon', '4', '--members', '2', '--out', str(report_path)]
        assert main(args) == EXIT_OK
        assert 'nd:' in capsys.readouterr().out
        report = json.loads(report_path.read_text())
        assert report['points'] == 108
        assert report['members'] == 2
        assert report['nd'] >= 0.0

    def test_eval_perfect_forecast(self, tmp_path, trained_run, synth_csv, capsys):
        frame = pd.read_csv(trained_run / 'forecast.csv')
        frame['forecast'] = frame['actual']
        perfect = tmp_path / 'perfect.csv'
        frame.to_csv(perfect, index=False)
        assert main(['eval', '--forecast', str(perfect), '--data', str(synth_csv), '--horizon', '4']) == EXIT_OK
        assert 'nd:    0.000000' in capsys.readouterr().out

    def test_eval_missing_forecast(self, tmp_path, synth_csv):
        assert main(['eval', '--forecast', str(tmp_path / 'nope.csv'), '--data', str(synth_csv)]) == EXIT_DATA_ERROR


class TestDecompose:
    """Tests for `depts decompose`."""

    def test_columns_and_sums(self, tmp_path, trained_run, synth_csv):
        out = tmp_path / 'decomp.csv'
        args = ['decompose', '--checkpoint', str(trained_run / 'member-L2H-seed0.ckpt'), '--data', str(synth_csv),
                '--series', 'synth-linear-3', '--anchor', '500', '--out', str(out)]
        assert main(args) == EXIT_OK
        frame = pd.read_csv(out)
        assert list(frame.columns) == list(DECOMPOSITION_COLUMNS)
        assert set(frame['layer']) == {0, 1, 2}

        def component(layer, name):
            rows = frame[(frame['layer'] == layer) & (frame['component'] == name)]
            return rows.sort_values('t')['value'].to_numpy()

        np.testing.assert_allclose(component(0, 'total'), component(0, 'local_part') + component(0, 'periodic_part'))
        np.testing.assert_allclose(component(0, 'local_part'), component(1, 'local_fore') + component(2, 'local_fore'))
        np.testing.assert_array_equal(frame[(frame['layer'] == 0) & (frame['component'] == 'total')]['t'], np.arange(500, 504))

    def test_unknown_series(self, tmp_path, trained_run, synth_csv):
        args = ['decompose', '--checkpoint', str(trained_run / 'member-L2H-seed0.ckpt'), '--data', str(synth_csv),
                '--series', 'nope', '--anchor', '500', '--out', str(tmp_path / 'd.csv')]
        assert main(args) == EXIT_DATA_ERROR

    def test_anchor_without_history(self, tmp_path, trained_run, synth_csv):
        args = ['decompose', '--checkpoint', str(trained_run / 'member-L2H-seed0.ckpt'), '--data', str(synth_csv),
                '--series', 'synth-linear-3', '--anchor', '3', '--out', str(tmp_path / 'd.csv')]
        assert main(args) == EXIT_DATA_ERROR


class TestBenchmark:
    """Tests for the synthetic benchmark driver."""

    def test_tiny_run(self):
        training = TrainingConfig.from_dict(dict(TINY_TRAINING))
        report = run_benchmark(
            training, ['linear'], [0], ['DEPTS', 'NoPeriod'], [2], [0], K=8, J=2,
            synth_overrides={'length': 400, 'train_len': 320, 'val_len': 20},
        )
        assert [(r['variant'], r['kind']) for r in report['results']] == [('DEPTS', 'linear'), ('NoPeriod', 'linear')]
        summary = report['summary']['linear']
        assert set(summary['mean_nd']) == {'DEPTS', 'NoPeriod'}
        assert 'NoPeriod' in summary['nd_reduction']
        assert 'DEPTS vs NoPeriod' in format_benchmark(report)
        json.dumps(report)

    def test_unknown_variant(self):
        assert main(['benchmark', '--variants', 'DEPTS,Bogus']) == EXIT_DATA_ERROR

    def test_arguments_forwarded(self, mocker, tmp_path, capsys):
        report = {'summary': {'cubic': {'mean_nd': {'DEPTS': 0.1}, 'mean_nrmse': {'DEPTS': 0.2}}}}
        run = mocker.patch('commands.benchmark.run_benchmark', return_value=report)
        out = tmp_path / 'bench.json'
        args = ['benchmark', '--kinds', 'CUBIC', '--data-seeds', '4,5', '--variants', 'depts', '--seeds', '1',
                '--lookback-multipliers', '2,3', '-K', '32', '-J', '4', '--jobs', '2', '--out', str(out)]
        assert main(args) == EXIT_OK
        positional = run.call_args.args
        assert positional[1:] == (['cubic'], [4, 5], ['DEPTS'], [2, 3], [1], 32, 4)
        assert run.call_args.kwargs == {'jobs': 2}
        assert json.loads(out.read_text()) == report
        assert 'cubic:' in capsys.readouterr().out

    @pytest.mark.slow
    def test_depts_beats_no_period(self):
        """Desk-scale run: DEPTS lowers test nd against NoPeriod on every composition."""
        report = run_benchmark(
            TrainingConfig(), ['linear', 'quadratic', 'cubic'], [0, 1, 2], ['DEPTS', 'NoPeriod'],
            [2], [0, 1, 2], K=128, J=8, jobs=3,
        )
        for kind, entry in report['summary'].items():
            assert entry['mean_nd']['DEPTS'] < entry['mean_nd']['NoPeriod'], kind
        assert report['summary']['cubic']['nd_reduction']['NoPeriod'] >= 0.05
