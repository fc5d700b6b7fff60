"""Tests for configuration module."""

import importlib
import logging

import pytest


@pytest.fixture
def reload_config(monkeypatch):
    """Reload config after env changes, and again on teardown."""
    import config

    def _reload():
        return importlib.reload(config)

    yield _reload
    for key in ('DEPTS_ITERATIONS', 'DEPTS_LR_PHI', 'DEPTS_PERIOD_REFINE', 'DEPTS_LOG_LEVEL'):
        monkeypatch.delenv(key, raising=False)
    importlib.reload(config)


class TestConfigEnvVars:
    """Tests for environment variable configuration."""

    def test_default_values(self, reload_config):
        """Desk-scale defaults."""
        config = reload_config()
        assert config.ITERATIONS == 2000
        assert config.BATCH_SIZE == 256
        assert config.HORIZON == 24
        assert config.LOOKBACK_MULTIPLIER == 2
        assert config.PERIOD_K == 128
        assert config.PERIOD_J == 8
        assert config.PERIOD_REFINE is True
        assert config.JOBS == 1

    def test_env_override(self, monkeypatch, reload_config):
        """Environment variables override defaults."""
        monkeypatch.setenv('DEPTS_ITERATIONS', '50')
        monkeypatch.setenv('DEPTS_LR_PHI', '1e-4')
        monkeypatch.setenv('DEPTS_PERIOD_REFINE', 'off')
        config = reload_config()

        assert config.ITERATIONS == 50
        assert config.LR_PHI == 1e-4
        assert config.PERIOD_REFINE is False

    def test_invalid_env_values(self, monkeypatch, reload_config):
        """Invalid env values fall back to defaults."""
        monkeypatch.setenv('DEPTS_ITERATIONS', 'many')
        monkeypatch.setenv('DEPTS_LR_PHI', 'small')
        monkeypatch.setenv('DEPTS_PERIOD_REFINE', 'maybe')
        config = reload_config()

        assert config.ITERATIONS == 2000
        assert config.LR_PHI == 5e-7
        assert config.PERIOD_REFINE is True

    def test_log_level(self, monkeypatch, reload_config):
        monkeypatch.setenv('DEPTS_LOG_LEVEL', 'debug')
        assert reload_config().LOG_LEVEL == logging.DEBUG

        monkeypatch.setenv('DEPTS_LOG_LEVEL', 'nonsense')
        assert reload_config().LOG_LEVEL == logging.WARNING


class TestPresets:
    """Full-scale benchmark presets."""

    def test_presets_build_configs(self):
        from data.presets import TRAINING_PRESETS
        from utils.training import TrainingConfig

        for name in TRAINING_PRESETS:
            config = TrainingConfig.from_preset(name)
            assert config.iterations > 0
            assert config.lookback == config.lookback_multiplier * config.horizon

    def test_preset_override(self):
        from utils.training import TrainingConfig

        config = TrainingConfig.from_preset('electricity', iterations=3)
        assert config.iterations == 3

    @pytest.mark.parametrize('name,iterations,lr_theta', [
        ('electricity', 72000, 1e-3),
        ('traffic', 12000, 1e-3),
        ('m4-hourly', 12000, 1e-3),
        ('caiso', 4000, 1e-3),
        ('np', 12000, 1e-6),
    ])
    def test_published_schedule(self, name, iterations, lr_theta):
        from utils.training import TrainingConfig

        config = TrainingConfig.from_preset(name)
        assert config.iterations == iterations
        assert config.lr_theta == lr_theta
        assert config.lr_phi == 5e-7

    @pytest.mark.parametrize('name,budgets', [
        ('electricity', [4, 32]),
        ('traffic', [8, 8]),
        ('m4-hourly', [1]),
        ('caiso', [8, 32, 32, 8]),
        ('np', [8, 8, 32, 32]),
    ])
    def test_period_budget_per_split(self, name, budgets):
        from data.presets import TRAINING_PRESETS
        from utils.training import TrainingConfig

        splits = list(TRAINING_PRESETS[name]['period_budgets'])
        assert [TrainingConfig.from_preset(name, split).period_budget for split in splits] == budgets
        assert TrainingConfig.from_preset(name).period_budget == budgets[0]

    def test_unknown_split(self):
        from utils.training import TrainingConfig
        from utils.validation import DataError

        with pytest.raises(DataError, match='split'):
            TrainingConfig.from_preset('caiso', '2019-01-01')
