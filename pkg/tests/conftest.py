"""Pytest configuration and fixtures."""

import numpy as np
import pytest

from utils.network import init_network
from utils.periodicity import PeriodicCoefficients, PeriodMask, SeriesPeriods
from utils.timeseries import Series, write_csv


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False, help='Run slow benchmark tests')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    """Seeded generator."""
    return np.random.default_rng(12345)


@pytest.fixture
def sine_series():
    """Two-period series of 600 points starting at t0=100."""
    t = np.arange(100, 700)
    values = 10.0 + 3.0 * np.cos(2 * np.pi * t / 24) + 1.5 * np.cos(2 * np.pi * t / 12 + 0.7)
    return Series('sine', values, 100)


@pytest.fixture
def sine_periods(sine_series):
    """Exact periodic coefficients of sine_series, all atoms enabled."""
    coeffs = PeriodicCoefficients(10.0, np.array([3.0, 1.5]), np.array([1 / 24, 1 / 12]), np.array([0.0, 0.7]))
    return SeriesPeriods(sine_series.id, coeffs, PeriodMask(np.ones(2, dtype=bool), 2))


@pytest.fixture
def small_params(rng):
    """Network with L=12, H=6, W=16, N=3 and two series."""
    params = init_network(12, 6, 16, 3, 2, rng)
    # non-trivial biases and scales so every path carries gradient
    for name, arr in params.to_arrays().items():
        if name.endswith('.bias'):
            arr[...] = rng.normal(0.0, 0.1, size=arr.shape)
    params.alpha[...] = rng.uniform(0.5, 1.5, size=params.alpha.shape)
    return params


@pytest.fixture
def csv_file(tmp_path):
    """Write series to a CSV and return its path."""
    def _write(series, name='data.csv'):
        return write_csv(series, tmp_path / name)
    return _write
