"""
DEPTS - Constants and Magic Numbers

Centralized location for fixed values used throughout the engine.
Tunable defaults live in config.py instead.
"""

from __future__ import annotations

# =============================================================================
# EXIT CODES
# =============================================================================

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA_ERROR = 2
EXIT_NUMERICAL_ERROR = 3


# =============================================================================
# FILE FORMATS
# =============================================================================

# Long-format series CSV header
CSV_COLUMNS = ('series_id', 't', 'value')

# Forecast dump columns
FORECAST_COLUMNS = ('series_id', 't', 'actual', 'forecast', 'local_part', 'periodic_part')

# Per-layer decomposition dump columns
DECOMPOSITION_COLUMNS = ('series_id', 'layer', 'component', 't', 'value')

# Version tags written into JSON documents and checkpoints
COEFFICIENTS_FORMAT_VERSION = 1
CHECKPOINT_FORMAT_VERSION = 1

# Fixed member timestamp for deterministic checkpoint archives
CHECKPOINT_ZIP_DATE = (1980, 1, 1, 0, 0, 0)


# =============================================================================
# SPLITS
# =============================================================================

# Fallback split fractions when no split is supplied (4000/100/900 of 5000)
DEFAULT_TRAIN_FRACTION = 0.80
DEFAULT_VAL_FRACTION = 0.02


# =============================================================================
# NUMERICS
# =============================================================================

# Below this length dct2 uses the direct O(N^2) sum
DCT_DIRECT_THRESHOLD = 16

# Adam defaults
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


# =============================================================================
# MODEL VARIANTS
# =============================================================================

VARIANTS = ('DEPTS', 'DEPTS-1', 'DEPTS-2', 'DEPTS-3', 'NoPeriod', 'RandInit', 'FixPeriod')
LOSSES = ('smape', 'mase')
COMPOSITIONS = ('linear', 'quadratic', 'cubic')
