# Library modules for DEPTS
from .logging import get_logger, app_logger, train_logger, period_logger
from .validation import (
    DataError,
    NumericalError,
    UsageError,
    validate_choice,
    validate_finite,
    validate_non_negative_int,
    validate_positive_float,
    validate_positive_int,
)
