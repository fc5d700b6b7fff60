"""Error types and argument validation shared by the engine and the CLI."""

from __future__ import annotations

import math
from collections.abc import Iterable
from typing import Any

import numpy as np


class DataError(ValueError):
    """Raised for malformed input data or out-of-range arguments."""
    pass


class UsageError(ValueError):
    """Raised for invalid command-line usage."""
    pass


class NumericalError(ArithmeticError):
    """Raised when a computation produces a non-finite or undefined value."""
    pass


def validate_positive_int(value: Any, name: str = 'value', max_val: int | None = None) -> int:
    """Validate and return a strictly positive integer."""
    try:
        val_int = int(value)
        if isinstance(value, float) and not value.is_integer():
            raise ValueError(f"{name} must be an integer, got {value}")
        if val_int < 1:
            raise ValueError(f"{name} must be positive, got {val_int}")
        if max_val is not None and val_int > max_val:
            raise ValueError(f"{name} must be <= {max_val}, got {val_int}")
        return val_int
    except (ValueError, TypeError) as e:
        raise DataError(f"Invalid {name}: {value}") from e


def validate_non_negative_int(value: Any, name: str = 'value') -> int:
    """Validate and return an integer >= 0."""
    try:
        val_int = int(value)
        if isinstance(value, float) and not value.is_integer():
            raise ValueError(f"{name} must be an integer, got {value}")
        if val_int < 0:
            raise ValueError(f"{name} must be >= 0, got {val_int}")
        return val_int
    except (ValueError, TypeError) as e:
        raise DataError(f"Invalid {name}: {value}") from e


def validate_positive_float(value: Any, name: str = 'value', allow_zero: bool = False) -> float:
    """Validate and return a finite float > 0 (or >= 0 with allow_zero)."""
    try:
        val_float = float(value)
        if not math.isfinite(val_float):
            raise ValueError(f"{name} must be finite, got {val_float}")
        if val_float < 0 or (val_float == 0 and not allow_zero):
            raise ValueError(f"{name} must be positive, got {val_float}")
        return val_float
    except (ValueError, TypeError) as e:
        raise DataError(f"Invalid {name}: {value}") from e


def validate_choice(value: Any, choices: Iterable[str], name: str = 'value') -> str:
    """Validate that a string is one of the allowed choices (case-insensitive)."""
    allowed = {c.lower(): c for c in choices}
    if not isinstance(value, str) or value.lower() not in allowed:
        raise DataError(f"Invalid {name}: {value!r} (expected one of {', '.join(allowed.values())})")
    return allowed[value.lower()]


def validate_finite(values: Any, name: str = 'values') -> np.ndarray:
    """Return values as a float64 array, raising DataError on NaN or infinity."""
    try:
        arr = np.asarray(values, dtype=np.float64)
    except (ValueError, TypeError) as e:
        raise DataError(f"Invalid {name}: not numeric") from e
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr.ravel()))[0])
        raise DataError(f"Invalid {name}: non-finite value at position {bad}")
    return arr
