"""Central finite-difference oracles shared by the gradient tests."""

import numpy as np

STEP = 1e-6


def numeric_entry(f, arr, index, step=STEP):
    """(f(arr[index] + h) - f(arr[index] - h)) / 2h, restoring arr afterwards."""
    original = arr[index]
    arr[index] = original + step
    plus = f()
    arr[index] = original - step
    minus = f()
    arr[index] = original
    return (plus - minus) / (2 * step)


def sample_indices(arr, count, rng):
    """All flat indices of small arrays, else a random sample."""
    if arr.size <= count:
        return [np.unravel_index(i, arr.shape) for i in range(arr.size)]
    picks = rng.choice(arr.size, size=count, replace=False)
    return [np.unravel_index(i, arr.shape) for i in picks]


def relative_error(analytic, numeric, floor=1e-7):
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), floor)


def check_arrays(f, arrays, grads, rng, per_array=20, rtol=1e-4, atol=1e-7):
    """
    Compare analytic grads with finite differences of f over named arrays.

    Returns a list of (name, index, analytic, numeric) mismatches.
    """
    failures = []
    for name, arr in arrays.items():
        for index in sample_indices(arr, per_array, rng):
            numeric = numeric_entry(f, arr, index)
            analytic = float(grads[name][index])
            if abs(analytic - numeric) > rtol * max(abs(analytic), abs(numeric)) + atol:
                failures.append((name, index, analytic, numeric))
    return failures
