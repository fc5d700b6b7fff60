"""
Numerical kernels for period discovery.

DCT-II analysis with cosine-atom extraction, least-squares atom refinement,
and dynamic time warping.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import scipy.fft

from utils.constants import DCT_DIRECT_THRESHOLD
from utils.validation import DataError


class SignalError(DataError):
    """Raised for invalid input to a signal kernel."""
    pass


@dataclass(frozen=True)
class CosineAtom:
    """A * cos(2*pi*F*t + P), F in cycles per step."""
    amplitude: float
    frequency: float
    phase: float

    def to_dict(self) -> dict:
        return {'amplitude': self.amplitude, 'frequency': self.frequency, 'phase': self.phase}


def _as_signal(x: Sequence[float] | np.ndarray, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise SignalError(f"{name} must be a non-empty vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise SignalError(f"{name} contains non-finite values")
    return arr


def dct2_direct(x: Sequence[float] | np.ndarray) -> np.ndarray:
    """O(N^2) DCT-II: C_k = sum_n x_n cos(pi k (2n+1) / 2N)."""
    x = _as_signal(x, 'x')
    n = x.size
    k = np.arange(n)[:, None]
    basis = np.cos(np.pi * k * (2 * np.arange(n)[None, :] + 1) / (2 * n))
    return basis @ x


def dct2(x: Sequence[float] | np.ndarray) -> np.ndarray:
    """
    Unnormalized DCT-II of a finite vector.

    Short inputs use the direct sum; longer ones use scipy's FFT-based
    transform, whose unnormalized convention carries an extra factor 2.
    """
    x = _as_signal(x, 'x')
    if x.size < DCT_DIRECT_THRESHOLD:
        return dct2_direct(x)
    return scipy.fft.dct(x, type=2, norm=None) / 2.0


def atom_arrays(coeffs: np.ndarray, n: int) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """
    Map DCT-II coefficients to (A0, amplitude, frequency, phase) arrays.

    Bin k becomes A_k cos(2 pi F_k n + P_k) with F_k = k/2N, P_k = pi k/2N and
    A_k = 2|C_k|/N; a negative coefficient adds pi to the phase. Bin 0 is
    carried by A0 and its atom has zero amplitude.
    """
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.ndim != 1 or coeffs.size != n or n < 1:
        raise SignalError(f"Expected {n} coefficients, got shape {coeffs.shape}")

    k = np.arange(n, dtype=np.float64)
    base = float(coeffs[0] / n)
    amplitude = 2.0 * np.abs(coeffs) / n
    frequency = k / (2 * n)
    phase = np.pi * k / (2 * n) + np.where(coeffs < 0, np.pi, 0.0)

    amplitude[0] = 0.0
    phase[0] = 0.0
    return base, amplitude, frequency, phase


def coeffs_to_atoms(coeffs: np.ndarray, n: int) -> tuple[float, list[CosineAtom]]:
    """Base level and one CosineAtom per DCT bin (bin 0 is the zero atom)."""
    base, amplitude, frequency, phase = atom_arrays(coeffs, n)
    atoms = [
        CosineAtom(float(a), float(f), float(p))
        for a, f, p in zip(amplitude, frequency, phase)
    ]
    return base, atoms


def refine_atom(
    x: Sequence[float] | np.ndarray,
    frequencies: Sequence[float],
    t: np.ndarray | None = None,
) -> CosineAtom:
    """
    Least-squares fit of a*cos(2 pi f t) + b*sin(2 pi f t) to x for each
    candidate f, returned as the atom with the largest fitted amplitude.
    """
    x = _as_signal(x, 'x')
    t = np.arange(x.size, dtype=np.float64) if t is None else np.asarray(t, dtype=np.float64)
    if t.shape != x.shape:
        raise SignalError(f"Time index shape {t.shape} does not match signal shape {x.shape}")
    if len(frequencies) == 0:
        raise SignalError("No candidate frequencies")

    best = CosineAtom(0.0, float(frequencies[0]), 0.0)
    for freq in frequencies:
        arg = 2.0 * np.pi * float(freq) * t
        c = np.cos(arg)
        s = np.sin(arg)
        gram = np.array([[c @ c, c @ s], [c @ s, s @ s]])
        rhs = np.array([c @ x, s @ x])
        (a, b), *_ = np.linalg.lstsq(gram, rhs, rcond=None)
        amplitude = math.hypot(a, b)
        if amplitude > best.amplitude:
            best = CosineAtom(amplitude, float(freq), math.atan2(-b, a) % (2 * np.pi))
    return best


def dtw(a: Sequence[float] | np.ndarray, b: Sequence[float] | np.ndarray) -> float:
    """
    Dynamic time warping distance with |a_i - b_j| local cost.

    Unconstrained window, no path-length normalization. Cells on one
    anti-diagonal depend only on the two previous diagonals, so each diagonal
    is filled in one vectorized step.
    """
    a = _as_signal(a, 'a')
    b = _as_signal(b, 'b')
    m, n = a.size, b.size

    cost = np.abs(a[:, None] - b[None, :])
    acc = np.full((m + 1, n + 1), np.inf)
    acc[0, 0] = 0.0

    for d in range(2, m + n + 1):
        i = np.arange(max(1, d - n), min(m, d - 1) + 1)
        j = d - i
        prev = np.minimum(np.minimum(acc[i - 1, j], acc[i, j - 1]), acc[i - 1, j - 1])
        acc[i, j] = cost[i - 1, j - 1] + prev

    return float(acc[m, n])
