"""
Synthetic periodic series.

x_t = f(l_t + p_t) where l is an AR(3) local momentum process and p is a
noisy draw around the fixed periodic state

    z_t = 30 + 8 cos(2 pi (t+2)/50) + 4 cos(2 pi (t+3)/10) + 2 cos(2 pi t/4)

and f is the identity, square or cube. Randomness comes from numpy's PCG64
generator seeded with SynthSpec.seed; the draw order is AR coefficients,
AR initial values, AR noise, periodic noise.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from utils.constants import COMPOSITIONS
from utils.periodicity import PeriodicCoefficients, PeriodMask, eval_g
from utils.signal import CosineAtom
from utils.timeseries import Series, SplitSpec
from utils.validation import DataError, validate_choice, validate_non_negative_int, validate_positive_float, validate_positive_int

logger = logging.getLogger('depts.synthetic')

SYNTH_ATOMS = (
    CosineAtom(8.0, 1 / 50, 2 * math.pi * 2 / 50),
    CosineAtom(4.0, 1 / 10, 2 * math.pi * 3 / 10),
    CosineAtom(2.0, 1 / 4, 0.0),
)
SYNTH_BASE = 30.0

# Attempts at drawing stationary AR coefficients before giving up
MAX_AR_DRAWS = 10000


@dataclass(frozen=True)
class SynthSpec:
    """Generator settings; defaults reproduce the standard benchmark."""
    compose: str = 'linear'
    seed: int = 0
    length: int = 5000
    ar_order: int = 3
    ar_coeff_range: tuple[float, float] = (-1.0, 1.0)
    init_range: tuple[float, float] = (0.0, 5.0)
    sigma_l: float = 1.0
    sigma_p: float = 1.0
    atoms: tuple[CosineAtom, ...] = SYNTH_ATOMS
    base: float = SYNTH_BASE
    train_len: int = 4000
    val_len: int = 100
    stationary: bool = True
    ar_coeffs: tuple[float, ...] | None = None
    ar_init: tuple[float, ...] | None = None
    series_id: str = field(default='')

    def __post_init__(self) -> None:
        set_ = object.__setattr__
        set_(self, 'compose', validate_choice(self.compose, COMPOSITIONS, 'composition'))
        set_(self, 'seed', validate_non_negative_int(self.seed, 'seed'))
        set_(self, 'length', validate_positive_int(self.length, 'length'))
        set_(self, 'ar_order', validate_positive_int(self.ar_order, 'ar_order'))
        set_(self, 'sigma_l', validate_positive_float(self.sigma_l, 'sigma_l', allow_zero=True))
        set_(self, 'sigma_p', validate_positive_float(self.sigma_p, 'sigma_p', allow_zero=True))
        for name in ('ar_coeffs', 'ar_init'):
            value = getattr(self, name)
            if value is not None:
                if len(value) != self.ar_order:
                    raise DataError(f"{name} needs {self.ar_order} values, got {len(value)}")
                set_(self, name, tuple(float(v) for v in value))
        if not 0 < self.train_len <= self.train_len + self.val_len <= self.length:
            raise DataError(f"Split {self.train_len}/{self.val_len} does not fit length {self.length}")
        if not self.series_id:
            set_(self, 'series_id', f'synth-{self.compose}-{self.seed}')

    @property
    def split(self) -> SplitSpec:
        return SplitSpec(self.train_len, self.train_len + self.val_len, self.length)

    @property
    def coefficients(self) -> PeriodicCoefficients:
        return PeriodicCoefficients.from_atoms(self.base, self.atoms)


def is_stationary(coeffs: np.ndarray) -> bool:
    """AR polynomial stability: companion matrix spectral radius below one."""
    p = len(coeffs)
    companion = np.zeros((p, p))
    companion[0] = coeffs
    companion[1:, :-1] = np.eye(p - 1)
    return bool(np.max(np.abs(np.linalg.eigvals(companion))) < 1.0)


def draw_ar_coeffs(spec: SynthSpec, rng: np.random.Generator) -> np.ndarray:
    if spec.ar_coeffs is not None:
        return np.array(spec.ar_coeffs)
    low, high = spec.ar_coeff_range
    for _ in range(MAX_AR_DRAWS):
        coeffs = rng.uniform(low, high, size=spec.ar_order)
        if not spec.stationary or is_stationary(coeffs):
            return coeffs
    raise DataError(f"No stationary AR coefficients found in {MAX_AR_DRAWS} draws")


def gen_ar(spec: SynthSpec, rng: np.random.Generator) -> np.ndarray:
    """l_t = sum_i a_i l_{t-i} + N(0, sigma_l)."""
    coeffs = draw_ar_coeffs(spec, rng)
    if spec.ar_init is not None:
        history = list(spec.ar_init)
    else:
        history = rng.uniform(*spec.init_range, size=spec.ar_order).tolist()
    noise = rng.normal(0.0, spec.sigma_l, size=spec.length)

    # history is oldest first; coeffs[0] weights the most recent value
    p = spec.ar_order
    values = np.empty(spec.length)
    window = np.array(history[::-1], dtype=np.float64)
    for t in range(spec.length):
        values[t] = coeffs @ window + noise[t]
        window[1:] = window[:-1]
        window[0] = values[t]
    if not np.all(np.isfinite(values)):
        raise DataError(f"AR process diverged with coefficients {coeffs.tolist()} (order {p})")
    return values


def periodic_state(spec: SynthSpec) -> np.ndarray:
    """Noise-free z_t over t = 0 .. length-1."""
    coeffs = spec.coefficients
    mask = PeriodMask(np.ones(coeffs.size, dtype=bool), coeffs.size)
    return eval_g(coeffs, mask, np.arange(spec.length))


def gen_periodic(spec: SynthSpec, rng: np.random.Generator) -> np.ndarray:
    """p_t ~ N(z_t, sigma_p)."""
    return periodic_state(spec) + rng.normal(0.0, spec.sigma_p, size=spec.length)


def compose(l: np.ndarray, p: np.ndarray, kind: str) -> np.ndarray:
    """Elementwise (l+p), (l+p)^2 or (l+p)^3."""
    kind = validate_choice(kind, COMPOSITIONS, 'composition')
    l = np.asarray(l, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    if l.shape != p.shape:
        raise DataError(f"Component shapes differ: {l.shape} vs {p.shape}")
    power = {'linear': 1, 'quadratic': 2, 'cubic': 3}[kind]
    return (l + p) ** power


def gen_components(spec: SynthSpec) -> pd.DataFrame:
    """Hidden streams t, l, p, z and the observed x."""
    rng = np.random.default_rng(spec.seed)
    l = gen_ar(spec, rng)
    p = gen_periodic(spec, rng)
    return pd.DataFrame({
        't': np.arange(spec.length),
        'l': l,
        'p': p,
        'z': periodic_state(spec),
        'x': compose(l, p, spec.compose),
    })


def gen_dataset(spec: SynthSpec) -> tuple[Series, SplitSpec]:
    """The observed series only, with its train/val/test split."""
    components = gen_components(spec)
    logger.info(f"Generated {spec.series_id}: {spec.length} points, {spec.compose} composition")
    return Series(spec.series_id, components['x'].to_numpy(), 0), spec.split
