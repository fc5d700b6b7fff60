"""
Periodicity module.

g(t) = A0 + sum_k M_k A_k cos(2 pi F_k t + P_k) over absolute time t, its
gradients, and the two-stage initialization: DCT candidate extraction followed
by greedy selection of atoms that lower the validation DTW discrepancy.
"""

from __future__ import annotations

import logging
import os
import time
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from utils.constants import COEFFICIENTS_FORMAT_VERSION
from utils.fileio import atomic_write_json, read_json
from utils.signal import CosineAtom, atom_arrays, dct2, dtw, refine_atom
from utils.timeseries import Series, SplitSpec, split
from utils.validation import DataError, validate_positive_int

logger = logging.getLogger('depts.periodicity')

TWO_PI = 2.0 * np.pi


# =============================================================================
# Types
# =============================================================================

@dataclass
class PeriodicCoefficients:
    """Base level A0 plus K cosine atoms stored as parallel arrays."""
    base: float
    amplitude: np.ndarray
    frequency: np.ndarray
    phase: np.ndarray

    def __post_init__(self) -> None:
        self.base = float(self.base)
        self.amplitude = np.asarray(self.amplitude, dtype=np.float64).ravel()
        self.frequency = np.asarray(self.frequency, dtype=np.float64).ravel()
        self.phase = np.asarray(self.phase, dtype=np.float64).ravel()
        if not (self.amplitude.size == self.frequency.size == self.phase.size):
            raise DataError("Atom arrays must have equal lengths")
        if not np.isfinite(self.base) or not all(
            np.all(np.isfinite(a)) for a in (self.amplitude, self.frequency, self.phase)
        ):
            raise DataError("Periodic coefficients must be finite")

    @property
    def size(self) -> int:
        """Number of cosine atoms K."""
        return int(self.amplitude.size)

    @property
    def atoms(self) -> list[CosineAtom]:
        return [
            CosineAtom(float(a), float(f), float(p))
            for a, f, p in zip(self.amplitude, self.frequency, self.phase)
        ]

    @classmethod
    def from_atoms(cls, base: float, atoms: Sequence[CosineAtom]) -> PeriodicCoefficients:
        return cls(
            base,
            np.array([a.amplitude for a in atoms], dtype=np.float64),
            np.array([a.frequency for a in atoms], dtype=np.float64),
            np.array([a.phase for a in atoms], dtype=np.float64),
        )

    def copy(self) -> PeriodicCoefficients:
        return PeriodicCoefficients(self.base, self.amplitude.copy(), self.frequency.copy(), self.phase.copy())

    def to_arrays(self) -> dict[str, np.ndarray]:
        return {
            'base': np.array([self.base]),
            'amplitude': self.amplitude.copy(),
            'frequency': self.frequency.copy(),
            'phase': self.phase.copy(),
        }

    @classmethod
    def from_arrays(cls, arrays: dict[str, np.ndarray]) -> PeriodicCoefficients:
        return cls(float(arrays['base'][0]), arrays['amplitude'], arrays['frequency'], arrays['phase'])


@dataclass
class PeriodMask:
    """Binary selection over the K atoms, at most `budget` enabled."""
    bits: np.ndarray
    budget: int

    def __post_init__(self) -> None:
        self.bits = np.asarray(self.bits, dtype=bool).ravel()
        self.budget = int(self.budget)
        if self.budget < 0:
            raise DataError(f"Mask budget must be >= 0, got {self.budget}")
        if int(self.bits.sum()) > self.budget:
            raise DataError(f"Mask enables {int(self.bits.sum())} atoms, budget is {self.budget}")

    @property
    def enabled(self) -> int:
        return int(self.bits.sum())

    @classmethod
    def none(cls, size: int, budget: int) -> PeriodMask:
        return cls(np.zeros(size, dtype=bool), budget)


@dataclass
class InitReport:
    """Outcome of the greedy selection stage."""
    selected_indices: list[int] = field(default_factory=list)
    costs: list[float] = field(default_factory=list)
    baseline_cost: float | None = None
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return {
            'selected_indices': list(self.selected_indices),
            'costs': list(self.costs),
            'baseline_cost': self.baseline_cost,
            'wall_time': self.wall_time,
        }

    @classmethod
    def from_dict(cls, data: dict) -> InitReport:
        return cls(
            selected_indices=[int(i) for i in data.get('selected_indices', [])],
            costs=[float(c) for c in data.get('costs', [])],
            baseline_cost=data.get('baseline_cost'),
            wall_time=float(data.get('wall_time', 0.0)),
        )


@dataclass
class PeriodicGradient:
    """Gradients of a scalar with respect to each coefficient array."""
    base: float
    amplitude: np.ndarray
    frequency: np.ndarray
    phase: np.ndarray

    @classmethod
    def zeros(cls, size: int) -> PeriodicGradient:
        return cls(0.0, np.zeros(size), np.zeros(size), np.zeros(size))

    def to_arrays(self) -> dict[str, np.ndarray]:
        return {
            'base': np.array([self.base]),
            'amplitude': self.amplitude,
            'frequency': self.frequency,
            'phase': self.phase,
        }


@dataclass
class SeriesPeriods:
    """Initialized periodicity state of one series."""
    series_id: str
    coefficients: PeriodicCoefficients
    mask: PeriodMask
    report: InitReport | None = None


# =============================================================================
# Evaluation and gradients
# =============================================================================

def _check(phi: PeriodicCoefficients, mask: PeriodMask) -> None:
    if mask.bits.size != phi.size:
        raise DataError(f"Mask length {mask.bits.size} does not match {phi.size} atoms")


def _angles(phi: PeriodicCoefficients, t: np.ndarray) -> np.ndarray:
    return TWO_PI * t[..., None] * phi.frequency + phi.phase


def eval_g(phi: PeriodicCoefficients, mask: PeriodMask, t: np.ndarray | Sequence[int]) -> np.ndarray:
    """z = A0 + sum_k M_k A_k cos(2 pi F_k t + P_k), elementwise over t (any shape)."""
    _check(phi, mask)
    t = np.asarray(t, dtype=np.float64)
    if phi.size == 0:
        return np.full(t.shape, phi.base)
    return phi.base + np.cos(_angles(phi, t)) @ np.where(mask.bits, phi.amplitude, 0.0)


def grad_g(
    phi: PeriodicCoefficients,
    mask: PeriodMask,
    t: np.ndarray | Sequence[int],
    upstream: np.ndarray | Sequence[float],
) -> PeriodicGradient:
    """Chain an upstream dLoss/dz (same shape as t) into coefficient gradients."""
    _check(phi, mask)
    t = np.asarray(t, dtype=np.float64)
    upstream = np.asarray(upstream, dtype=np.float64)
    if upstream.shape != t.shape:
        raise DataError(f"Upstream shape {upstream.shape} does not match time shape {t.shape}")

    if phi.size == 0:
        return PeriodicGradient(float(upstream.sum()), np.zeros(0), np.zeros(0), np.zeros(0))

    on = mask.bits.astype(np.float64)
    angles = _angles(phi, t).reshape(-1, phi.size)
    up = upstream.reshape(-1)
    cos_term = up @ np.cos(angles)
    sin_up = up[:, None] * np.sin(angles)
    sin_term = sin_up.sum(axis=0)
    sin_t_term = t.reshape(-1) @ sin_up

    return PeriodicGradient(
        base=float(up.sum()),
        amplitude=on * cos_term,
        frequency=-on * phi.amplitude * TWO_PI * sin_t_term,
        phase=-on * phi.amplitude * sin_term,
    )


# =============================================================================
# Initialization
# =============================================================================

def _candidate_atoms(train: Series, K: int, refine: bool) -> tuple[float, list[CosineAtom]]:
    """Top-K DCT atoms in amplitude order, on the series-local index."""
    x = train.values
    n = x.size
    base, amplitude, frequency, phase = atom_arrays(dct2(x), n)

    # bin 0 is the base level
    order = np.argsort(-amplitude[1:], kind='stable')[:K] + 1

    if not refine:
        return base, [CosineAtom(float(amplitude[k]), float(frequency[k]), float(phase[k])) for k in order]

    residual = x - base
    refined: dict[float, CosineAtom] = {}
    for k in order.tolist():
        candidates = sorted({min(max(j, 0), n) / (2 * n) for j in (k - 1, k, k + 1)})
        atom = refine_atom(residual, candidates)
        if atom.frequency not in refined:
            refined[atom.frequency] = atom
    atoms = sorted(refined.values(), key=lambda a: -a.amplitude)
    return base, atoms


def _anchor_phase(atom: CosineAtom, t0: int) -> CosineAtom:
    """Rewrite an atom fitted on n = t - t0 as a function of absolute t."""
    phase = (atom.phase - TWO_PI * atom.frequency * t0) % TWO_PI
    return CosineAtom(atom.amplitude, atom.frequency, float(phase))


def init_periods(
    train: Series,
    val: Series,
    K: int,
    J: int,
    refine: bool = True,
) -> tuple[PeriodicCoefficients, PeriodMask, InitReport]:
    """
    Initialize periodic coefficients and their frozen mask for one series.

    Candidates are the K largest DCT-II atoms of the training values (re-fitted
    by least squares when `refine` is set). Atoms are then tried in amplitude
    order and kept only if they strictly lower the DTW distance between g and
    the validation values, until J atoms are enabled.

    Keep `refine` on when amplitudes must match the true periods. A raw DCT
    atom has a fixed phase and a frequency on the k / 2n grid, so one cosine
    spreads over several neighbouring atoms of smaller amplitude: for
    30 + 8 cos(2 pi t / 50 + 0.4) the unrefined path enables four atoms led
    by amplitude 4.4, the refined one a single atom at 0.02 with amplitude 8.

    Raises:
        DataError: If the train/val regions or K/J are out of range
    """
    K = validate_positive_int(K, 'K')
    J = validate_positive_int(J, 'J', max_val=K)
    if len(train) < 2 * K:
        raise DataError(f"Training region of {len(train)} points is shorter than 2K = {2 * K}")
    if len(val) == 0:
        raise DataError("Validation region is empty")

    started = time.perf_counter()
    report = InitReport()

    if np.ptp(train.values) == 0:
        phi = PeriodicCoefficients(float(train.values[0]), np.zeros(0), np.zeros(0), np.zeros(0))
        report.wall_time = time.perf_counter() - started
        logger.info(f"Series {train.id!r}: constant training values, no atoms")
        return phi, PeriodMask.none(0, J), report

    base, atoms = _candidate_atoms(train, K, refine)
    phi = PeriodicCoefficients.from_atoms(base, [_anchor_phase(a, train.t0) for a in atoms])

    t_val = val.time_index().astype(np.float64)
    target = val.values
    bits = np.zeros(phi.size, dtype=bool)
    current = np.full(t_val.shape, phi.base)
    best = dtw(current, target)
    report.baseline_cost = best

    for k in range(phi.size):
        if bits.sum() >= J:
            break
        trial = current + phi.amplitude[k] * np.cos(TWO_PI * phi.frequency[k] * t_val + phi.phase[k])
        cost = dtw(trial, target)
        if cost < best:
            bits[k] = True
            current = trial
            best = cost
            report.selected_indices.append(k)
            report.costs.append(cost)
            logger.debug(
                f"Series {train.id!r}: accepted atom {k} "
                f"(A={phi.amplitude[k]:.4g}, F={phi.frequency[k]:.6g}), DTW {cost:.6g}"
            )

    report.wall_time = time.perf_counter() - started
    logger.info(
        f"Series {train.id!r}: selected {int(bits.sum())}/{phi.size} atoms "
        f"in {report.wall_time:.3f}s"
    )
    return phi, PeriodMask(bits, J), report


def init_periods_many(
    dataset: Sequence[Series],
    splits: SplitSpec | Sequence[SplitSpec],
    K: int,
    J: int,
    refine: bool = True,
) -> list[SeriesPeriods]:
    """Independent initialization per series."""
    if isinstance(splits, SplitSpec):
        splits = [splits] * len(dataset)
    if len(splits) != len(dataset):
        raise DataError(f"{len(splits)} splits for {len(dataset)} series")

    result = []
    for series, spec in zip(dataset, splits):
        train, val, _ = split(series, spec)
        phi, mask, report = init_periods(train, val, K, J, refine=refine)
        result.append(SeriesPeriods(series.id, phi, mask, report))
    return result


def random_coefficients(train: Series, J: int, rng: np.random.Generator) -> tuple[PeriodicCoefficients, PeriodMask]:
    """J random atoms around the training mean, all enabled."""
    J = validate_positive_int(J, 'J')
    if len(train) == 0:
        raise DataError("Training region is empty")
    scale = float(np.std(train.values))
    phi = PeriodicCoefficients(
        float(np.mean(train.values)),
        rng.uniform(0.0, scale, size=J),
        rng.uniform(0.0, 0.5, size=J),
        rng.uniform(0.0, TWO_PI, size=J),
    )
    return phi, PeriodMask(np.ones(J, dtype=bool), J)


# =============================================================================
# Coefficient documents
# =============================================================================

def coefficients_to_dict(entries: Sequence[SeriesPeriods]) -> dict:
    """JSON-ready coefficient document."""
    budget = max((e.mask.budget for e in entries), default=0)
    series = []
    for entry in entries:
        phi, mask = entry.coefficients, entry.mask
        series.append({
            'series_id': entry.series_id,
            'A0': phi.base,
            'budget': mask.budget,
            'atoms': [
                {**atom.to_dict(), 'enabled': bool(bit)}
                for atom, bit in zip(phi.atoms, mask.bits)
            ],
            'report': entry.report.to_dict() if entry.report is not None else None,
        })
    return {'version': COEFFICIENTS_FORMAT_VERSION, 'budget': budget, 'series': series}


def coefficients_from_dict(document: dict) -> list[SeriesPeriods]:
    """Parse a coefficient document."""
    try:
        version = int(document.get('version', COEFFICIENTS_FORMAT_VERSION))
        if version != COEFFICIENTS_FORMAT_VERSION:
            raise DataError(f"Unsupported coefficient document version {version}")
        default_budget = int(document.get('budget', 0))
        entries = []
        for item in document['series']:
            atoms = item.get('atoms', [])
            phi = PeriodicCoefficients.from_atoms(
                float(item['A0']),
                [CosineAtom(float(a['amplitude']), float(a['frequency']), float(a['phase'])) for a in atoms],
            )
            bits = np.array([bool(a.get('enabled', False)) for a in atoms], dtype=bool)
            budget = int(item.get('budget', max(default_budget, int(bits.sum()))))
            report = InitReport.from_dict(item['report']) if item.get('report') else None
            entries.append(SeriesPeriods(str(item['series_id']), phi, PeriodMask(bits, budget), report))
        return entries
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, DataError):
            raise
        raise DataError(f"Malformed coefficient document: {e}") from e


def save_coefficients(entries: Sequence[SeriesPeriods], path: str | os.PathLike) -> Path:
    return atomic_write_json(path, coefficients_to_dict(entries))


def load_coefficients(path: str | os.PathLike) -> list[SeriesPeriods]:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"Coefficient document not found: {path}")
    try:
        document = read_json(path)
    except ValueError as e:
        raise DataError(f"Could not parse {path}: {e}") from e
    return coefficients_from_dict(document)


def match_periods(entries: Sequence[SeriesPeriods], series: Sequence[Series]) -> list[SeriesPeriods]:
    """Reorder coefficient entries to follow the series order."""
    by_id = {e.series_id: e for e in entries}
    missing = [s.id for s in series if s.id not in by_id]
    if missing:
        raise DataError(f"No periodic coefficients for series {', '.join(missing)}")
    return [by_id[s.id] for s in series]
