"""
Joint training of the expansion network and the periodic coefficients.

Two Adam groups run side by side: network weights at lr_theta and the
per-series periodic coefficients at lr_phi. Masks chosen at initialization
stay frozen, so masked atoms never move.
"""

from __future__ import annotations

import logging
import os
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from config import (
    BATCH_SIZE,
    HORIZON,
    ITERATIONS,
    LAYER_WIDTH,
    LAYERS,
    LOG_EVERY,
    LOOKBACK_MULTIPLIER,
    LOSS,
    LR_PHI,
    LR_THETA,
    MASE_LAG,
    PERIOD_J,
    SEED,
    TRAINING_HORIZON,
)
from data.presets import TRAINING_PRESETS
from utils.constants import LOSSES, VARIANTS
from utils.fileio import read_json
from utils.network import (
    ForecastDecomposition,
    NetworkParams,
    VariantFlags,
    forward_with_cache,
    init_network,
    load_checkpoint,
    network_backward,
    save_checkpoint,
)
from utils.periodicity import (
    PeriodicCoefficients,
    PeriodicGradient,
    PeriodMask,
    SeriesPeriods,
    eval_g,
    grad_g,
    match_periods,
    random_coefficients,
)
from utils.timeseries import Series, SplitSpec, WindowBatch, sample_batch
from utils.training.losses import loss_and_grad
from utils.training.optimizer import OptimizerState, adam_step
from utils.validation import (
    DataError,
    NumericalError,
    validate_choice,
    validate_non_negative_int,
    validate_positive_float,
    validate_positive_int,
)

logger = logging.getLogger('depts.training')

# Variants whose periodic coefficients stay at their initial values
FROZEN_PHI_VARIANTS = ('FixPeriod', 'NoPeriod')


class DivergenceError(NumericalError):
    """Raised when training produces a non-finite loss or parameter."""
    pass


# =============================================================================
# Configuration
# =============================================================================

@dataclass(frozen=True)
class TrainingConfig:
    """Hyper-parameters of one training run."""
    iterations: int = ITERATIONS
    batch_size: int = BATCH_SIZE
    loss: str = LOSS
    lr_theta: float = LR_THETA
    lr_phi: float = LR_PHI
    lookback_multiplier: int = LOOKBACK_MULTIPLIER
    horizon: int = HORIZON
    training_horizon: int = TRAINING_HORIZON
    seed: int = SEED
    variant: str = 'DEPTS'
    layers: int = LAYERS
    width: int = LAYER_WIDTH
    mase_lag: int = MASE_LAG
    period_budget: int = PERIOD_J
    log_every: int = LOG_EVERY

    def __post_init__(self) -> None:
        set_ = object.__setattr__
        set_(self, 'iterations', validate_non_negative_int(self.iterations, 'iterations'))
        set_(self, 'batch_size', validate_positive_int(self.batch_size, 'batch_size'))
        set_(self, 'loss', validate_choice(self.loss, LOSSES, 'loss'))
        set_(self, 'lr_theta', validate_positive_float(self.lr_theta, 'lr_theta', allow_zero=True))
        set_(self, 'lr_phi', validate_positive_float(self.lr_phi, 'lr_phi', allow_zero=True))
        set_(self, 'lookback_multiplier', validate_positive_int(self.lookback_multiplier, 'lookback_multiplier'))
        set_(self, 'horizon', validate_positive_int(self.horizon, 'horizon'))
        set_(self, 'training_horizon', validate_positive_int(self.training_horizon, 'training_horizon'))
        set_(self, 'seed', validate_non_negative_int(self.seed, 'seed'))
        set_(self, 'variant', validate_choice(self.variant, VARIANTS, 'variant'))
        set_(self, 'layers', validate_positive_int(self.layers, 'layers'))
        set_(self, 'width', validate_positive_int(self.width, 'width'))
        set_(self, 'mase_lag', validate_positive_int(self.mase_lag, 'mase_lag'))
        set_(self, 'period_budget', validate_positive_int(self.period_budget, 'period_budget'))
        set_(self, 'log_every', validate_positive_int(self.log_every, 'log_every'))
        if self.loss == 'mase' and self.lookback <= self.mase_lag:
            raise DataError(f"MASE needs lookback > mase_lag ({self.lookback} <= {self.mase_lag})")

    @property
    def lookback(self) -> int:
        return self.lookback_multiplier * self.horizon

    @property
    def flags(self) -> VariantFlags:
        return VariantFlags.from_variant(self.variant)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> TrainingConfig:
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise DataError(f"Unknown training option(s): {', '.join(unknown)}")
        return cls(**data)

    @classmethod
    def from_preset(cls, name: str, split: str | None = None, **overrides) -> TrainingConfig:
        """
        Full-scale published settings for a benchmark, with overrides.

        `split` picks the period budget J of one published test split;
        the preset's first split is used when omitted.
        """
        preset_name = validate_choice(name, TRAINING_PRESETS, 'preset')
        preset = dict(TRAINING_PRESETS[preset_name])
        multipliers = preset.pop('lookback_multipliers')
        budgets = preset.pop('period_budgets')
        if split is None:
            split = next(iter(budgets))
        preset['period_budget'] = budgets[validate_choice(split, budgets, f'{preset_name} split')]
        preset['lookback_multiplier'] = multipliers[0]
        preset.update(overrides)
        return cls.from_dict(preset)

    @classmethod
    def load(cls, path: str | os.PathLike) -> TrainingConfig:
        path = Path(path)
        if not path.is_file():
            raise DataError(f"Training config not found: {path}")
        try:
            document = read_json(path)
        except ValueError as e:
            raise DataError(f"Could not parse {path}: {e}") from e
        if not isinstance(document, dict):
            raise DataError(f"{path}: training config must be a JSON object")
        return cls.from_dict(document)


# =============================================================================
# Model
# =============================================================================

@dataclass
class TrainedModel:
    """Network weights, per-series periodicity and the run that produced them."""
    params: NetworkParams
    periods: list[SeriesPeriods]
    config: TrainingConfig
    loss_history: list[float] = field(default_factory=list)

    @property
    def series_ids(self) -> list[str]:
        return [p.series_id for p in self.periods]

    @property
    def flags(self) -> VariantFlags:
        return self.config.flags

    @property
    def final_loss(self) -> float | None:
        return self.loss_history[-1] if self.loss_history else None

    def series_index(self, series_id: str) -> int:
        try:
            return self.series_ids.index(series_id)
        except ValueError as e:
            raise DataError(f"Model was not trained on series {series_id!r}") from e

    def periodic_state(self, series_index: np.ndarray, anchors: np.ndarray) -> np.ndarray:
        return periodic_states(self.periods, series_index, anchors, self.params.lookback, self.params.horizon)

    def predict(self, series_index: np.ndarray | int, lookbacks: np.ndarray, anchors: np.ndarray | int) -> ForecastDecomposition:
        """Forecast decomposition for windows ending at `anchors`."""
        lookbacks = np.asarray(lookbacks, dtype=np.float64)
        single = lookbacks.ndim == 1
        lookbacks2 = lookbacks[None, :] if single else lookbacks
        idx = np.broadcast_to(np.asarray(series_index, dtype=np.int64), (lookbacks2.shape[0],))
        anchors = np.broadcast_to(np.asarray(anchors, dtype=np.int64), (lookbacks2.shape[0],))
        z = self.periodic_state(idx, anchors)
        decomposition, _, _ = forward_with_cache(self.params, lookbacks2, z, idx, self.flags)
        return decomposition.squeezed() if single else decomposition

    def save(self, path: str | os.PathLike) -> Path:
        extra: dict[str, np.ndarray] = {}
        for i, entry in enumerate(self.periods):
            for key, arr in entry.coefficients.to_arrays().items():
                extra[f'periods.{i}.{key}'] = arr
            extra[f'periods.{i}.mask'] = entry.mask.bits
            extra[f'periods.{i}.budget'] = np.array([entry.mask.budget])
        extra['loss_history'] = np.asarray(self.loss_history, dtype=np.float64)
        meta = {'config': self.config.to_dict(), 'series_ids': self.series_ids}
        return save_checkpoint(path, self.params, self.flags, extra, meta)

    @classmethod
    def load(cls, path: str | os.PathLike) -> TrainedModel:
        params, _, extra, meta = load_checkpoint(path)
        try:
            config = TrainingConfig.from_dict(meta['config'])
            periods = []
            for i, series_id in enumerate(meta['series_ids']):
                coeffs = PeriodicCoefficients.from_arrays({
                    key: extra[f'periods.{i}.{key}'] for key in ('base', 'amplitude', 'frequency', 'phase')
                })
                mask = PeriodMask(extra[f'periods.{i}.mask'], int(extra[f'periods.{i}.budget'][0]))
                periods.append(SeriesPeriods(series_id, coeffs, mask))
        except KeyError as e:
            raise DataError(f"Checkpoint {path} is missing {e}") from e
        return cls(params, periods, config, extra.get('loss_history', np.zeros(0)).tolist())


def periodic_states(
    periods: Sequence[SeriesPeriods],
    series_index: np.ndarray,
    anchors: np.ndarray,
    lookback: int,
    horizon: int,
) -> np.ndarray:
    """z at absolute times anchor-L .. anchor+H-1 for each window, shape (B, L+H)."""
    series_index = np.asarray(series_index, dtype=np.int64)
    times = np.asarray(anchors, dtype=np.int64)[:, None] + np.arange(-lookback, horizon)
    z = np.empty(times.shape)
    for s in np.unique(series_index).tolist():
        rows = series_index == s
        z[rows] = eval_g(periods[s].coefficients, periods[s].mask, times[rows])
    return z


# =============================================================================
# Gradients
# =============================================================================

@dataclass
class BatchGradients:
    loss: float
    theta: dict[str, np.ndarray]
    phi: list[PeriodicGradient]


def backward(
    params: NetworkParams,
    periods: Sequence[SeriesPeriods],
    batch: WindowBatch,
    variant: str = 'DEPTS',
    loss: str = 'smape',
    mase_lag: int = MASE_LAG,
) -> BatchGradients:
    """
    Mean batch loss and its exact gradients through the network and g.

    Periodic coefficients of FixPeriod and NoPeriod runs get zero gradients;
    masked atoms always do.
    """
    if len(batch) == 0:
        raise DataError("Empty batch")
    flags = VariantFlags.from_variant(variant)
    L, H = params.lookback, params.horizon
    times = batch.anchors[:, None] + np.arange(-L, H)
    z = periodic_states(periods, batch.series_index, batch.anchors, L, H)

    decomposition, cache, _ = forward_with_cache(params, batch.lookbacks, z, batch.series_index, flags)
    value, d_total = loss_and_grad(loss, decomposition.total, batch.targets, batch.lookbacks, mase_lag)
    if not np.isfinite(value):
        raise DivergenceError(f"Non-finite {loss} loss {value}")

    theta_grads, dz = network_backward(params, cache, d_total)

    phi_grads = [PeriodicGradient.zeros(p.coefficients.size) for p in periods]
    if variant not in FROZEN_PHI_VARIANTS:
        for s in np.unique(batch.series_index).tolist():
            rows = batch.series_index == s
            phi_grads[s] = grad_g(periods[s].coefficients, periods[s].mask, times[rows], dz[rows])

    return BatchGradients(value, theta_grads, phi_grads)


# =============================================================================
# Training loop
# =============================================================================

def _phi_arrays(periods: Sequence[SeriesPeriods]) -> dict[str, np.ndarray]:
    arrays = {}
    for i, entry in enumerate(periods):
        for key, arr in entry.coefficients.to_arrays().items():
            arrays[f'{i}.{key}'] = arr
    return arrays


def _phi_grad_arrays(grads: Sequence[PeriodicGradient]) -> dict[str, np.ndarray]:
    arrays = {}
    for i, grad in enumerate(grads):
        for key, arr in grad.to_arrays().items():
            arrays[f'{i}.{key}'] = arr
    return arrays


def _first_non_finite(arrays: dict[str, np.ndarray]) -> str | None:
    for name, arr in arrays.items():
        if not np.all(np.isfinite(arr)):
            return name
    return None


def _training_regions(dataset: Sequence[Series], splits: SplitSpec | Sequence[SplitSpec]) -> list[Series]:
    if isinstance(splits, SplitSpec):
        splits = [splits] * len(dataset)
    if len(splits) != len(dataset):
        raise DataError(f"{len(splits)} splits for {len(dataset)} series")
    regions = []
    for series, spec in zip(dataset, splits):
        spec.validate(series)
        regions.append(series.slice(series.t0, spec.train_end))
    return regions


def train(
    config: TrainingConfig,
    dataset: Sequence[Series],
    splits: SplitSpec | Sequence[SplitSpec],
    init: Sequence[SeriesPeriods] | None = None,
) -> TrainedModel:
    """
    Train one model on the training regions of `dataset`.

    Args:
        config: Hyper-parameters and variant
        dataset: Series to train on (one periodic scale each)
        splits: One split for all series, or one per series
        init: Initialized periods per series; RandInit draws its own

    Raises:
        DataError: Missing initialization or windows that do not fit
        DivergenceError: Non-finite loss or parameters
    """
    if not dataset:
        raise DataError("Empty dataset")
    regions = _training_regions(dataset, splits)
    rng = np.random.default_rng(config.seed)
    L, H = config.lookback, config.horizon

    params = init_network(L, H, config.width, config.layers, len(dataset), rng)

    if config.variant == 'RandInit':
        periods = []
        for region in regions:
            phi, mask = random_coefficients(region, config.period_budget, rng)
            periods.append(SeriesPeriods(region.id, phi, mask))
    else:
        if init is None:
            raise DataError(f"Variant {config.variant} needs initialized periodic coefficients")
        periods = [
            SeriesPeriods(e.series_id, e.coefficients.copy(), e.mask, e.report)
            for e in match_periods(init, dataset)
        ]

    model = TrainedModel(params, periods, config)
    if config.iterations == 0:
        return model

    update_phi = config.variant not in FROZEN_PHI_VARIANTS
    theta = params.to_arrays()
    theta_state = OptimizerState.for_params(theta)
    phi = _phi_arrays(periods)
    phi_state = OptimizerState.for_params(phi)
    history: list[float] = []

    logger.info(
        f"Training {config.variant} on {len(dataset)} series: L={L}, H={H}, "
        f"{config.layers}x{config.width}, {config.iterations} iterations"
    )

    for iteration in range(1, config.iterations + 1):
        batch = sample_batch(regions, L, H, config.training_horizon, config.batch_size, rng)
        try:
            grads = backward(model.params, model.periods, batch, config.variant, config.loss, config.mase_lag)
        except DivergenceError as e:
            raise DivergenceError(f"Iteration {iteration}: {e}") from e
        history.append(grads.loss)

        stepped, theta_state = adam_step(theta, grads.theta, theta_state, config.lr_theta)
        bad = _first_non_finite(stepped)
        if bad is not None:
            raise DivergenceError(f"Iteration {iteration}: non-finite network parameter {bad}")
        # theta views the arrays of model.params
        for name, value in stepped.items():
            np.copyto(theta[name], value)

        if update_phi:
            phi, phi_state = adam_step(phi, _phi_grad_arrays(grads.phi), phi_state, config.lr_phi)
            bad = _first_non_finite(phi)
            if bad is not None:
                raise DivergenceError(f"Iteration {iteration}: non-finite periodic coefficient {bad}")
            model.periods = [
                SeriesPeriods(
                    entry.series_id,
                    PeriodicCoefficients.from_arrays({k: phi[f'{i}.{k}'] for k in ('base', 'amplitude', 'frequency', 'phase')}),
                    entry.mask,
                    entry.report,
                )
                for i, entry in enumerate(model.periods)
            ]

        if iteration % config.log_every == 0 or iteration == config.iterations:
            trailing = float(np.mean(history[-config.log_every:]))
            logger.info(f"Iteration {iteration}/{config.iterations}: {config.loss} {trailing:.4f}")

    model.loss_history = history
    return model


# =============================================================================
# Ensembles
# =============================================================================

def member_configs(config: TrainingConfig, lookback_multipliers: Sequence[int], seeds: Sequence[int]) -> list[TrainingConfig]:
    """One config per (lookback multiplier, seed), multipliers outermost."""
    if not lookback_multipliers or not seeds:
        raise DataError("Ensemble needs at least one lookback multiplier and one seed")
    return [replace(config, lookback_multiplier=m, seed=s) for m in lookback_multipliers for s in seeds]


def _train_member(args: tuple) -> TrainedModel:
    return train(*args)


def train_ensemble(
    config: TrainingConfig,
    dataset: Sequence[Series],
    splits: SplitSpec | Sequence[SplitSpec],
    init: Sequence[SeriesPeriods] | None,
    lookback_multipliers: Sequence[int],
    seeds: Sequence[int],
    jobs: int = 1,
) -> list[TrainedModel]:
    """Train every ensemble member, in worker processes when jobs > 1."""
    jobs = validate_positive_int(jobs, 'jobs')
    members = member_configs(config, lookback_multipliers, seeds)
    tasks = [(member, list(dataset), splits, init) for member in members]
    logger.info(f"Training {len(members)} ensemble member(s) with {jobs} job(s)")

    if jobs == 1 or len(members) == 1:
        return [_train_member(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(members))) as pool:
        return list(pool.map(_train_member, tasks))
