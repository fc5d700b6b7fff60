"""
The N-layer triply residual expansion network.

Each layer runs a periodic block on the periodic state z and a local block on
the observed lookback x, then updates three residual streams:

    x(l) = x(l-1) - v_back(l) - u_back(l)
    z(l) = z(l-1) - v(l)
    xhat(l) = xhat(l-1) + u_fore(l) + v_fore(l)

Ablation flags remove individual connections.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from utils.constants import VARIANTS
from utils.network.blocks import (
    LocalCache,
    PeriodicCache,
    local_backward,
    local_forward,
    periodic_backward,
    periodic_forward,
)
from utils.network.params import NetworkParams, ShapeError
from utils.validation import validate_choice


@dataclass(frozen=True)
class VariantFlags:
    """Structural ablation switches."""
    drop_local_input_subtraction: bool = False
    drop_periodic_forecast: bool = False
    drop_z_residual: bool = False
    no_period_mode: bool = False

    @classmethod
    def from_variant(cls, variant: str) -> VariantFlags:
        """Flags for a named variant; RandInit and FixPeriod only change training."""
        variant = validate_choice(variant, VARIANTS, 'variant')
        return {
            'DEPTS-1': cls(drop_local_input_subtraction=True),
            'DEPTS-2': cls(drop_periodic_forecast=True),
            'DEPTS-3': cls(drop_z_residual=True),
            'NoPeriod': cls(no_period_mode=True),
        }.get(variant, cls())

    def to_dict(self) -> dict:
        return {
            'drop_local_input_subtraction': self.drop_local_input_subtraction,
            'drop_periodic_forecast': self.drop_periodic_forecast,
            'drop_z_residual': self.drop_z_residual,
            'no_period_mode': self.no_period_mode,
        }

    @classmethod
    def from_dict(cls, data: dict) -> VariantFlags:
        return cls(**{k: bool(data.get(k, False)) for k in cls().to_dict()})


@dataclass
class ForecastDecomposition:
    """
    Forecast and its split into local momenta and global periodicity.

    Per-layer arrays are stacked along a leading layer axis. Unbatched calls
    give vectors; batched calls keep a batch axis after the layer axis.
    """
    total: np.ndarray
    local_part: np.ndarray
    periodic_part: np.ndarray
    x_residue: np.ndarray
    z_residue: np.ndarray
    local_back: np.ndarray
    local_fore: np.ndarray
    periodic_back: np.ndarray
    periodic_fore: np.ndarray
    local_inputs: np.ndarray
    periodic_inputs: np.ndarray

    def squeezed(self) -> ForecastDecomposition:
        """Drop a batch axis of size one."""
        return ForecastDecomposition(
            total=self.total[0],
            local_part=self.local_part[0],
            periodic_part=self.periodic_part[0],
            x_residue=self.x_residue[0],
            z_residue=self.z_residue[0],
            local_back=self.local_back[:, 0],
            local_fore=self.local_fore[:, 0],
            periodic_back=self.periodic_back[:, 0],
            periodic_fore=self.periodic_fore[:, 0],
            local_inputs=self.local_inputs[:, 0],
            periodic_inputs=self.periodic_inputs[:, 0],
        )


@dataclass
class ForwardCache:
    flags: VariantFlags
    series_index: np.ndarray
    local: list[LocalCache]
    periodic: list[PeriodicCache | None]
    batch: int


def _prepare(params: NetworkParams, x: np.ndarray, z: np.ndarray, series_index) -> tuple:
    L, H = params.lookback, params.horizon
    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    single = x.ndim == 1
    x2 = x[None, :] if single else x
    z2 = z[None, :] if z.ndim == 1 else z
    if x2.ndim != 2 or x2.shape[1] != L:
        raise ShapeError(f"x must have trailing length L={L}, got shape {x.shape}")
    if z2.ndim != 2 or z2.shape[1] != L + H or z2.shape[0] != x2.shape[0]:
        raise ShapeError(f"z must have shape ({x2.shape[0]}, {L + H}), got {z.shape}")
    idx = np.broadcast_to(np.asarray(series_index, dtype=np.int64), (x2.shape[0],))
    if idx.min() < 0 or idx.max() >= params.n_series:
        raise ShapeError(f"series_index out of range for {params.n_series} series")
    return x2, z2, idx, single


def forward_with_cache(
    params: NetworkParams,
    x: np.ndarray,
    z: np.ndarray,
    series_index,
    flags: VariantFlags,
) -> tuple[ForecastDecomposition, ForwardCache, bool]:
    """Batched forward pass keeping what network_backward needs."""
    L, H = params.lookback, params.horizon
    x2, z2, idx, single = _prepare(params, x, z, series_index)
    batch = x2.shape[0]
    scale = params.alpha[idx]

    zeros_back = np.zeros((batch, L))
    zeros_fore = np.zeros((batch, H))

    x_res = x2 - z2[:, :L] if flags.no_period_mode else x2
    z_res = z2
    total = np.zeros((batch, H))
    local_part = np.zeros((batch, H))
    periodic_part = np.zeros((batch, H))

    terms: dict[str, list[np.ndarray]] = {k: [] for k in ('ub', 'uf', 'vb', 'vf', 'xin', 'zin')}
    cache = ForwardCache(flags, idx, [], [], batch)

    for layer in params.layers:
        if flags.no_period_mode:
            v_back, v_fore, p_cache = zeros_back, zeros_fore, None
            x_tilde = x_res
        else:
            v_back, v_fore, p_cache = periodic_forward(layer.periodic, z_res, scale)
            x_tilde = x2 if flags.drop_local_input_subtraction else x_res - v_back

        u_back, u_fore, l_cache = local_forward(layer.local, x_tilde)

        terms['zin'].append(z_res)
        terms['xin'].append(x_tilde)
        cache.periodic.append(p_cache)
        cache.local.append(l_cache)

        x_res = x_res - v_back - u_back
        if not flags.no_period_mode and not flags.drop_z_residual:
            z_res = z_res - np.concatenate([v_back, v_fore], axis=1)

        local_part = local_part + u_fore
        if not flags.drop_periodic_forecast:
            periodic_part = periodic_part + v_fore
        total = total + u_fore
        if not flags.drop_periodic_forecast:
            total = total + v_fore

        terms['ub'].append(u_back)
        terms['uf'].append(u_fore)
        terms['vb'].append(v_back)
        terms['vf'].append(v_fore)

    decomposition = ForecastDecomposition(
        total=total,
        local_part=local_part,
        periodic_part=periodic_part,
        x_residue=x_res,
        z_residue=z_res,
        local_back=np.stack(terms['ub']),
        local_fore=np.stack(terms['uf']),
        periodic_back=np.stack(terms['vb']),
        periodic_fore=np.stack(terms['vf']),
        local_inputs=np.stack(terms['xin']),
        periodic_inputs=np.stack(terms['zin']),
    )
    return decomposition, cache, single


def network_forward(
    params: NetworkParams,
    x: np.ndarray,
    z: np.ndarray,
    series_index: int | np.ndarray,
    flags: VariantFlags | None = None,
) -> ForecastDecomposition:
    """
    Run the network on one window (vectors) or a batch (matrices).

    Args:
        params: Network weights
        x: Lookback values, shape (L,) or (B, L)
        z: Periodic state over the lookback and horizon, shape (L+H,) or (B, L+H)
        series_index: Series of each window (selects alpha)
        flags: Ablation switches (default: full model)
    """
    decomposition, _, single = forward_with_cache(params, x, z, series_index, flags or VariantFlags())
    return decomposition.squeezed() if single else decomposition


def network_backward(
    params: NetworkParams,
    cache: ForwardCache,
    d_total: np.ndarray,
) -> tuple[dict[str, np.ndarray], np.ndarray]:
    """
    Reverse pass for a loss that depends on the forecast only.

    Returns gradients keyed like NetworkParams.to_arrays() and dLoss/dz for
    the periodic state input, shape (B, L+H).
    """
    flags = cache.flags
    L, H = params.lookback, params.horizon
    d_total = np.asarray(d_total, dtype=np.float64).reshape(cache.batch, H)

    grads = {name: np.zeros_like(arr) for name, arr in params.to_arrays().items()}
    d_scale_rows = np.zeros(cache.batch)

    dx = np.zeros((cache.batch, L))       # dLoss / dx(l)
    dz = np.zeros((cache.batch, L + H))   # dLoss / dz(l)
    d_fore_v = np.zeros((cache.batch, H)) if flags.drop_periodic_forecast else d_total

    for i in range(params.depth - 1, -1, -1):
        layer = params.layers[i]
        l_grads, dx_tilde = local_backward(layer.local, cache.local[i], -dx, d_total)
        for name, g in l_grads.items():
            grads[f'layers.{i}.local.{name}'] += g

        if flags.no_period_mode:
            dx = dx + dx_tilde
            continue

        d_back_v = -dx if flags.drop_local_input_subtraction else -dx - dx_tilde
        dv = np.concatenate([d_back_v, d_fore_v], axis=1)
        if not flags.drop_z_residual:
            dv = dv - dz

        p_grads, dz_in, d_scale = periodic_backward(layer.periodic, cache.periodic[i], dv[:, :L], dv[:, L:])
        for name, g in p_grads.items():
            grads[f'layers.{i}.periodic.{name}'] += g
        d_scale_rows += d_scale

        if not flags.drop_local_input_subtraction:
            dx = dx + dx_tilde
        dz = dz + dz_in

    np.add.at(grads['alpha'], cache.series_index, d_scale_rows)

    if flags.no_period_mode:
        # x(0) = x - z_back
        dz = np.concatenate([-dx, np.zeros((cache.batch, H))], axis=1)
    return grads, dz
