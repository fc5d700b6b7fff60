"""
Forward and backward passes of the local and periodic blocks.

Inputs are (B, n) matrices; the public *_forward helpers also accept single
vectors and return outputs of the same rank.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from utils.network.params import Dense, LocalBlockParams, PeriodicBlockParams, ShapeError


def _as_batch(x: np.ndarray, width: int, name: str) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    x2 = x[None, :] if single else x
    if x2.ndim != 2 or x2.shape[1] != width:
        raise ShapeError(f"{name} must have trailing length {width}, got shape {x.shape}")
    return x2, single


def _dense_backward(dense: Dense, x: np.ndarray, dy: np.ndarray) -> tuple[dict[str, np.ndarray], np.ndarray]:
    grads = {'weight': x.T @ dy}
    if dense.bias is not None:
        grads['bias'] = dy.sum(axis=0)
    return grads, dy @ dense.weight.T


# =============================================================================
# Local block
# =============================================================================

@dataclass
class LocalCache:
    inputs: list[np.ndarray]       # input of fc1..fc4
    pre: list[np.ndarray]          # pre-activations of fc1..fc4
    hidden: np.ndarray             # output of fc4 after ReLU
    coeff_back: np.ndarray
    coeff_fore: np.ndarray


def local_forward(params: LocalBlockParams, x_tilde: np.ndarray) -> tuple[np.ndarray, np.ndarray, LocalCache]:
    """Batched local block: returns (u_back, u_fore, cache)."""
    h = x_tilde
    inputs, pre = [], []
    for dense in params.hidden:
        inputs.append(h)
        a = dense(h)
        pre.append(a)
        h = np.maximum(a, 0.0)
    coeff_back = params.head_back(h)
    coeff_fore = params.head_fore(h)
    u_back = params.basis_back(coeff_back)
    u_fore = params.basis_fore(coeff_fore)
    return u_back, u_fore, LocalCache(inputs, pre, h, coeff_back, coeff_fore)


def local_backward(
    params: LocalBlockParams,
    cache: LocalCache,
    d_back: np.ndarray,
    d_fore: np.ndarray,
) -> tuple[dict[str, np.ndarray], np.ndarray]:
    """Gradients keyed '<layer>.<weight|bias>' and dLoss/dx_tilde."""
    grads: dict[str, np.ndarray] = {}

    g, d_coeff_back = _dense_backward(params.basis_back, cache.coeff_back, d_back)
    grads.update({f'basis_back.{k}': v for k, v in g.items()})
    g, d_coeff_fore = _dense_backward(params.basis_fore, cache.coeff_fore, d_fore)
    grads.update({f'basis_fore.{k}': v for k, v in g.items()})

    g, dh_back = _dense_backward(params.head_back, cache.hidden, d_coeff_back)
    grads.update({f'head_back.{k}': v for k, v in g.items()})
    g, dh_fore = _dense_backward(params.head_fore, cache.hidden, d_coeff_fore)
    grads.update({f'head_fore.{k}': v for k, v in g.items()})

    dh = dh_back + dh_fore
    for idx in range(3, -1, -1):
        da = dh * (cache.pre[idx] > 0)
        g, dh = _dense_backward(params.hidden[idx], cache.inputs[idx], da)
        grads.update({f'fc{idx + 1}.{k}': v for k, v in g.items()})
    return grads, dh


def local_block_forward(params: LocalBlockParams, x_tilde: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(u_back, u_fore) for a length-L input or a (B, L) batch."""
    x2, single = _as_batch(x_tilde, params.fc1.fan_in, 'x_tilde')
    u_back, u_fore, _ = local_forward(params, x2)
    return (u_back[0], u_fore[0]) if single else (u_back, u_fore)


# =============================================================================
# Periodic block
# =============================================================================

@dataclass
class PeriodicCache:
    z: np.ndarray
    pre: np.ndarray
    hidden: np.ndarray
    raw_back: np.ndarray
    raw_fore: np.ndarray
    scale: np.ndarray              # (B, 1)


def periodic_forward(
    params: PeriodicBlockParams,
    z: np.ndarray,
    scale: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, PeriodicCache]:
    """Batched periodic block; `scale` holds one alpha per row."""
    scale = np.asarray(scale, dtype=np.float64).reshape(-1, 1)
    pre = params.fc(z)
    hidden = np.maximum(pre, 0.0)
    raw_back = params.head_back(hidden)
    raw_fore = params.head_fore(hidden)
    cache = PeriodicCache(z, pre, hidden, raw_back, raw_fore, scale)
    return scale * raw_back, scale * raw_fore, cache


def periodic_backward(
    params: PeriodicBlockParams,
    cache: PeriodicCache,
    d_back: np.ndarray,
    d_fore: np.ndarray,
) -> tuple[dict[str, np.ndarray], np.ndarray, np.ndarray]:
    """Gradients keyed '<layer>.<weight|bias>', dLoss/dz and per-row dLoss/dscale."""
    grads: dict[str, np.ndarray] = {}
    d_scale = (d_back * cache.raw_back).sum(axis=1) + (d_fore * cache.raw_fore).sum(axis=1)

    g, dh_back = _dense_backward(params.head_back, cache.hidden, cache.scale * d_back)
    grads.update({f'head_back.{k}': v for k, v in g.items()})
    g, dh_fore = _dense_backward(params.head_fore, cache.hidden, cache.scale * d_fore)
    grads.update({f'head_fore.{k}': v for k, v in g.items()})

    da = (dh_back + dh_fore) * (cache.pre > 0)
    g, dz = _dense_backward(params.fc, cache.z, da)
    grads.update({f'fc.{k}': v for k, v in g.items()})
    return grads, dz, d_scale


def periodic_block_forward(
    params: PeriodicBlockParams,
    z: np.ndarray,
    scale: float | np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """(v_back, v_fore) for a length-(L+H) state or a (B, L+H) batch."""
    z2, single = _as_batch(z, params.fc.fan_in, 'z')
    scale = np.broadcast_to(np.asarray(scale, dtype=np.float64), (z2.shape[0],))
    v_back, v_fore, _ = periodic_forward(params, z2, scale)
    return (v_back[0], v_fore[0]) if single else (v_back, v_fore)
