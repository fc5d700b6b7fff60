"""
Expansion network.

Example usage:
    from utils.network import init_network, network_forward, VariantFlags

    params = init_network(lookback=48, horizon=24, width=64, depth=6, n_series=1, rng=rng)
    decomposition = network_forward(params, x, z, series_index=0)
    decomposition.total          # forecast
    decomposition.periodic_part  # global periodicity share
"""

from __future__ import annotations

from .blocks import local_block_forward, periodic_block_forward
from .checkpoint import load_checkpoint, save_checkpoint
from .model import (
    ForecastDecomposition,
    ForwardCache,
    VariantFlags,
    forward_with_cache,
    network_backward,
    network_forward,
)
from .params import (
    Dense,
    LayerParams,
    LocalBlockParams,
    NetworkParams,
    PeriodicBlockParams,
    ShapeError,
    init_network,
)

__all__ = [
    'Dense',
    'ForecastDecomposition',
    'ForwardCache',
    'LayerParams',
    'LocalBlockParams',
    'NetworkParams',
    'PeriodicBlockParams',
    'ShapeError',
    'VariantFlags',
    'forward_with_cache',
    'init_network',
    'load_checkpoint',
    'local_block_forward',
    'network_backward',
    'network_forward',
    'periodic_block_forward',
    'save_checkpoint',
]
