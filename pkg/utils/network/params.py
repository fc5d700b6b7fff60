"""Parameter containers of the expansion network and their initialization."""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from utils.validation import DataError, validate_positive_int


class ShapeError(DataError):
    """Raised when arrays do not match the network dimensions."""
    pass


@dataclass
class Dense:
    """Fully-connected layer y = x @ weight + bias."""
    weight: np.ndarray
    bias: np.ndarray | None = None

    @property
    def fan_in(self) -> int:
        return int(self.weight.shape[0])

    @property
    def fan_out(self) -> int:
        return int(self.weight.shape[1])

    def __call__(self, x: np.ndarray) -> np.ndarray:
        y = x @ self.weight
        return y if self.bias is None else y + self.bias


def glorot_dense(fan_in: int, fan_out: int, rng: np.random.Generator, bias: bool = True) -> Dense:
    """Uniform on +-sqrt(6 / (fan_in + fan_out)), zero bias."""
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    weight = rng.uniform(-limit, limit, size=(fan_in, fan_out))
    return Dense(weight, np.zeros(fan_out) if bias else None)


@dataclass
class LocalBlockParams:
    """Four ReLU layers, coefficient heads and linear backcast/forecast bases."""
    fc1: Dense
    fc2: Dense
    fc3: Dense
    fc4: Dense
    head_back: Dense
    head_fore: Dense
    basis_back: Dense
    basis_fore: Dense

    @property
    def hidden(self) -> tuple[Dense, Dense, Dense, Dense]:
        return (self.fc1, self.fc2, self.fc3, self.fc4)


@dataclass
class PeriodicBlockParams:
    """One ReLU layer over the periodic state and two linear heads."""
    fc: Dense
    head_back: Dense
    head_fore: Dense


@dataclass
class LayerParams:
    local: LocalBlockParams
    periodic: PeriodicBlockParams


def _dense_items(prefix: str, block: object) -> dict[str, np.ndarray]:
    items = {}
    for f in fields(block):  # type: ignore[arg-type]
        dense = getattr(block, f.name)
        items[f'{prefix}.{f.name}.weight'] = dense.weight
        if dense.bias is not None:
            items[f'{prefix}.{f.name}.bias'] = dense.bias
    return items


def _dense_from(arrays: dict[str, np.ndarray], prefix: str, name: str) -> Dense:
    try:
        weight = np.asarray(arrays[f'{prefix}.{name}.weight'], dtype=np.float64)
    except KeyError as e:
        raise ShapeError(f"Missing parameter {prefix}.{name}.weight") from e
    bias = arrays.get(f'{prefix}.{name}.bias')
    return Dense(weight, None if bias is None else np.asarray(bias, dtype=np.float64))


@dataclass
class NetworkParams:
    """All weights of the N-layer network plus one periodic scale per series."""
    layers: list[LayerParams]
    alpha: np.ndarray
    lookback: int
    horizon: int
    width: int

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def n_series(self) -> int:
        return int(self.alpha.size)

    def to_arrays(self) -> dict[str, np.ndarray]:
        """Flat name -> array view of every parameter, in a stable order."""
        arrays: dict[str, np.ndarray] = {}
        for i, layer in enumerate(self.layers):
            arrays.update(_dense_items(f'layers.{i}.local', layer.local))
            arrays.update(_dense_items(f'layers.{i}.periodic', layer.periodic))
        arrays['alpha'] = self.alpha
        return arrays

    @classmethod
    def from_arrays(cls, arrays: dict[str, np.ndarray], lookback: int, horizon: int, width: int) -> NetworkParams:
        """Rebuild from a name -> array mapping produced by to_arrays."""
        depth = len({k.split('.')[1] for k in arrays if k.startswith('layers.')})
        layers = []
        for i in range(depth):
            local_names = [f.name for f in fields(LocalBlockParams)]
            periodic_names = [f.name for f in fields(PeriodicBlockParams)]
            local = LocalBlockParams(*[_dense_from(arrays, f'layers.{i}.local', n) for n in local_names])
            periodic = PeriodicBlockParams(*[_dense_from(arrays, f'layers.{i}.periodic', n) for n in periodic_names])
            layers.append(LayerParams(local, periodic))
        if 'alpha' not in arrays:
            raise ShapeError("Missing parameter alpha")
        params = cls(layers, np.asarray(arrays['alpha'], dtype=np.float64), int(lookback), int(horizon), int(width))
        params.validate()
        return params

    def validate(self) -> None:
        """Raise ShapeError if any array disagrees with (L, H, W)."""
        L, H, W = self.lookback, self.horizon, self.width
        if self.depth < 1:
            raise ShapeError("Network needs at least one layer")
        expected_local = {
            'fc1': (L, W), 'fc2': (W, W), 'fc3': (W, W), 'fc4': (W, W),
            'head_back': (W, L), 'head_fore': (W, H),
            'basis_back': (L, L), 'basis_fore': (H, H),
        }
        expected_periodic = {'fc': (L + H, W), 'head_back': (W, L), 'head_fore': (W, H)}
        for i, layer in enumerate(self.layers):
            for block, expected in ((layer.local, expected_local), (layer.periodic, expected_periodic)):
                for name, shape in expected.items():
                    dense = getattr(block, name)
                    if dense.weight.shape != shape:
                        raise ShapeError(f"layers.{i}.{name}: weight shape {dense.weight.shape}, expected {shape}")
                    if dense.bias is not None and dense.bias.shape != (shape[1],):
                        raise ShapeError(f"layers.{i}.{name}: bias shape {dense.bias.shape}, expected ({shape[1]},)")
        if self.alpha.ndim != 1 or self.alpha.size < 1:
            raise ShapeError(f"alpha must be a non-empty vector, got shape {self.alpha.shape}")

    def copy(self) -> NetworkParams:
        arrays = {k: v.copy() for k, v in self.to_arrays().items()}
        return NetworkParams.from_arrays(arrays, self.lookback, self.horizon, self.width)


def init_network(
    lookback: int,
    horizon: int,
    width: int,
    depth: int,
    n_series: int,
    rng: np.random.Generator,
) -> NetworkParams:
    """Fan-balanced uniform weights, zero biases, unit periodic scales."""
    L = validate_positive_int(lookback, 'lookback')
    H = validate_positive_int(horizon, 'horizon')
    W = validate_positive_int(width, 'width')
    depth = validate_positive_int(depth, 'layers')
    n_series = validate_positive_int(n_series, 'series count')

    layers = []
    for _ in range(depth):
        local = LocalBlockParams(
            fc1=glorot_dense(L, W, rng),
            fc2=glorot_dense(W, W, rng),
            fc3=glorot_dense(W, W, rng),
            fc4=glorot_dense(W, W, rng),
            head_back=glorot_dense(W, L, rng),
            head_fore=glorot_dense(W, H, rng),
            basis_back=glorot_dense(L, L, rng, bias=False),
            basis_fore=glorot_dense(H, H, rng, bias=False),
        )
        periodic = PeriodicBlockParams(
            fc=glorot_dense(L + H, W, rng),
            head_back=glorot_dense(W, L, rng),
            head_fore=glorot_dense(W, H, rng),
        )
        layers.append(LayerParams(local, periodic))
    return NetworkParams(layers, np.ones(n_series), L, H, W)
