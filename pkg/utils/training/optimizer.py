"""Adam over named parameter arrays."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from utils.constants import ADAM_BETA1, ADAM_BETA2, ADAM_EPS
from utils.validation import DataError


@dataclass
class OptimizerState:
    """Moment estimates mirroring the parameter dict, plus the step count."""
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    step: int = 0
    beta1: float = ADAM_BETA1
    beta2: float = ADAM_BETA2
    eps: float = ADAM_EPS

    @classmethod
    def for_params(cls, params: dict[str, np.ndarray], **kwargs) -> OptimizerState:
        return cls(
            m={k: np.zeros_like(v) for k, v in params.items()},
            v={k: np.zeros_like(v) for k, v in params.items()},
            **kwargs,
        )


def adam_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: OptimizerState,
    lr: float,
) -> tuple[dict[str, np.ndarray], OptimizerState]:
    """
    One bias-corrected Adam update.

    Pure: returns new parameter and state objects and leaves the inputs
    untouched. Parameters missing from `grads` get a zero gradient.
    """
    step = state.step + 1
    b1, b2 = state.beta1, state.beta2
    new_params, new_m, new_v = {}, {}, {}

    for name, value in params.items():
        g = grads.get(name)
        g = np.zeros_like(value) if g is None else np.asarray(g, dtype=np.float64)
        if g.shape != value.shape:
            raise DataError(f"Gradient shape {g.shape} for {name} does not match parameter shape {value.shape}")
        m_prev = state.m.get(name, np.zeros_like(value))
        v_prev = state.v.get(name, np.zeros_like(value))

        m = b1 * m_prev + (1.0 - b1) * g
        v = b2 * v_prev + (1.0 - b2) * g * g
        m_hat = m / (1.0 - b1 ** step)
        v_hat = v / (1.0 - b2 ** step)

        new_params[name] = value - lr * m_hat / (np.sqrt(v_hat) + state.eps)
        new_m[name] = m
        new_v[name] = v

    return new_params, OptimizerState(new_m, new_v, step, b1, b2, state.eps)
