"""
Training: losses, Adam and the joint network/periodicity training loop.

Example usage:
    from utils.training import TrainingConfig, train

    config = TrainingConfig(iterations=500, variant='DEPTS')
    model = train(config, dataset, split_spec, init=periods)
    model.save('member.ckpt')
"""

from __future__ import annotations

from .losses import loss_and_grad, mase, mase_grad, smape, smape_grad
from .optimizer import OptimizerState, adam_step
from .trainer import (
    FROZEN_PHI_VARIANTS,
    BatchGradients,
    DivergenceError,
    TrainedModel,
    TrainingConfig,
    backward,
    member_configs,
    periodic_states,
    train,
    train_ensemble,
)

__all__ = [
    'FROZEN_PHI_VARIANTS',
    'BatchGradients',
    'DivergenceError',
    'OptimizerState',
    'TrainedModel',
    'TrainingConfig',
    'adam_step',
    'backward',
    'loss_and_grad',
    'mase',
    'mase_grad',
    'member_configs',
    'periodic_states',
    'smape',
    'smape_grad',
    'train',
    'train_ensemble',
]
