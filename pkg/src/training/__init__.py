"""
Training Package
Window-sampled supervised training of the recurrent anticipation model.
"""

from .config import TrainConfig
from .core.loss import LossResult, cross_entropy_loss
from .core.backprop import GradientError, backward_batch, backward_window, batch_loss
from .core.optimizer import AdamState, adam_step, lr_at
from .core.sampler import Clip, WindowBatch, WindowSampler, sample_windows
from .core.trainer import Trainer, TrainResult, TrainingDivergedError, train_model
from .core.gradcheck import numerical_gradient, max_relative_error

__all__ = [
    'TrainConfig',
    'LossResult',
    'cross_entropy_loss',
    'GradientError',
    'backward_batch',
    'backward_window',
    'batch_loss',
    'AdamState',
    'adam_step',
    'lr_at',
    'Clip',
    'WindowBatch',
    'WindowSampler',
    'sample_windows',
    'Trainer',
    'TrainResult',
    'TrainingDivergedError',
    'train_model',
    'numerical_gradient',
    'max_relative_error',
]
