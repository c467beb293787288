"""
Training Core Package
"""

from .loss import LossResult, cross_entropy_loss
from .backprop import GradientError, backward_batch, backward_window, batch_loss
from .optimizer import AdamState, adam_step, lr_at
from .sampler import Clip, WindowBatch, WindowSampler, sample_windows
from .trainer import Trainer, TrainResult, TrainingDivergedError, train_model
from .gradcheck import numerical_gradient, max_relative_error

__all__ = [
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
