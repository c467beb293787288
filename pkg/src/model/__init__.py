"""
Model Package
Online recurrent anticipation model: embedding, one gated recurrent layer and
an [horizon x 3] softmax head, evaluated strictly causally.
"""

from .config import ModelConfig
from .params import GruParams, init_params
from .checkpoint import read_checkpoint, write_checkpoint
from .core.gru import (
    HiddenState,
    softmax_stable,
    gru_step,
    forward_window,
    stream_forward,
)
from .core.session import StreamingSession

__all__ = [
    'ModelConfig',
    'GruParams',
    'init_params',
    'read_checkpoint',
    'write_checkpoint',
    'HiddenState',
    'softmax_stable',
    'gru_step',
    'forward_window',
    'stream_forward',
    'StreamingSession',
]
