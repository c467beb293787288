"""
Model Core Package
"""

from .gru import HiddenState, softmax_stable, gru_step, forward_window, stream_forward
from .session import StreamingSession

__all__ = [
    'HiddenState',
    'softmax_stable',
    'gru_step',
    'forward_window',
    'stream_forward',
    'StreamingSession',
]
