"""
Streaming Session Module
Frame-at-a-time inference that reproduces stream_forward exactly.
"""

import numpy as np

from ...timebase import DomainError
from ..params import GruParams
from .gru import PROJECTION_BLOCK, PackedWeights, cell, head_block, project_block


class StreamingSession:
    """Keeps the hidden state of one live stream.

    Frames are buffered only within the current projection block, so every
    call returns the scores for the frame just pushed.
    """

    def __init__(self, params: GruParams):
        self.config = params.config
        self._packed = PackedWeights.from_params(params)
        self.reset()

    def reset(self) -> None:
        self.frame_index = 0
        self._h = np.zeros(self.config.d_hidden)
        self._inputs = np.zeros((PROJECTION_BLOCK, self.config.d_in))
        self._hidden = np.zeros((PROJECTION_BLOCK, self.config.d_hidden))

    @property
    def hidden_state(self) -> np.ndarray:
        return self._h.copy()

    def push(self, frame: np.ndarray) -> np.ndarray:
        """Consume one frame and return its [horizon, 3] scores.

        Raises:
            DomainError: If the frame width differs from the model's d_in
        """
        frame = np.asarray(frame, dtype=np.float64).reshape(-1)
        if frame.shape[0] != self.config.d_in:
            raise DomainError(
                f"frame has {frame.shape[0]} values, model expects {self.config.d_in}")

        slot = self.frame_index % PROJECTION_BLOCK
        if slot == 0:
            self._inputs[:] = 0.0
            self._hidden[:] = 0.0

        self._inputs[slot] = frame
        gx = project_block(self._packed, self._inputs)[slot]
        self._h = cell(self._packed, gx, self._h)
        self._hidden[slot] = self._h

        self.frame_index += 1
        return head_block(self._packed, self._hidden)[slot]
