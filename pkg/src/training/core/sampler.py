"""
Window Sampler Module
Draws fixed-length training windows uniformly over all usable end frames.

End frames are 0-based, t in [L-1, T-2]: the window covers frames
t-L+1 .. t and at least one anticipation target (frame t+1) exists.
"""

import logging
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ...features import FeatureStream
from ...labeling import anticipation_targets
from ...timebase import DomainError, LabelTrack

logger = logging.getLogger(__name__)


@dataclass
class Clip:
    """A feature stream paired with its label track."""

    stream: FeatureStream
    track: LabelTrack
    name: str = "clip"

    def __post_init__(self):
        if len(self.stream) != len(self.track):
            length = min(len(self.stream), len(self.track))
            logger.warning(
                f"{self.name}: {len(self.stream)} feature frames vs {len(self.track)} labels, "
                f"truncating to {length}")
            self.stream = self.stream.slice(0, length)
            self.track = self.track.slice(0, length)

    def __len__(self) -> int:
        return len(self.track)


@dataclass
class WindowBatch:
    windows: np.ndarray   # [B, L, D]
    targets: np.ndarray   # [B, horizon]
    mask: np.ndarray      # [B, horizon]
    end_frames: List[Tuple[int, int]] = field(default_factory=list)

    def __len__(self) -> int:
        return int(self.windows.shape[0])


class WindowSampler:
    """Uniform window sampler over a set of clips."""

    def __init__(self, clips: Sequence[Clip], window_len: int, horizon: int,
                 batch_size: int, seed: int = 0):
        if window_len < 1 or horizon < 1 or batch_size < 1:
            raise DomainError("window_len, horizon and batch_size must be >= 1")

        self.window_len = window_len
        self.horizon = horizon
        self.batch_size = batch_size
        self.seed = seed

        self.clips: List[Clip] = []
        for clip in clips:
            if len(clip) <= window_len:
                logger.warning(
                    f"Skipping {clip.name}: {len(clip)} frames, need more than {window_len}")
                continue
            self.clips.append(clip)

        if not self.clips:
            raise DomainError(f"no clip is longer than the window length {window_len}")

        dims = {clip.stream.dim for clip in self.clips}
        if len(dims) != 1:
            raise DomainError(f"clips have different feature dims: {sorted(dims)}")

        self._positions = np.array([len(clip) - window_len for clip in self.clips])
        self._offsets = np.concatenate(([0], np.cumsum(self._positions)))

    @property
    def num_positions(self) -> int:
        """Number of distinct (clip, end frame) pairs."""
        return int(self._offsets[-1])

    def _locate(self, index: int) -> Tuple[int, int]:
        clip_idx = int(np.searchsorted(self._offsets, index, side='right')) - 1
        t = self.window_len - 1 + index - int(self._offsets[clip_idx])
        return clip_idx, t

    def _build(self, picks: Sequence[Tuple[int, int]]) -> WindowBatch:
        dim = self.clips[0].stream.dim
        windows = np.empty((len(picks), self.window_len, dim))
        targets = np.zeros((len(picks), self.horizon), dtype=np.int64)
        mask = np.zeros((len(picks), self.horizon), dtype=bool)

        for row, (clip_idx, t) in enumerate(picks):
            clip = self.clips[clip_idx]
            windows[row] = clip.stream.frames[t - self.window_len + 1:t + 1]
            future = anticipation_targets(clip.track, t, self.horizon).targets
            targets[row, :len(future)] = future
            mask[row, :len(future)] = True

        return WindowBatch(windows, targets, mask, list(picks))

    def batches_per_epoch(self, num_samples: Optional[int] = None) -> int:
        num_samples = num_samples or self.num_positions
        return -(-num_samples // self.batch_size)

    def epoch(self, epoch: int, num_samples: Optional[int] = None) -> Iterator[WindowBatch]:
        """Yield the batches of one epoch; identical for identical (seed, epoch)."""
        num_samples = num_samples or self.num_positions
        rng = np.random.default_rng([self.seed, epoch])
        draws = rng.integers(0, self.num_positions, size=num_samples)

        for start in range(0, num_samples, self.batch_size):
            picks = [self._locate(int(i)) for i in draws[start:start + self.batch_size]]
            yield self._build(picks)


def sample_windows(clips: Sequence[Clip], window_len: int, batch_size: int, seed: int,
                   horizon: int, epoch: int = 0,
                   num_samples: Optional[int] = None) -> Iterator[WindowBatch]:
    """Batches of (window, targets) for one epoch."""
    sampler = WindowSampler(clips, window_len, horizon, batch_size, seed)
    return sampler.epoch(epoch, num_samples)
