"""
Timebase Models

Class codes, speech segments and per-frame label tracks.
"""

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Any, Dict, Optional, TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .clock import FrameClock


class DomainError(ValueError):
    """Raised when an input violates a documented precondition."""


class ClassId(IntEnum):
    """Per-frame classes; the numeric codes are part of every file format."""

    BACKGROUND = 0
    TARGET_SPEAKER = 1
    OTHER_SPEAKER = 2


NUM_CLASSES = len(ClassId)


@dataclass(frozen=True)
class Segment:
    """A speech interval [start_s, end_s) attributed to one speaker.

    `is_target` marks the camera wearer; any other speaker is identified by
    `speaker`. VAD segments carry the speaker tag "speech".
    """

    start_s: float
    end_s: float
    is_target: bool = False
    speaker: str = "speech"

    def __post_init__(self):
        if not (0 <= self.start_s < self.end_s):
            raise DomainError(
                f"segment needs 0 <= start < end, got ({self.start_s}, {self.end_s})")

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s

    @classmethod
    def target(cls, start_s: float, end_s: float) -> 'Segment':
        return cls(start_s, end_s, is_target=True, speaker="target")

    @classmethod
    def other(cls, start_s: float, end_s: float, speaker: str = "other") -> 'Segment':
        return cls(start_s, end_s, is_target=False, speaker=speaker)


@dataclass
class LabelTrack:
    """Per-frame class codes at a fixed frame rate."""

    clock: 'FrameClock'
    labels: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int8)
        if labels.ndim != 1:
            raise DomainError(f"labels must be one-dimensional, got shape {labels.shape}")
        if labels.size and (labels.min() < 0 or labels.max() >= NUM_CLASSES):
            raise DomainError("labels must be class codes in {0, 1, 2}")
        self.labels = labels

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    def prevalence(self, class_id: ClassId) -> float:
        """Fraction of frames carrying the given class."""
        if len(self) == 0:
            return 0.0
        return float(np.mean(self.labels == int(class_id)))

    def slice(self, start: int, stop: Optional[int] = None) -> 'LabelTrack':
        return LabelTrack(self.clock, self.labels[start:stop].copy())
