"""
Frame Clock Module
Maps wall-clock seconds onto fixed-rate frame indices.

Frame i covers the half-open interval [i/fps, (i+1)/fps); a boundary belongs
to the later frame.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .models import DomainError

Number = Union[int, float, Fraction]


def _exact(value: Number) -> Fraction:
    """Convert a number to an exact fraction using its shortest decimal form."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(repr(float(value)))


@dataclass(frozen=True)
class FrameClock:
    """Fixed frame rate; fps is kept rational so fps * frame_duration == 1."""

    fps: Fraction = field(default=Fraction(5))

    def __post_init__(self):
        fps = _exact(self.fps)
        if fps <= 0:
            raise DomainError(f"fps must be positive, got {self.fps}")
        object.__setattr__(self, 'fps', fps)

    @property
    def frame_duration(self) -> Fraction:
        return 1 / self.fps

    @property
    def frame_duration_s(self) -> float:
        return float(self.frame_duration)

    @property
    def fps_float(self) -> float:
        return float(self.fps)

    def frames_for(self, duration_s: Number) -> int:
        """Number of whole frames in a clip of the given duration."""
        return time_to_frame(duration_s, self)

    def frames_in(self, interval_ms: Number) -> int:
        """Exact frame count of a millisecond interval.

        Raises:
            DomainError: if the interval is not a whole number of frames
        """
        frames = _exact(interval_ms) / 1000 * self.fps
        if frames.denominator != 1:
            raise DomainError(
                f"{interval_ms} ms is not a multiple of the {self.frame_duration_s * 1000:g} ms frame")
        return int(frames)


def time_to_frame(t_s: Number, clock: FrameClock) -> int:
    """Return the index of the frame containing time t_s.

    Raises:
        DomainError: if t_s is negative
    """
    if t_s < 0:
        raise DomainError(f"time must be non-negative, got {t_s}")
    return math.floor(_exact(t_s) * clock.fps)


def frame_midpoint(i: int, clock: FrameClock) -> float:
    """Return the centre of frame i in seconds."""
    if i < 0:
        raise DomainError(f"frame index must be non-negative, got {i}")
    return float((Fraction(i) + Fraction(1, 2)) / clock.fps)
