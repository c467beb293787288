"""
Anticipation Targets Module
"""

from dataclasses import dataclass

import numpy as np

from ...timebase import DomainError, LabelTrack


@dataclass(frozen=True)
class AnticipationTargets:
    """Future labels t+1 .. t+horizon; shorter only at the end of a track."""

    origin_frame: int
    horizon: int
    targets: np.ndarray

    def __len__(self) -> int:
        return int(self.targets.shape[0])


def anticipation_targets(track: LabelTrack, t: int, horizon: int) -> AnticipationTargets:
    """Labels of the `horizon` frames following frame t, truncated at the track end.

    Raises:
        DomainError: If t is outside the track or horizon is negative
    """
    if not 0 <= t < len(track):
        raise DomainError(f"frame {t} outside track of {len(track)} frames")
    if horizon < 0:
        raise DomainError(f"horizon must be non-negative, got {horizon}")

    future = track.labels[t + 1:t + 1 + horizon].astype(np.int64)
    return AnticipationTargets(origin_frame=t, horizon=horizon, targets=future)
