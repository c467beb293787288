"""
Silence Baseline Module
Starts speaking after a fixed silence following another speaker, scored with
the generous segment-filling rule.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np
import pandas as pd

from ..timebase import ClassId, DomainError, LabelTrack

logger = logging.getLogger(__name__)

DEFAULT_SILENCE_MS = 600
DEFAULT_GRACE_FRAMES = 3


@dataclass(frozen=True)
class TriggerEvent:
    frame: int


def silence_triggers(track: LabelTrack, silence_ms: float = DEFAULT_SILENCE_MS) -> List[TriggerEvent]:
    """Trigger at frame t when the n frames before t are Background and frame
    t-n-1 is OtherSpeaker, with n the silence length in frames.

    Any Target or Other frame during the countdown aborts it, so each
    OtherSpeaker run yields at most one trigger.

    Raises:
        DomainError: If silence_ms is not a whole number of frames
    """
    n = track.clock.frames_in(silence_ms)
    labels = track.labels
    background = int(ClassId.BACKGROUND)
    other = int(ClassId.OTHER_SPEAKER)

    triggers = []
    for t in range(n + 1, len(labels)):
        if labels[t - n - 1] == other and np.all(labels[t - n:t] == background):
            triggers.append(TriggerEvent(t))
    return triggers


def _target_runs(labels: np.ndarray) -> List[range]:
    is_target = np.concatenate(([False], labels == int(ClassId.TARGET_SPEAKER), [False]))
    edges = np.flatnonzero(np.diff(is_target.astype(np.int8)))
    return [range(start, end) for start, end in zip(edges[::2], edges[1::2])]


def generous_score_track(triggers: Sequence[TriggerEvent], gt: LabelTrack,
                         grace_frames: int = DEFAULT_GRACE_FRAMES) -> np.ndarray:
    """Per-frame binary Target score of the silence speaker.

    A trigger inside a Target segment, or within grace_frames before one
    starts, fills that whole segment with 1; any other trigger scores only
    its own frame.

    Raises:
        DomainError: If triggers are unsorted or out of bounds
    """
    frames = [trigger.frame for trigger in triggers]
    if frames != sorted(frames):
        raise DomainError("triggers must be sorted by frame")
    if frames and (frames[0] < 0 or frames[-1] >= len(gt)):
        raise DomainError(f"trigger outside track of {len(gt)} frames")

    scores = np.zeros(len(gt))
    runs = _target_runs(gt.labels)
    starts = np.array([run.start for run in runs], dtype=np.int64)

    matched = 0
    for t in frames:
        # the run containing t, or the first run starting in [t, t + grace]
        idx = int(np.searchsorted(starts, t, side='right')) - 1
        run = runs[idx] if idx >= 0 and t in runs[idx] else None
        if run is None and idx + 1 < len(runs) and starts[idx + 1] <= t + grace_frames:
            run = runs[idx + 1]

        if run is None:
            scores[t] = 1.0
        else:
            scores[run.start:run.stop] = 1.0
            matched += 1

    logger.debug(f"Silence baseline: {matched}/{len(frames)} triggers matched a target segment")
    return scores


def baseline_score_tensor(target_scores: np.ndarray, horizon: int) -> np.ndarray:
    """Lift a per-frame Target score into [T, horizon, 3] for evaluation.

    Every offset carries the frame's own score for Target; Background and
    Other split the remainder equally.
    """
    target_scores = np.asarray(target_scores, dtype=np.float64)
    tensor = np.empty((target_scores.shape[0], horizon, 3))
    rest = (1.0 - target_scores) / 2.0
    tensor[:, :, int(ClassId.BACKGROUND)] = rest[:, None]
    tensor[:, :, int(ClassId.TARGET_SPEAKER)] = target_scores[:, None]
    tensor[:, :, int(ClassId.OTHER_SPEAKER)] = rest[:, None]
    return tensor


def write_triggers(triggers: Sequence[TriggerEvent], path: Union[str, Path]) -> Path:
    """Export trigger frames as CSV with header `frame`."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame({'frame': [trigger.frame for trigger in triggers]}, dtype='int64').to_csv(path, index=False)
    logger.info(f"Written {len(triggers)} triggers to {path}")
    return path
