"""
Segment/Label Converter Module
Converts between speaker segments and per-frame label tracks.
"""

import logging
from typing import List, Sequence

import numpy as np

from ...timebase import ClassId, DomainError, FrameClock, LabelTrack, Segment, time_to_frame
from .smoother import DEFAULT_MIN_DURATION_S, smooth_segments

logger = logging.getLogger(__name__)


def _midpoints(num_frames: int, clock: FrameClock) -> np.ndarray:
    return (np.arange(num_frames, dtype=np.float64) + 0.5) / clock.fps_float


def segments_to_labels(segments: Sequence[Segment],
                       duration_s: float,
                       clock: FrameClock = FrameClock()) -> LabelTrack:
    """Label each frame by the segments containing its midpoint.

    Target segments take precedence over other speakers; frames covered by
    no segment are Background. Segments running past the clip are clipped and
    counted in ``track.metadata['clipped_segments']``.

    Args:
        segments: Speaker segments (any order, overlaps allowed)
        duration_s: Clip duration in seconds
        clock: Frame clock

    Returns:
        LabelTrack: floor(duration_s * fps) frames

    Raises:
        DomainError: If duration_s is not positive
    """
    if duration_s <= 0:
        raise DomainError(f"duration must be positive, got {duration_s}")

    num_frames = time_to_frame(duration_s, clock)
    mids = _midpoints(num_frames, clock)

    target = np.zeros(num_frames, dtype=bool)
    other = np.zeros(num_frames, dtype=bool)
    clipped = 0

    for seg in segments:
        end_s = seg.end_s
        if end_s > duration_s:
            clipped += 1
            end_s = duration_s
        covered = (mids >= seg.start_s) & (mids < end_s)
        if seg.is_target:
            target |= covered
        else:
            other |= covered

    if clipped:
        logger.warning(f"Clipped {clipped} segment(s) extending past {duration_s}s")

    labels = np.full(num_frames, int(ClassId.BACKGROUND), dtype=np.int8)
    labels[other] = int(ClassId.OTHER_SPEAKER)
    labels[target] = int(ClassId.TARGET_SPEAKER)

    return LabelTrack(clock, labels, metadata={'clipped_segments': clipped})


def labels_to_segments(track: LabelTrack) -> List[Segment]:
    """Collapse maximal runs of speech frames back into segments."""
    labels = track.labels
    if len(labels) == 0:
        return []

    frame_s = track.clock.frame_duration_s
    # run boundaries: indices where the label changes
    change = np.flatnonzero(np.diff(labels)) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [len(labels)]))

    segments = []
    for start, end in zip(starts, ends):
        code = ClassId(int(labels[start]))
        if code == ClassId.BACKGROUND:
            continue
        start_s = round(start * frame_s, 9)
        end_s = round(end * frame_s, 9)
        if code == ClassId.TARGET_SPEAKER:
            segments.append(Segment.target(start_s, end_s))
        else:
            segments.append(Segment.other(start_s, end_s))
    return segments


def vad_to_labels(segments: Sequence[Segment],
                  duration_s: float,
                  clock: FrameClock = FrameClock(),
                  smooth: bool = True,
                  min_dur_s: float = DEFAULT_MIN_DURATION_S) -> LabelTrack:
    """Binary speech/no-speech pseudo-labels from VAD segments.

    Speech maps to OtherSpeaker and silence to Background, so the track can
    be used as pretraining targets with the same three-class head.
    """
    speech = sorted((Segment.other(s.start_s, s.end_s, speaker="speech") for s in segments),
                    key=lambda s: s.start_s)
    if smooth:
        speech = smooth_segments(speech, min_dur_s)
    return segments_to_labels(speech, duration_s, clock)
