"""
Segment Smoother Module
Minimum-duration post-processing of binary speech segments.
"""

import logging
from typing import List, Sequence

from ...timebase import DomainError, Segment

logger = logging.getLogger(__name__)

DEFAULT_MIN_DURATION_S = 0.2

# tolerance for comparing float second boundaries
_EPS = 1e-9


def _check_sorted(segments: Sequence[Segment]) -> None:
    for prev, cur in zip(segments, segments[1:]):
        if cur.start_s < prev.start_s:
            raise DomainError(
                f"segments must be sorted by start: {prev.start_s} then {cur.start_s}")
        if cur.start_s < prev.end_s - _EPS:
            raise DomainError(
                f"segments overlap: ({prev.start_s}, {prev.end_s}) and ({cur.start_s}, {cur.end_s})")


def merge_close_segments(segments: Sequence[Segment], min_gap_s: float) -> List[Segment]:
    """Merge neighbours separated by a gap shorter than min_gap_s."""
    if not segments:
        return []

    merged = [segments[0]]
    for seg in segments[1:]:
        prev = merged[-1]
        if seg.start_s - prev.end_s < min_gap_s - _EPS:
            merged[-1] = Segment(prev.start_s, max(prev.end_s, seg.end_s),
                                 is_target=prev.is_target, speaker=prev.speaker)
        else:
            merged.append(seg)
    return merged


def remove_short_segments(segments: Sequence[Segment], min_dur_s: float) -> List[Segment]:
    """Drop segments shorter than min_dur_s."""
    return [seg for seg in segments if seg.duration_s >= min_dur_s - _EPS]


def smooth_segments(segments: Sequence[Segment],
                    min_dur_s: float = DEFAULT_MIN_DURATION_S) -> List[Segment]:
    """Apply the minimum-duration rule: merge short gaps, then drop short segments.

    Args:
        segments: Speech segments sorted by start, non-overlapping
        min_dur_s: Minimum gap and segment duration in seconds

    Returns:
        List[Segment]: Sorted, non-overlapping segments with every duration
        and every gap at least min_dur_s

    Raises:
        DomainError: If the input is unsorted or overlapping
    """
    segments = list(segments)
    _check_sorted(segments)

    merged = merge_close_segments(segments, min_dur_s)
    kept = remove_short_segments(merged, min_dur_s)

    if len(kept) != len(segments):
        logger.debug(f"Smoothing reduced {len(segments)} segments to {len(kept)}")
    return kept
