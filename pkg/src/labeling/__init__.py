"""
Labeling Package
Turns transcripts and VAD output into per-frame labels and anticipation targets.
"""

from .core.converter import segments_to_labels, labels_to_segments, vad_to_labels
from .core.smoother import smooth_segments
from .core.targets import AnticipationTargets, anticipation_targets
from .utils.transcript_reader import TranscriptReader

__all__ = [
    'segments_to_labels',
    'labels_to_segments',
    'vad_to_labels',
    'smooth_segments',
    'AnticipationTargets',
    'anticipation_targets',
    'TranscriptReader',
]
