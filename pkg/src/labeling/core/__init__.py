"""
Labeling Core Package
"""

from .converter import segments_to_labels, labels_to_segments, vad_to_labels
from .smoother import smooth_segments
from .targets import AnticipationTargets, anticipation_targets

__all__ = [
    'segments_to_labels',
    'labels_to_segments',
    'vad_to_labels',
    'smooth_segments',
    'AnticipationTargets',
    'anticipation_targets',
]
