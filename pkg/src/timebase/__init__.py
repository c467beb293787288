"""
Timebase Package
Fixed-rate frame clock and the label/segment vocabulary shared by every stage.
"""

from .clock import FrameClock, time_to_frame, frame_midpoint
from .models import ClassId, DomainError, Segment, LabelTrack
from .utils import read_label_track, write_label_track

__all__ = [
    'FrameClock',
    'time_to_frame',
    'frame_midpoint',
    'ClassId',
    'DomainError',
    'Segment',
    'LabelTrack',
    'read_label_track',
    'write_label_track',
]
