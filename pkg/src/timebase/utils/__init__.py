"""
Timebase Utilities Package
"""

from .track_io import read_label_track, write_label_track

__all__ = ['read_label_track', 'write_label_track']
