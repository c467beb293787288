"""
Labeling Utilities Package
"""

from .transcript_reader import TranscriptReader

__all__ = ['TranscriptReader']
