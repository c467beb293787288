"""
Features Core Package
"""

from .feature_file import read_feature_file, write_feature_file
from .modalities import concat_modalities
from .synthesizer import class_means, synth_conversation, synth_modalities

__all__ = [
    'read_feature_file',
    'write_feature_file',
    'concat_modalities',
    'class_means',
    'synth_conversation',
    'synth_modalities',
]
