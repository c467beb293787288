"""
Features Package
Per-frame feature streams: binary file I/O, modality concatenation and
synthetic conversation generation.
"""

from .models import (
    FeatureStream,
    SynthConfig,
    ModalitySpec,
    FeatureFileError,
    BadMagicError,
    VersionMismatchError,
    TruncatedError,
    NonFiniteError,
    BadHeaderError,
)
from .core.feature_file import read_feature_file, write_feature_file
from .core.modalities import concat_modalities
from .core.synthesizer import class_means, synth_conversation, synth_modalities

__all__ = [
    'FeatureStream',
    'SynthConfig',
    'ModalitySpec',
    'FeatureFileError',
    'BadMagicError',
    'VersionMismatchError',
    'TruncatedError',
    'NonFiniteError',
    'BadHeaderError',
    'read_feature_file',
    'write_feature_file',
    'concat_modalities',
    'class_means',
    'synth_conversation',
    'synth_modalities',
]
