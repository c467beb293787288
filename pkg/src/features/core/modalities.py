"""
Modality Concatenation Module
"""

import logging

import numpy as np

from ...timebase import DomainError
from ..models import FeatureStream

logger = logging.getLogger(__name__)


def concat_modalities(a: FeatureStream, b: FeatureStream) -> FeatureStream:
    """Concatenate two streams feature-wise; the longer stream is truncated.

    Raises:
        DomainError: If the frame rates differ
    """
    if a.clock.fps != b.clock.fps:
        raise DomainError(f"cannot concatenate {a.clock.fps} fps with {b.clock.fps} fps")

    num_frames = min(a.num_frames, b.num_frames)
    if a.num_frames != b.num_frames:
        logger.warning(
            f"Truncating '{a.modality_tag}'/'{b.modality_tag}' to {num_frames} frames "
            f"({a.num_frames} vs {b.num_frames})")

    frames = np.concatenate([a.frames[:num_frames], b.frames[:num_frames]], axis=1)
    return FeatureStream(a.clock, frames, f"{a.modality_tag}+{b.modality_tag}")
