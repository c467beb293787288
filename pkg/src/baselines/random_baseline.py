"""
Random Baseline Module
"""

import numpy as np

from ..timebase import DomainError
from ..timebase.models import NUM_CLASSES


def random_baseline_scores(num_frames: int, horizon: int, seed: int = 0) -> np.ndarray:
    """One uniformly drawn class per frame and offset, scored 1 (others 0).

    Returns:
        np.ndarray: [T, horizon, 3] one-hot scores
    """
    if num_frames < 1:
        raise DomainError(f"num_frames must be >= 1, got {num_frames}")
    if horizon < 1:
        raise DomainError(f"horizon must be >= 1, got {horizon}")

    rng = np.random.default_rng(seed)
    picks = rng.integers(0, NUM_CLASSES, size=(num_frames, horizon))
    return (picks[..., None] == np.arange(NUM_CLASSES)).astype(np.float64)
