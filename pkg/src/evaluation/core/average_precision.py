"""
Average Precision Module
Ranks frame scores in descending order and averages precision.
"""

import numpy as np

from ...timebase import DomainError
from ..models import AP_VARIANTS


def ranking_order(scores: np.ndarray) -> np.ndarray:
    """Indices sorted by score descending, ties broken by ascending index."""
    return np.lexsort((np.arange(scores.shape[0]), -scores))


def average_precision(scores, positives, variant: str = 'positives-rank') -> float:
    """Non-interpolated average precision of a ranking.

    Args:
        scores: Real-valued confidence per item
        positives: Binary relevance per item
        variant: 'positives-rank' averages precision at the rank of every
            positive; 'all-thresholds' averages precision at every rank

    Returns:
        float: AP in [0, 1], or NaN when there are no positives

    Raises:
        DomainError: On empty or mismatched inputs, non-finite scores or an
            unknown variant
    """
    scores = np.asarray(scores, dtype=np.float64)
    positives = np.asarray(positives).astype(bool)
    if scores.ndim != 1 or scores.shape != positives.shape:
        raise DomainError(f"scores {scores.shape} and positives {positives.shape} must be equal-length vectors")
    if scores.shape[0] < 1:
        raise DomainError("average precision needs at least one item")
    if not np.all(np.isfinite(scores)):
        raise DomainError("scores must be finite")
    if variant not in AP_VARIANTS:
        raise DomainError(f"unknown AP variant {variant!r}")

    if not positives.any():
        return float('nan')

    hits = positives[ranking_order(scores)]
    precision = np.cumsum(hits) / np.arange(1, hits.shape[0] + 1)
    if variant == 'positives-rank':
        return float(precision[hits].mean())
    return float(precision.mean())
