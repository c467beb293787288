"""
Anticipation Loss Module
"""

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from ...labeling import AnticipationTargets
from ...timebase import DomainError

PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class LossResult:
    """Mean cross-entropy over the anticipated offsets that exist."""

    loss: float
    num_targets: int
    no_target: bool = False
    clamped: bool = False

    def __float__(self) -> float:
        return self.loss


def cross_entropy_loss(scores: np.ndarray,
                       targets: Union[AnticipationTargets, Sequence[int], np.ndarray]) -> LossResult:
    """Average of -log scores[j][targets[j]] over the m <= horizon targets.

    Probabilities below PROB_FLOOR are clamped before the log and flagged.
    An empty target list yields loss 0 with `no_target` set.

    Raises:
        DomainError: If there are more targets than score rows
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = targets.targets if isinstance(targets, AnticipationTargets) else np.asarray(targets)
    labels = labels.astype(np.int64)

    m = labels.shape[0]
    if m > scores.shape[0]:
        raise DomainError(f"{m} targets for {scores.shape[0]} anticipation rows")
    if m == 0:
        return LossResult(0.0, 0, no_target=True)

    picked = scores[np.arange(m), labels]
    clamped = bool((picked < PROB_FLOOR).any())
    nll = -np.log(np.maximum(picked, PROB_FLOOR))

    total = 0.0
    for value in nll:
        total += float(value)
    return LossResult(total / m, m, clamped=clamped)
