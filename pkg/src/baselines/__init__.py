"""
Baselines Package
Non-learned reference predictors: uniform-random labels and a fixed-silence
speaker.
"""

from .random_baseline import random_baseline_scores
from .silence_baseline import (
    TriggerEvent,
    silence_triggers,
    generous_score_track,
    baseline_score_tensor,
    write_triggers,
)

__all__ = [
    'random_baseline_scores',
    'TriggerEvent',
    'silence_triggers',
    'generous_score_track',
    'baseline_score_tensor',
    'write_triggers',
]
