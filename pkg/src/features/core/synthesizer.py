"""
Conversation Synthesizer Module
Generates labelled feature streams from a semi-Markov speaker-state chain.
"""

import logging
from typing import List, Sequence, Tuple, Union

import numpy as np

from ...timebase import DomainError, FrameClock, LabelTrack
from ..models import FeatureStream, ModalitySpec, SynthConfig

logger = logging.getLogger(__name__)


def _draw_chain(cfg: SynthConfig, num_frames: int,
                rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Draw per-frame states plus, for each frame, the next state and the
    number of frames left until the transition into it (1 on a segment's
    last frame)."""
    transitions = np.asarray(cfg.transition_weights, dtype=np.float64)
    dwell_p = 1.0 / np.asarray(cfg.state_dwell_mean_frames, dtype=np.float64)

    labels = np.empty(num_frames, dtype=np.int8)
    next_labels = np.empty(num_frames, dtype=np.int8)
    frames_left = np.empty(num_frames, dtype=np.int64)

    state = int(rng.integers(3))
    pos = 0
    while pos < num_frames:
        dwell = int(rng.geometric(dwell_p[state]))
        nxt = int(rng.choice(3, p=transitions[state]))
        end = min(pos + dwell, num_frames)
        labels[pos:end] = state
        next_labels[pos:end] = nxt
        frames_left[pos:end] = (pos + dwell) - np.arange(pos, end)
        pos += dwell
        state = nxt

    return labels, next_labels, frames_left


def class_means(dim: int, separation: float,
                means_seed: Union[int, Sequence[int]]) -> np.ndarray:
    """Three mutually orthogonal vectors of norm `separation`.

    Drawn from `means_seed` alone, so every clip synthesized with the same
    means seed shares one feature geometry whatever its chain seed.
    """
    rng = np.random.default_rng(means_seed)
    q, _ = np.linalg.qr(rng.standard_normal((dim, 3)))
    return separation * q.T


def _render(labels: np.ndarray, next_labels: np.ndarray, frames_left: np.ndarray,
            means: np.ndarray, noise_sigma: float, cue_lead: int,
            rng: np.random.Generator) -> np.ndarray:
    current = means[labels]
    if cue_lead > 0:
        # weight rises linearly to cue_lead / (cue_lead + 1) on the last frame
        weight = np.where(frames_left <= cue_lead,
                          (cue_lead - frames_left + 1) / (cue_lead + 1), 0.0)
        current = current + weight[:, None] * (means[next_labels] - current)
    noise = rng.standard_normal(current.shape)
    return (current + noise_sigma * noise).astype(np.float32)


def synth_conversation(cfg: SynthConfig,
                       num_frames: int,
                       clock: FrameClock = FrameClock()) -> Tuple[FeatureStream, LabelTrack]:
    """Generate one labelled conversation; identical output for identical cfg.

    Args:
        cfg: Generator settings
        num_frames: Stream length T
        clock: Frame clock attached to both outputs

    Returns:
        Tuple[FeatureStream, LabelTrack]: Features tagged "synthetic" and labels
    """
    if num_frames < 1:
        raise DomainError(f"num_frames must be >= 1, got {num_frames}")

    rng = np.random.default_rng(cfg.seed)
    labels, next_labels, frames_left = _draw_chain(cfg, num_frames, rng)
    means = class_means(cfg.dim, cfg.class_mean_separation, cfg.means_seed)
    frames = _render(labels, next_labels, frames_left, means,
                     cfg.noise_sigma, cfg.cue_lead_frames, rng)

    logger.debug(f"Synthesized {num_frames} frames (seed={cfg.seed}, dim={cfg.dim})")
    return FeatureStream(clock, frames, "synthetic"), LabelTrack(clock, labels)


def synth_modalities(cfg: SynthConfig,
                     num_frames: int,
                     modalities: Sequence[ModalitySpec],
                     clock: FrameClock = FrameClock()) -> Tuple[List[FeatureStream], LabelTrack]:
    """Generate several feature streams that share one label track.

    Each modality draws its own class means (from `[cfg.means_seed, index]`)
    and noise, with its own separation and cue lead; `cfg.noise_sigma`
    applies to all of them.
    """
    if num_frames < 1:
        raise DomainError(f"num_frames must be >= 1, got {num_frames}")
    if not modalities:
        raise DomainError("at least one modality is required")

    chain_rng = np.random.default_rng(cfg.seed)
    labels, next_labels, frames_left = _draw_chain(cfg, num_frames, chain_rng)

    streams = []
    for index, spec in enumerate(modalities):
        rng = np.random.default_rng([cfg.seed, index + 1])
        means = class_means(spec.dim, spec.class_mean_separation,
                            [cfg.means_seed, index])
        frames = _render(labels, next_labels, frames_left, means,
                         cfg.noise_sigma, spec.cue_lead_frames, rng)
        streams.append(FeatureStream(clock, frames, spec.tag))

    return streams, LabelTrack(clock, labels)
