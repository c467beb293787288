"""
Recurrent Forward Pass Module

Row-vector convention throughout: an embedded frame x (d_embed,) feeds

    z  = sigmoid(x W_z + h U_z + b_z)
    r  = sigmoid(x W_r + h U_r + b_r)
    h~ = tanh(x W_h + (r * h) U_h + b_h)
    h' = (1 - z) * h + z * h~

Inference evaluates the non-recurrent products (embedding, gate input
projections, head) over fixed blocks of PROJECTION_BLOCK rows aligned at the
start of the stream. The online session uses the same blocks, which keeps
offline and online scores bit-identical.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from ...features.models import FeatureStream
from ...timebase import DomainError
from ..params import GruParams

PROJECTION_BLOCK = 16

HiddenState = np.ndarray

Frames = Union[FeatureStream, np.ndarray]


def sigmoid(x: np.ndarray) -> np.ndarray:
    # tanh form saturates to exactly 0 or 1 without overflow
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def softmax_stable(logits: np.ndarray) -> np.ndarray:
    """Softmax over the last axis after subtracting the row maximum.

    Raises:
        DomainError: If any logit is NaN or infinite
    """
    logits = np.asarray(logits, dtype=np.float64)
    if not np.isfinite(logits).all():
        raise DomainError("softmax input contains NaN or Inf")
    shifted = np.exp(logits - logits.max(axis=-1, keepdims=True))
    return shifted / shifted.sum(axis=-1, keepdims=True)


@dataclass(frozen=True)
class PackedWeights:
    """Gate matrices concatenated column-wise for fewer products per step."""

    W_embed: np.ndarray
    b_embed: np.ndarray
    W_x: np.ndarray   # [W_z | W_r | W_h]
    b_x: np.ndarray
    U_zr: np.ndarray  # [U_z | U_r]
    U_h: np.ndarray
    W_out: np.ndarray
    b_out: np.ndarray
    d_hidden: int
    horizon: int
    num_classes: int

    @classmethod
    def from_params(cls, params: GruParams) -> 'PackedWeights':
        cfg = params.config
        return cls(
            W_embed=params.W_embed,
            b_embed=params.b_embed,
            W_x=np.hstack([params.W_z, params.W_r, params.W_h]),
            b_x=np.concatenate([params.b_z, params.b_r, params.b_h]),
            U_zr=np.hstack([params.U_z, params.U_r]),
            U_h=params.U_h,
            W_out=params.W_out,
            b_out=params.b_out,
            d_hidden=cfg.d_hidden,
            horizon=cfg.horizon,
            num_classes=cfg.num_classes,
        )


def _padded(rows: np.ndarray) -> np.ndarray:
    if rows.shape[0] == PROJECTION_BLOCK:
        return rows
    block = np.zeros((PROJECTION_BLOCK, rows.shape[1]))
    block[:rows.shape[0]] = rows
    return block


def project_block(packed: PackedWeights, frames: np.ndarray) -> np.ndarray:
    """Embed up to PROJECTION_BLOCK frames and apply the gate input projections."""
    n = frames.shape[0]
    embedded = np.tanh(_padded(frames) @ packed.W_embed + packed.b_embed)
    return (embedded @ packed.W_x + packed.b_x)[:n]


def head_block(packed: PackedWeights, hidden: np.ndarray) -> np.ndarray:
    """Anticipation probabilities [n, horizon, K] for up to PROJECTION_BLOCK states."""
    n = hidden.shape[0]
    logits = (_padded(hidden) @ packed.W_out + packed.b_out)[:n]
    return softmax_stable(logits.reshape(n, packed.horizon, packed.num_classes))


def cell(packed: PackedWeights, gx: np.ndarray, h: np.ndarray) -> np.ndarray:
    """One recurrent update from a pre-projected input row gx (3h,)."""
    d = packed.d_hidden
    gh = h @ packed.U_zr
    z = sigmoid(gx[:d] + gh[:d])
    r = sigmoid(gx[d:2 * d] + gh[d:])
    candidate = np.tanh(gx[2 * d:] + (r * h) @ packed.U_h)
    return (1.0 - z) * h + z * candidate


def gru_step(params: GruParams, h: HiddenState, x: np.ndarray) -> HiddenState:
    """Advance the hidden state by one embedded input.

    Args:
        params: Model parameters
        h: Hidden state (d_hidden,)
        x: Embedded input (d_embed,)

    Raises:
        DomainError: If shapes do not match the model
    """
    cfg = params.config
    h = np.asarray(h, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if h.shape != (cfg.d_hidden,) or x.shape != (cfg.d_embed,):
        raise DomainError(
            f"gru_step expects h ({cfg.d_hidden},) and x ({cfg.d_embed},), "
            f"got {h.shape} and {x.shape}")
    packed = PackedWeights.from_params(params)
    gx = x @ packed.W_x + packed.b_x
    return cell(packed, gx, h)


def _as_matrix(frames: Frames, d_in: int) -> np.ndarray:
    matrix = frames.frames if isinstance(frames, FeatureStream) else np.asarray(frames)
    if matrix.ndim != 2 or matrix.shape[0] < 1:
        raise DomainError(f"expected a non-empty T x D matrix, got shape {matrix.shape}")
    if matrix.shape[1] != d_in:
        raise DomainError(f"feature dim {matrix.shape[1]} does not match model d_in {d_in}")
    return matrix.astype(np.float64)


def _run(packed: PackedWeights, frames: np.ndarray) -> np.ndarray:
    num_frames = frames.shape[0]
    scores = np.empty((num_frames, packed.horizon, packed.num_classes))
    hidden = np.empty((PROJECTION_BLOCK, packed.d_hidden))
    h = np.zeros(packed.d_hidden)

    for start in range(0, num_frames, PROJECTION_BLOCK):
        block = frames[start:start + PROJECTION_BLOCK]
        n = block.shape[0]
        gx = project_block(packed, block)
        for i in range(n):
            h = cell(packed, gx[i], h)
            hidden[i] = h
        scores[start:start + n] = head_block(packed, hidden[:n])
    return scores


def stream_forward(params: GruParams, stream: Frames) -> np.ndarray:
    """Causal scores for every frame of a stream, hidden state starting at zero.

    Returns:
        np.ndarray: [T, horizon, 3] probabilities; row t depends only on frames 0..t
    """
    frames = _as_matrix(stream, params.config.d_in)
    return _run(PackedWeights.from_params(params), frames)


def forward_window(params: GruParams, window: Frames) -> np.ndarray:
    """Scores [horizon, 3] for the last frame of a window, run from h = 0."""
    frames = _as_matrix(window, params.config.d_in)
    return _run(PackedWeights.from_params(params), frames)[-1]
