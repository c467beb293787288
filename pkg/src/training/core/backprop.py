"""
Backpropagation Through Time Module

Exact gradients of the final-step anticipation loss with respect to every
parameter block. Windows are processed as a batch [B, L, d_in]; only the
last window step is supervised.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ...labeling import AnticipationTargets
from ...model.core.gru import sigmoid, softmax_stable
from ...model.params import PARAM_ORDER, GruParams
from ...timebase import DomainError
from .loss import PROB_FLOOR

logger = logging.getLogger(__name__)


class GradientError(DomainError):
    """A forward or backward quantity became NaN or infinite."""

    def __init__(self, block: str, detail: str = ""):
        self.block = block
        super().__init__(f"non-finite values in '{block}'" + (f": {detail}" if detail else ""))


@dataclass
class ForwardCache:
    windows: np.ndarray   # [B, L, d_in]
    embedded: np.ndarray  # [B, L, d_embed]
    hidden: np.ndarray    # [L + 1, B, d_hidden], hidden[0] is the zero state
    update: np.ndarray    # [L, B, d_hidden]
    reset: np.ndarray
    candidate: np.ndarray
    probs: np.ndarray     # [B, horizon, K]


def forward_batch(params: GruParams, windows: np.ndarray) -> ForwardCache:
    """Training forward pass keeping every intermediate needed by backward."""
    cfg = params.config
    windows = np.asarray(windows, dtype=np.float64)
    if windows.ndim != 3 or windows.shape[2] != cfg.d_in or windows.shape[1] < 1:
        raise DomainError(f"windows must be [B, L >= 1, {cfg.d_in}], got {windows.shape}")

    batch, length, _ = windows.shape
    d = cfg.d_hidden

    embedded = np.tanh(windows @ params.W_embed + params.b_embed)
    in_z = embedded @ params.W_z + params.b_z
    in_r = embedded @ params.W_r + params.b_r
    in_h = embedded @ params.W_h + params.b_h

    hidden = np.zeros((length + 1, batch, d))
    update = np.empty((length, batch, d))
    reset = np.empty((length, batch, d))
    candidate = np.empty((length, batch, d))

    for s in range(length):
        h_prev = hidden[s]
        z = sigmoid(in_z[:, s] + h_prev @ params.U_z)
        r = sigmoid(in_r[:, s] + h_prev @ params.U_r)
        c = np.tanh(in_h[:, s] + (r * h_prev) @ params.U_h)
        hidden[s + 1] = (1.0 - z) * h_prev + z * c
        update[s], reset[s], candidate[s] = z, r, c

    logits = hidden[length] @ params.W_out + params.b_out
    if not np.isfinite(logits).all():
        raise GradientError('W_out', "head logits")
    probs = softmax_stable(logits.reshape(batch, cfg.horizon, cfg.num_classes))

    return ForwardCache(windows, embedded, hidden, update, reset, candidate, probs)


def _per_sample_loss(probs: np.ndarray, targets: np.ndarray, mask: np.ndarray) -> np.ndarray:
    counts = mask.sum(axis=1)
    picked = np.take_along_axis(probs, targets[..., None], axis=2)[..., 0]
    nll = -np.log(np.maximum(picked, PROB_FLOOR)) * mask
    return np.where(counts > 0, nll.sum(axis=1) / np.maximum(counts, 1), 0.0)


def _mean_in_order(values: np.ndarray) -> float:
    total = 0.0
    for value in values:
        total += float(value)
    return total / len(values)


def batch_loss(params: GruParams, windows: np.ndarray,
               targets: np.ndarray, mask: np.ndarray) -> float:
    """Batch-mean anticipation loss without gradients."""
    cache = forward_batch(params, windows)
    return _mean_in_order(_per_sample_loss(cache.probs, np.asarray(targets, dtype=np.int64),
                                           np.asarray(mask, dtype=bool)))


def backward_batch(params: GruParams, windows: np.ndarray, targets: np.ndarray,
                   mask: np.ndarray) -> Tuple[float, GruParams]:
    """Loss and exact gradients for a batch of windows.

    Args:
        params: Model parameters
        windows: [B, L, d_in] inputs
        targets: [B, horizon] class codes (entries outside `mask` are ignored)
        mask: [B, horizon] True where a target exists

    Returns:
        Tuple[float, GruParams]: batch-mean loss and its gradient

    Raises:
        GradientError: naming the first parameter block with a non-finite gradient
    """
    cfg = params.config
    targets = np.asarray(targets, dtype=np.int64)
    mask = np.asarray(mask, dtype=bool)
    cache = forward_batch(params, windows)

    batch, length, _ = cache.windows.shape
    probs = cache.probs

    loss = _mean_in_order(_per_sample_loss(probs, targets, mask))

    counts = np.maximum(mask.sum(axis=1), 1)
    onehot = (targets[..., None] == np.arange(cfg.num_classes)) * mask[..., None]
    dlogits = (probs - onehot) * mask[..., None] / counts[:, None, None] / batch
    dlogits = dlogits.reshape(batch, cfg.head_width)

    grads = GruParams.zeros(cfg)
    h_last = cache.hidden[length]
    grads.W_out = h_last.T @ dlogits
    grads.b_out = dlogits.sum(axis=0)
    dh = dlogits @ params.W_out.T

    da_z = np.empty((batch, length, cfg.d_hidden))
    da_r = np.empty_like(da_z)
    da_h = np.empty_like(da_z)

    for s in range(length - 1, -1, -1):
        h_prev = cache.hidden[s]
        z, r, c = cache.update[s], cache.reset[s], cache.candidate[s]

        dz = dh * (c - h_prev)
        dh_prev = dh * (1.0 - z)

        dah = dh * z * (1.0 - c * c)
        reset_h = r * h_prev
        grads.U_h += reset_h.T @ dah
        d_reset_h = dah @ params.U_h.T
        dh_prev += d_reset_h * r

        dar = d_reset_h * h_prev * r * (1.0 - r)
        daz = dz * z * (1.0 - z)
        grads.U_r += h_prev.T @ dar
        grads.U_z += h_prev.T @ daz
        dh_prev += dar @ params.U_r.T + daz @ params.U_z.T

        da_z[:, s], da_r[:, s], da_h[:, s] = daz, dar, dah
        dh = dh_prev

    flat_e = cache.embedded.reshape(batch * length, cfg.d_embed)
    d_embedded = np.zeros_like(cache.embedded)
    for gate, da in (('z', da_z), ('r', da_r), ('h', da_h)):
        flat = da.reshape(batch * length, cfg.d_hidden)
        setattr(grads, f'W_{gate}', flat_e.T @ flat)
        setattr(grads, f'b_{gate}', flat.sum(axis=0))
        d_embedded += da @ getattr(params, f'W_{gate}').T

    da_e = (d_embedded * (1.0 - cache.embedded ** 2)).reshape(batch * length, cfg.d_embed)
    grads.W_embed = cache.windows.reshape(batch * length, cfg.d_in).T @ da_e
    grads.b_embed = da_e.sum(axis=0)

    for name in PARAM_ORDER:
        if not np.isfinite(getattr(grads, name)).all():
            logger.error(f"Non-finite gradient in {name} (loss={loss})")
            raise GradientError(name)

    return loss, grads


def targets_to_arrays(targets: AnticipationTargets, horizon: int) -> Tuple[np.ndarray, np.ndarray]:
    """Pad a target list to [horizon] codes plus a validity mask."""
    codes = np.zeros(horizon, dtype=np.int64)
    mask = np.zeros(horizon, dtype=bool)
    m = min(len(targets), horizon)
    codes[:m] = targets.targets[:m]
    mask[:m] = True
    return codes, mask


def backward_window(params: GruParams, window: np.ndarray,
                    targets: AnticipationTargets) -> Tuple[float, GruParams]:
    """Loss and gradients for a single [L, d_in] window."""
    codes, mask = targets_to_arrays(targets, params.config.horizon)
    window = np.asarray(window, dtype=np.float64)
    return backward_batch(params, window[None], codes[None], mask[None])
