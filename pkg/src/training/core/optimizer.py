"""
Optimizer Module
Adam with decoupled weight decay and a linear-warmup / cosine-decay schedule.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ...model.params import BIAS_NAMES, PARAM_ORDER, GruParams
from ...timebase import DomainError
from ..config import TrainConfig


def lr_at(iteration: int, total_iters: int, cfg: TrainConfig) -> float:
    """Learning rate at a given iteration.

    Rises linearly from 0 to peak_lr over the first warmup_fraction of the
    run, then follows half a cosine down to 0 at total_iters.

    Raises:
        DomainError: If total_iters is not positive or iteration is out of range
    """
    if total_iters <= 0:
        raise DomainError(f"total_iters must be positive, got {total_iters}")
    if not 0 <= iteration <= total_iters:
        raise DomainError(f"iteration {iteration} outside [0, {total_iters}]")

    warmup = cfg.warmup_fraction * total_iters
    if iteration < warmup:
        return cfg.peak_lr * iteration / warmup
    progress = (iteration - warmup) / (total_iters - warmup)
    return cfg.peak_lr * (1.0 + math.cos(math.pi * progress)) / 2.0


@dataclass
class AdamState:
    """First and second moments plus the number of completed steps."""

    m: GruParams
    v: GruParams
    step: int = 0

    @classmethod
    def for_params(cls, params: GruParams) -> 'AdamState':
        return cls(GruParams.zeros_like(params), GruParams.zeros_like(params), 0)


def adam_step(params: GruParams, grads: GruParams, state: AdamState, lr: float,
              cfg: TrainConfig) -> Tuple[GruParams, AdamState]:
    """One bias-corrected Adam update; weight decay lr * wd * w on weights only.

    Inputs are left untouched; new parameter and state objects are returned.

    Raises:
        DomainError: If parameter and gradient configurations differ
    """
    if params.config != grads.config:
        raise DomainError("gradient shapes do not match parameters")

    step = state.step + 1
    correction1 = 1.0 - cfg.beta1 ** step
    correction2 = 1.0 - cfg.beta2 ** step

    new_params, new_m, new_v = {}, {}, {}
    for name in PARAM_ORDER:
        p = getattr(params, name)
        g = getattr(grads, name)
        m = cfg.beta1 * getattr(state.m, name) + (1.0 - cfg.beta1) * g
        v = cfg.beta2 * getattr(state.v, name) + (1.0 - cfg.beta2) * g * g

        update = (m / correction1) / (np.sqrt(v / correction2) + cfg.eps)
        if name not in BIAS_NAMES:
            update = update + cfg.weight_decay * p

        new_params[name] = p - lr * update
        new_m[name], new_v[name] = m, v

    cfg_model = params.config
    return (GruParams(cfg_model, **new_params),
            AdamState(GruParams(cfg_model, **new_m), GruParams(cfg_model, **new_v), step))
