"""
Finite-Difference Gradient Checking
"""

from typing import Callable

import numpy as np

from ...model.params import PARAM_ORDER, GruParams


def numerical_gradient(params: GruParams, loss_fn: Callable[[GruParams], float],
                       step: float = 1e-4) -> GruParams:
    """Central differences (f(p + h) - f(p - h)) / 2h for every scalar."""
    grads = GruParams.zeros_like(params)
    perturbed = params.copy()
    for name in PARAM_ORDER:
        array = getattr(perturbed, name)
        out = getattr(grads, name)
        for idx in np.ndindex(array.shape):
            original = array[idx]
            array[idx] = original + step
            plus = loss_fn(perturbed)
            array[idx] = original - step
            minus = loss_fn(perturbed)
            array[idx] = original
            out[idx] = (plus - minus) / (2.0 * step)
    return grads


def max_relative_error(analytic: GruParams, numeric: GruParams, floor: float = 1e-2) -> float:
    """Largest |a - n| / max(|a|, |n|, floor) over all scalars.

    The floor turns the measure into an absolute one for near-zero entries,
    where central differences carry O(step^2) truncation error.
    """
    worst = 0.0
    for name in PARAM_ORDER:
        a = getattr(analytic, name)
        n = getattr(numeric, name)
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
        if a.size:
            worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst
