"""
Model Parameters

Holds every trainable array of the recurrent model. Arrays are float64 for
computation; initial values are float32-representable so a fresh parameter
set survives the f32 checkpoint format unchanged.
"""

from dataclasses import dataclass, fields
from typing import Dict, Iterator, List, Tuple

import numpy as np

from .config import ModelConfig

# serialization order; names double as gradient block names
PARAM_ORDER = (
    'W_embed', 'b_embed',
    'W_z', 'U_z', 'b_z',
    'W_r', 'U_r', 'b_r',
    'W_h', 'U_h', 'b_h',
    'W_out', 'b_out',
)

BIAS_NAMES = frozenset(name for name in PARAM_ORDER if name.startswith('b_'))


def param_shapes(cfg: ModelConfig) -> Dict[str, Tuple[int, ...]]:
    d_in, d_e, h = cfg.d_in, cfg.d_embed, cfg.d_hidden
    shapes = {'W_embed': (d_in, d_e), 'b_embed': (d_e,)}
    for gate in ('z', 'r', 'h'):
        shapes[f'W_{gate}'] = (d_e, h)
        shapes[f'U_{gate}'] = (h, h)
        shapes[f'b_{gate}'] = (h,)
    shapes['W_out'] = (h, cfg.head_width)
    shapes['b_out'] = (cfg.head_width,)
    return shapes


@dataclass
class GruParams:
    """Embedding, gate and head weights. Also used for gradients and Adam moments."""

    config: ModelConfig
    W_embed: np.ndarray
    b_embed: np.ndarray
    W_z: np.ndarray
    U_z: np.ndarray
    b_z: np.ndarray
    W_r: np.ndarray
    U_r: np.ndarray
    b_r: np.ndarray
    W_h: np.ndarray
    U_h: np.ndarray
    b_h: np.ndarray
    W_out: np.ndarray
    b_out: np.ndarray

    def __post_init__(self):
        shapes = param_shapes(self.config)
        for name in PARAM_ORDER:
            array = np.asarray(getattr(self, name), dtype=np.float64)
            if array.shape != shapes[name]:
                raise ValueError(f"{name}: shape {array.shape}, expected {shapes[name]}")
            setattr(self, name, array)

    def items(self) -> Iterator[Tuple[str, np.ndarray]]:
        for name in PARAM_ORDER:
            yield name, getattr(self, name)

    def arrays(self) -> List[np.ndarray]:
        return [getattr(self, name) for name in PARAM_ORDER]

    def copy(self) -> 'GruParams':
        return GruParams(self.config, **{name: array.copy() for name, array in self.items()})

    def num_scalars(self) -> int:
        return sum(array.size for _, array in self.items())

    def is_finite(self) -> bool:
        return all(np.isfinite(array).all() for _, array in self.items())

    def equals(self, other: 'GruParams') -> bool:
        """Bit-exact comparison of config and every array."""
        return self.config == other.config and all(
            np.array_equal(a, b) for a, b in zip(self.arrays(), other.arrays()))

    @classmethod
    def zeros(cls, cfg: ModelConfig) -> 'GruParams':
        return cls(cfg, **{name: np.zeros(shape) for name, shape in param_shapes(cfg).items()})

    @classmethod
    def zeros_like(cls, params: 'GruParams') -> 'GruParams':
        return cls.zeros(params.config)


def init_params(cfg: ModelConfig, seed: int = 0) -> GruParams:
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.

    fan_in is the number of rows of each weight matrix (its input width).
    """
    rng = np.random.default_rng(seed)
    values = {}
    for name, shape in param_shapes(cfg).items():
        if name in BIAS_NAMES:
            values[name] = np.zeros(shape)
            continue
        bound = 1.0 / np.sqrt(shape[0])
        draw = rng.uniform(-bound, bound, size=shape)
        values[name] = draw.astype(np.float32).astype(np.float64)
    return GruParams(cfg, **values)
