"""
Checkpoint Module
Binary serialization of model parameters.

Layout (little-endian):
    magic    4 bytes b"EGCK"
    version  u32     1
    config   5 x u32 d_in, d_embed, d_hidden, horizon, num_classes
    payload  f32 arrays in PARAM_ORDER, each row-major:
             W_embed b_embed W_z U_z b_z W_r U_r b_r W_h U_h b_h W_out b_out
"""

import logging
import struct
from pathlib import Path
from typing import Union

import numpy as np
from pydantic import ValidationError

from ..features.models import (
    BadHeaderError,
    BadMagicError,
    NonFiniteError,
    TruncatedError,
    VersionMismatchError,
)
from .config import ModelConfig
from .params import PARAM_ORDER, GruParams, param_shapes

logger = logging.getLogger(__name__)

MAGIC = b"EGCK"
VERSION = 1
_HEADER = struct.Struct('<4sIIIIII')
_FLOAT = np.dtype('<f4')


def write_checkpoint(params: GruParams, path: Union[str, Path]) -> Path:
    """Write parameters as f32.

    Returns:
        Path: Path to the written file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    cfg = params.config

    header = _HEADER.pack(MAGIC, VERSION, cfg.d_in, cfg.d_embed, cfg.d_hidden,
                          cfg.horizon, cfg.num_classes)
    payload = b''.join(np.ascontiguousarray(array, dtype=_FLOAT).tobytes()
                       for array in params.arrays())

    with open(path, 'wb') as f:
        f.write(header)
        f.write(payload)

    logger.debug(f"Written checkpoint ({params.num_scalars()} scalars) to {path}")
    return path


def read_checkpoint(path: Union[str, Path]) -> GruParams:
    """Read parameters written by write_checkpoint.

    Raises:
        FileNotFoundError: If the file does not exist
        BadMagicError, VersionMismatchError, TruncatedError, NonFiniteError,
        BadHeaderError:
            If the file is malformed
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Checkpoint not found: {path}")

    data = path.read_bytes()
    if len(data) < 4 or data[:4] != MAGIC:
        raise BadMagicError(f"{path.name}: bad magic {data[:4]!r}")
    if len(data) < _HEADER.size:
        raise TruncatedError(f"{path.name}: header truncated")

    _, version, d_in, d_embed, d_hidden, horizon, num_classes = _HEADER.unpack_from(data, 0)
    if version != VERSION:
        raise VersionMismatchError(f"{path.name}: version {version}, expected {VERSION}")

    try:
        cfg = ModelConfig(d_in=d_in, d_embed=d_embed, d_hidden=d_hidden,
                          horizon=horizon, num_classes=num_classes)
    except ValidationError as e:
        raise BadHeaderError(f"{path.name}: header sizes are not a valid model: {e}") from e
    shapes = param_shapes(cfg)
    total = sum(int(np.prod(shapes[name])) for name in PARAM_ORDER)

    payload = data[_HEADER.size:]
    if len(payload) < total * _FLOAT.itemsize:
        raise TruncatedError(
            f"{path.name}: payload has {len(payload)} bytes, config needs {total * _FLOAT.itemsize}")

    flat = np.frombuffer(payload, dtype=_FLOAT, count=total)
    if not np.isfinite(flat).all():
        raise NonFiniteError(f"{path.name}: parameters contain NaN or Inf")

    values = {}
    offset = 0
    for name in PARAM_ORDER:
        size = int(np.prod(shapes[name]))
        values[name] = flat[offset:offset + size].reshape(shapes[name]).astype(np.float64)
        offset += size

    return GruParams(cfg, **values)
