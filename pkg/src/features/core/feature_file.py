"""
Feature File Module
Bit-exact binary serialization of feature streams.

Layout (little-endian):
    magic      4 bytes  b"EGF1"
    version    u32      1
    dim        u32
    num_frames u64
    fps        f32
    tag_len    u32
    tag        tag_len bytes, UTF-8
    payload    num_frames * dim f32, row-major
"""

import logging
import struct
from fractions import Fraction
from pathlib import Path
from typing import Union

import numpy as np

from ...timebase import FrameClock
from ..models import (
    BadHeaderError,
    BadMagicError,
    FeatureStream,
    NonFiniteError,
    TruncatedError,
    VersionMismatchError,
)

logger = logging.getLogger(__name__)

MAGIC = b"EGF1"
VERSION = 1
_HEADER = struct.Struct('<4sIIQfI')
_FLOAT = np.dtype('<f4')


def write_feature_file(stream: FeatureStream, path: Union[str, Path]) -> Path:
    """Serialize a stream.

    Args:
        stream: Stream to write
        path: Destination file

    Returns:
        Path: Path to the written file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    tag = stream.modality_tag.encode('utf-8')
    header = _HEADER.pack(MAGIC, VERSION, stream.dim, stream.num_frames,
                          stream.clock.fps_float, len(tag))

    with open(path, 'wb') as f:
        f.write(header)
        f.write(tag)
        f.write(np.ascontiguousarray(stream.frames, dtype=_FLOAT).tobytes())

    logger.info(f"Written {stream.num_frames}x{stream.dim} '{stream.modality_tag}' features to {path}")
    return path


def read_feature_file(path: Union[str, Path]) -> FeatureStream:
    """Deserialize a stream written by write_feature_file.

    Raises:
        FileNotFoundError: If the file does not exist
        BadMagicError: If the file does not start with b"EGF1"
        VersionMismatchError: If the version is not 1
        TruncatedError: If the header or payload is short
        BadHeaderError: If the modality tag is not valid UTF-8
        NonFiniteError: If the payload contains NaN or Inf
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Feature file not found: {path}")

    data = path.read_bytes()
    if len(data) < 4 or data[:4] != MAGIC:
        raise BadMagicError(f"{path.name}: bad magic {data[:4]!r}")
    if len(data) < _HEADER.size:
        raise TruncatedError(f"{path.name}: header truncated")

    _, version, dim, num_frames, fps, tag_len = _HEADER.unpack_from(data, 0)
    if version != VERSION:
        raise VersionMismatchError(f"{path.name}: version {version}, expected {VERSION}")

    offset = _HEADER.size
    if len(data) < offset + tag_len:
        raise TruncatedError(f"{path.name}: modality tag truncated")
    try:
        tag = data[offset:offset + tag_len].decode('utf-8')
    except UnicodeDecodeError as e:
        raise BadHeaderError(f"{path.name}: modality tag is not UTF-8") from e
    offset += tag_len

    expected = num_frames * dim * _FLOAT.itemsize
    payload = data[offset:]
    if len(payload) < expected:
        raise TruncatedError(
            f"{path.name}: payload has {len(payload)} bytes, header promises {expected}")

    frames = np.frombuffer(payload, dtype=_FLOAT, count=num_frames * dim).reshape(num_frames, dim)
    if not np.isfinite(frames).all():
        raise NonFiniteError(f"{path.name}: payload contains NaN or Inf")

    clock = FrameClock(Fraction(float(fps)).limit_denominator(10_000))
    return FeatureStream(clock, frames.astype(np.float32), tag)
