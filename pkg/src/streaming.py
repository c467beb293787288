"""
Streaming Module
Live frame-by-frame scoring with a speak trigger.

Each valid input frame produces one JSON line on the sink:
    {"frame": i, "probs": [horizon x 3, row-major], "trigger": bool}
The trigger fires when the offset-1 TargetSpeaker probability exceeds the
threshold. Diagnostics go through the logger, never to the sink.
"""

import json
import logging
import math
from typing import Iterable, Iterator, Optional, TextIO, Union

import numpy as np

from .features import FeatureStream
from .model import GruParams, StreamingSession
from .timebase import ClassId, DomainError

logger = logging.getLogger(__name__)

FrameSource = Union[Iterable[str], FeatureStream, np.ndarray]


def parse_frame_line(line: str) -> Optional[np.ndarray]:
    """Parse one row of space-separated reals; None when the row is malformed."""
    try:
        values = [float(token) for token in line.split()]
    except ValueError:
        return None
    if not values or not all(math.isfinite(value) for value in values):
        return None
    return np.array(values)


def _text_frames(lines: Iterable[str]) -> Iterator[np.ndarray]:
    for line_number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        frame = parse_frame_line(line)
        if frame is None:
            logger.warning(f"Skipping malformed frame on line {line_number}: {line.strip()[:60]!r}")
            continue
        yield frame


def _frames(source: FrameSource) -> Iterator[np.ndarray]:
    if isinstance(source, FeatureStream):
        yield from source.frames
    elif isinstance(source, np.ndarray):
        yield from source
    else:
        yield from _text_frames(source)


def format_record(frame_index: int, probs: np.ndarray, trigger: bool) -> str:
    return json.dumps({
        'frame': frame_index,
        'probs': [float(p) for p in probs.reshape(-1)],
        'trigger': trigger,
    })


def stream_mode(params: GruParams, threshold: float, source: FrameSource, sink: TextIO) -> int:
    """Score frames as they arrive and write one record per frame.

    Args:
        params: Model parameters
        threshold: Trigger threshold on the 0.2 s-ahead Target probability
        source: Text rows, a FeatureStream or a T x D array
        sink: Text stream receiving the JSON records

    Returns:
        int: Number of frames emitted

    Raises:
        DomainError: If a frame's width differs from the model input size
    """
    session = StreamingSession(params)
    target = int(ClassId.TARGET_SPEAKER)
    emitted = 0

    for frame in _frames(source):
        if frame.shape[0] != params.config.d_in:
            raise DomainError(
                f"frame {session.frame_index} has {frame.shape[0]} values, model expects {params.config.d_in}")
        probs = session.push(frame)
        trigger = bool(probs[0, target] > threshold)
        sink.write(format_record(session.frame_index - 1, probs, trigger) + "\n")
        sink.flush()
        emitted += 1
        if trigger:
            logger.debug(f"Trigger at frame {session.frame_index - 1} (p={probs[0, target]:.3f})")

    logger.info(f"Streamed {emitted} frame(s)")
    return emitted
