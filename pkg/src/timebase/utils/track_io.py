"""
Label Track I/O
Reads and writes label tracks as CSV with header `frame,class`.
"""

import logging
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from ..clock import FrameClock
from ..models import DomainError, LabelTrack

logger = logging.getLogger(__name__)


def write_label_track(track: LabelTrack, path: Union[str, Path]) -> Path:
    """Write one row per frame.

    Args:
        track: Track to write
        path: Destination CSV file

    Returns:
        Path: Path to the written file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    df = pd.DataFrame({'frame': np.arange(len(track)), 'class': track.labels.astype(int)})
    df.to_csv(path, index=False)

    logger.info(f"Written {len(track)} frame labels to {path}")
    return path


def read_label_track(path: Union[str, Path], clock: FrameClock = FrameClock()) -> LabelTrack:
    """Read a label track written by write_label_track.

    Raises:
        FileNotFoundError: If the file does not exist
        DomainError: If columns are missing or frames are not 0..T-1 in order
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Label track not found: {path}")

    df = pd.read_csv(path)
    missing = {'frame', 'class'} - set(df.columns)
    if missing:
        raise DomainError(f"{path.name}: missing columns {sorted(missing)}")

    frames = df['frame'].to_numpy()
    if not np.array_equal(frames, np.arange(len(df))):
        raise DomainError(f"{path.name}: frame column must run 0..{len(df) - 1} without gaps")

    return LabelTrack(clock, df['class'].to_numpy())
