"""
Transcript Reader Module
Reads transcript and VAD segment files in JSON-lines form.

Transcript records: {"speaker": str, "is_target": bool, "start": float, "end": float}
VAD records:        {"start": float, "end": float}
"""

import logging
from pathlib import Path
from typing import List, Union

import pandas as pd

from ...timebase import DomainError, Segment

logger = logging.getLogger(__name__)


class TranscriptReader:
    """Loads speaker segments from line-delimited JSON files."""

    SUPPORTED_EXTENSIONS = ['.jsonl', '.ndjson', '.json']

    def get_supported_files(self, directory: Union[str, Path]) -> List[Path]:
        """Get all segment files from a directory, sorted by name."""
        directory = Path(directory)
        return sorted(
            file
            for ext in self.SUPPORTED_EXTENSIONS
            for file in directory.glob(f"*{ext}")
        )

    def _read_records(self, file_path: Path, required: List[str]) -> pd.DataFrame:
        if not file_path.exists():
            raise FileNotFoundError(f"Segment file not found: {file_path}")

        logger.info(f"Reading segments: {file_path.name}")
        if file_path.stat().st_size == 0:
            return pd.DataFrame(columns=required)

        df = pd.read_json(file_path, lines=True)
        missing = [col for col in required if col not in df.columns]
        if missing:
            raise DomainError(f"{file_path.name}: missing fields {missing}")
        return df

    def read_transcript(self, file_path: Union[str, Path]) -> List[Segment]:
        """Read speaker-attributed segments.

        Raises:
            FileNotFoundError: If the file does not exist
            DomainError: If a record lacks a field or has start >= end
        """
        df = self._read_records(Path(file_path), ['speaker', 'is_target', 'start', 'end'])
        return [
            Segment(float(row.start), float(row.end), is_target=bool(row.is_target),
                    speaker=str(row.speaker))
            for row in df.itertuples(index=False)
        ]

    def read_vad(self, file_path: Union[str, Path]) -> List[Segment]:
        """Read binary speech segments, sorted by start."""
        df = self._read_records(Path(file_path), ['start', 'end'])
        df = df.sort_values('start', kind='stable')
        return [Segment(float(row.start), float(row.end)) for row in df.itertuples(index=False)]
