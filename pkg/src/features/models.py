"""
Feature Models

Defines the feature stream container, the synthetic-data configuration and
the file format errors.
"""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..timebase import DomainError, FrameClock


class FeatureFileError(DomainError):
    """Base class for malformed feature or checkpoint files."""

    code = "feature_file"


class BadMagicError(FeatureFileError):
    code = "bad_magic"


class VersionMismatchError(FeatureFileError):
    code = "version_mismatch"


class TruncatedError(FeatureFileError):
    code = "truncated"


class NonFiniteError(FeatureFileError):
    code = "non_finite"


class BadHeaderError(FeatureFileError):
    """Header fields that parse but describe no valid stream or model."""

    code = "bad_header"


@dataclass
class FeatureStream:
    """T x D matrix of float32 features at a fixed frame rate."""

    clock: FrameClock
    frames: np.ndarray
    modality_tag: str = "synthetic"

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float32)
        if frames.ndim != 2:
            raise DomainError(f"frames must be a T x D matrix, got shape {frames.shape}")
        if frames.shape[0] < 1 or frames.shape[1] < 1:
            raise DomainError(f"feature stream needs T >= 1 and D >= 1, got {frames.shape}")
        if not np.isfinite(frames).all():
            raise NonFiniteError("feature stream contains NaN or Inf")
        self.frames = frames

    @property
    def dim(self) -> int:
        return int(self.frames.shape[1])

    @property
    def num_frames(self) -> int:
        return int(self.frames.shape[0])

    def __len__(self) -> int:
        return self.num_frames

    def slice(self, start: int, stop: int) -> 'FeatureStream':
        return FeatureStream(self.clock, self.frames[start:stop], self.modality_tag)


class SynthConfig(BaseModel):
    """Semi-Markov conversation generator settings.

    Labels dwell in a class for a geometric number of frames, then jump by
    `transition_weights`. Features are the class mean plus Gaussian noise;
    over the last `cue_lead_frames` frames of a segment the mean drifts
    linearly toward the next class's mean.
    `seed` drives the chain and the noise; `means_seed` alone fixes the
    class means, so clips that differ only in `seed` share a geometry.
    """

    model_config = ConfigDict(extra='forbid', frozen=True)

    state_dwell_mean_frames: Tuple[float, float, float] = (10.0, 10.0, 10.0)
    transition_weights: Tuple[Tuple[float, float, float], ...] = (
        (0.0, 0.5, 0.5),
        (0.5, 0.0, 0.5),
        (0.5, 0.5, 0.0),
    )
    dim: int = Field(default=64, ge=3)
    class_mean_separation: float = Field(default=3.0, ge=0.0)
    noise_sigma: float = Field(default=1.0, gt=0.0)
    cue_lead_frames: int = Field(default=3, ge=0)
    seed: int = 0
    means_seed: int = Field(default=0, ge=0)

    @field_validator('state_dwell_mean_frames')
    @classmethod
    def _dwell_at_least_one(cls, value):
        if any(mean < 1 for mean in value):
            raise ValueError(f"dwell means must be >= 1, got {value}")
        return value

    @field_validator('transition_weights')
    @classmethod
    def _row_stochastic(cls, value):
        if len(value) != 3 or any(len(row) != 3 for row in value):
            raise ValueError("transition_weights must be 3 x 3")
        for i, row in enumerate(value):
            if row[i] != 0:
                raise ValueError(f"transition row {i} must have a zero diagonal")
            if any(w < 0 for w in row):
                raise ValueError(f"transition row {i} has a negative weight")
            if abs(sum(row) - 1.0) > 1e-9:
                raise ValueError(f"transition row {i} sums to {sum(row)}, expected 1")
        return value


class ModalitySpec(BaseModel):
    """Per-modality overrides for multi-stream synthesis."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    tag: str
    dim: int = Field(default=32, ge=3)
    class_mean_separation: float = Field(default=3.0, ge=0.0)
    cue_lead_frames: int = Field(default=3, ge=0)

    @model_validator(mode='after')
    def _tag_not_empty(self):
        if not self.tag:
            raise ValueError("modality tag must not be empty")
        return self
