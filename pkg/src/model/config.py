"""
Model Configuration
"""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field


class ModelConfig(BaseModel):
    """Layer sizes of the recurrent anticipation model."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    d_in: int = Field(default=64, ge=1)
    d_embed: int = Field(default=64, ge=1)
    d_hidden: int = Field(default=64, ge=1)
    horizon: int = Field(default=10, ge=1)
    num_classes: Literal[3] = 3

    @property
    def head_width(self) -> int:
        return self.horizon * self.num_classes

    @classmethod
    def desk(cls, d_in: int = 64, horizon: int = 10) -> 'ModelConfig':
        return cls(d_in=d_in, d_embed=64, d_hidden=64, horizon=horizon)

    @classmethod
    def full_scale(cls) -> 'ModelConfig':
        """Layer widths of the full-size recurrent model."""
        return cls(d_in=2048, d_embed=2048, d_hidden=1024, horizon=10)
