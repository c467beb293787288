"""
Training Configuration
"""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field


class TrainConfig(BaseModel):
    """Optimizer, schedule and sampling settings.

    Defaults are sized for desk-scale models; `full_scale()` returns the
    settings used for full-size models.
    """

    model_config = ConfigDict(extra='forbid', frozen=True)

    window_len: int = Field(default=32, ge=1)
    horizon: int = Field(default=10, ge=1)
    peak_lr: float = Field(default=1e-3, gt=0.0)
    weight_decay: float = Field(default=5e-5, ge=0.0)
    warmup_fraction: float = Field(default=0.4, gt=0.0, lt=1.0)
    epochs: int = Field(default=3, ge=0)
    batch_size: int = Field(default=32, ge=1)
    samples_per_epoch: Optional[int] = Field(default=None, ge=1)
    beta1: float = Field(default=0.9, ge=0.0, lt=1.0)
    beta2: float = Field(default=0.999, ge=0.0, lt=1.0)
    eps: float = Field(default=1e-8, gt=0.0)
    max_loss: float = Field(default=1e4, gt=0.0)
    seed: int = 0

    @classmethod
    def full_scale(cls, **overrides) -> 'TrainConfig':
        settings = dict(peak_lr=7e-5, weight_decay=5e-5, warmup_fraction=0.4,
                        epochs=50, batch_size=16)
        settings.update(overrides)
        return cls(**settings)
