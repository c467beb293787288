"""
Run Configuration
Flat key=value settings shared by every pipeline subcommand.

Precedence: field defaults < config file < command-line flags.
"""

import logging
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Literal, Mapping, Optional, Sequence, Union

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .features import ModalitySpec, SynthConfig
from .model import ModelConfig
from .timebase import DomainError, FrameClock
from .training import TrainConfig

logger = logging.getLogger(__name__)


class ConfigError(DomainError):
    """Invalid configuration; `key` names the offending setting."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def _int_list(value: str) -> List[int]:
    return [int(part) for part in value.split(',') if part.strip()]


class RunConfig(BaseModel):
    """Every tunable of the pipeline in one flat namespace."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    # timebase
    fps: float = Field(default=5.0, gt=0.0)
    seed: int = 0

    # model
    input_dim: int = Field(default=64, ge=1)
    embed_dim: int = Field(default=64, ge=1)
    hidden_dim: int = Field(default=64, ge=1)
    horizon: int = Field(default=10, ge=1)

    # training
    window_len: int = Field(default=32, ge=1)
    peak_lr: float = Field(default=1e-3, gt=0.0)
    weight_decay: float = Field(default=5e-5, ge=0.0)
    warmup_fraction: float = Field(default=0.4, gt=0.0, lt=1.0)
    epochs: int = Field(default=3, ge=0)
    batch_size: int = Field(default=32, ge=1)
    samples_per_epoch: Optional[int] = Field(default=None, ge=1)
    max_loss: float = Field(default=1e4, gt=0.0)
    seeds: str = ""
    window_lens: str = "5,10,20,40"

    # synthesis
    num_frames: int = Field(default=10_000, ge=1)
    num_clips: int = Field(default=1, ge=1)
    dwell_means: str = "10,10,10"
    transition_weights: str = "0,0.5,0.5;0.5,0,0.5;0.5,0.5,0"
    class_mean_separation: float = Field(default=3.0, ge=0.0)
    noise_sigma: float = Field(default=1.0, gt=0.0)
    cue_lead_frames: int = Field(default=3, ge=0)
    means_seed: int = Field(default=0, ge=0)
    modalities: str = ""

    # labeling
    clip_duration_s: Optional[float] = Field(default=None, gt=0.0)
    min_duration_s: float = Field(default=0.2, ge=0.0)

    # baselines, evaluation, streaming
    trigger_threshold: float = Field(default=0.5, ge=0.0, le=1.0)
    silence_ms: float = Field(default=600.0, gt=0.0)
    grace_frames: int = Field(default=3, ge=0)
    ap_variant: Literal['positives-rank', 'all-thresholds'] = 'positives-rank'
    bench_frames: int = Field(default=10_000, ge=1)
    bench_repeats: int = Field(default=3, ge=1)

    # io
    output_dir: str = "outputs"
    workers: int = Field(default=4, ge=1)

    @field_validator('seeds', 'window_lens')
    @classmethod
    def _comma_ints(cls, value):
        try:
            _int_list(value)
        except ValueError:
            raise ValueError(f"expected comma-separated integers, got {value!r}")
        return value

    @field_validator('dwell_means')
    @classmethod
    def _three_means(cls, value):
        try:
            means = [float(part) for part in value.split(',')]
        except ValueError:
            raise ValueError(f"expected three comma-separated numbers, got {value!r}")
        if len(means) != 3:
            raise ValueError(f"expected three dwell means, got {len(means)}")
        return value

    @field_validator('transition_weights')
    @classmethod
    def _matrix_text(cls, value):
        try:
            rows = [[float(part) for part in row.split(',')] for row in value.split(';')]
        except ValueError:
            raise ValueError(f"expected rows of numbers separated by ';', got {value!r}")
        if len(rows) != 3 or any(len(row) != 3 for row in rows):
            raise ValueError("transition_weights must be 3 x 3")
        return value

    @field_validator('modalities')
    @classmethod
    def _modality_text(cls, value):
        for entry in filter(None, (part.strip() for part in value.split(','))):
            fields = entry.split(':')
            if len(fields) not in (1, 2, 3, 4):
                raise ValueError(f"modality {entry!r} must be tag[:dim[:separation[:cue_lead]]]")
        return value

    def clock(self) -> FrameClock:
        return FrameClock(Fraction(repr(self.fps)))

    def seed_list(self) -> List[int]:
        return _int_list(self.seeds) or [self.seed]

    def window_len_list(self) -> List[int]:
        return _int_list(self.window_lens)

    def to_model_config(self, input_dim: Optional[int] = None) -> ModelConfig:
        return ModelConfig(d_in=input_dim or self.input_dim, d_embed=self.embed_dim,
                           d_hidden=self.hidden_dim, horizon=self.horizon)

    def to_train_config(self, **overrides) -> TrainConfig:
        settings = dict(
            window_len=self.window_len,
            horizon=self.horizon,
            peak_lr=self.peak_lr,
            weight_decay=self.weight_decay,
            warmup_fraction=self.warmup_fraction,
            epochs=self.epochs,
            batch_size=self.batch_size,
            samples_per_epoch=self.samples_per_epoch,
            max_loss=self.max_loss,
            seed=self.seed,
        )
        settings.update(overrides)
        return TrainConfig(**settings)

    def to_synth_config(self, seed: Optional[int] = None, dim: Optional[int] = None) -> SynthConfig:
        """Generator settings for one clip.

        Raises:
            ConfigError: If a synthesis key is invalid, including an
                input_dim below the generator's minimum of 3
        """
        weights = tuple(tuple(float(w) for w in row.split(',')) for row in self.transition_weights.split(';'))
        try:
            return SynthConfig(
                state_dwell_mean_frames=tuple(float(m) for m in self.dwell_means.split(',')),
                transition_weights=weights,
                dim=self.input_dim if dim is None else dim,
                class_mean_separation=self.class_mean_separation,
                noise_sigma=self.noise_sigma,
                cue_lead_frames=self.cue_lead_frames,
                seed=self.seed if seed is None else seed,
                means_seed=self.means_seed,
            )
        except ValidationError as e:
            raise _config_error(e, _COMPONENT_KEYS) from e

    def modality_specs(self) -> List[ModalitySpec]:
        """Parse `tag[:dim[:separation[:cue_lead]]]` entries."""
        specs = []
        for entry in filter(None, (part.strip() for part in self.modalities.split(','))):
            tag, *rest = entry.split(':')
            settings = {'tag': tag}
            for name, cast, raw in zip(('dim', 'class_mean_separation', 'cue_lead_frames'),
                                       (int, float, int), rest):
                settings[name] = cast(raw)
            specs.append(ModalitySpec(**settings))
        return specs


def normalize_key(key: str) -> str:
    return key.lstrip('-').replace('-', '_')


def parse_overrides(tokens: Sequence[str]) -> Dict[str, str]:
    """Turn `--key value` / `--key=value` tokens into a mapping.

    Raises:
        ConfigError: On a dangling key or a value without a key
    """
    overrides = {}
    index = 0
    while index < len(tokens):
        token = tokens[index]
        if not token.startswith('--'):
            raise ConfigError(token, "expected a --key flag")
        if '=' in token:
            key, value = token.split('=', 1)
            index += 1
        else:
            if index + 1 >= len(tokens):
                raise ConfigError(normalize_key(token), "missing value")
            key, value = token, tokens[index + 1]
            index += 2
        overrides[normalize_key(key)] = value
    return overrides


def _read_file(path: Path) -> Dict[str, str]:
    if not path.exists():
        raise ConfigError(str(path), "config file not found")
    values = {}
    for key, value in dotenv_values(path).items():
        if value is None:
            raise ConfigError(key, "missing value")
        values[normalize_key(key)] = value
    return values


_COMPONENT_KEYS = {
    'state_dwell_mean_frames': 'dwell_means',
    'dim': 'input_dim',
    'd_in': 'input_dim',
    'd_embed': 'embed_dim',
    'd_hidden': 'hidden_dim',
}


def _config_error(error: ValidationError, renames: Optional[Mapping[str, str]] = None) -> ConfigError:
    detail = error.errors()[0]
    key = str(detail['loc'][0]) if detail['loc'] else 'config'
    return ConfigError((renames or {}).get(key, key), detail["msg"])


def parse_config(path: Optional[Union[str, Path]] = None,
                 overrides: Optional[Mapping[str, str]] = None) -> RunConfig:
    """Resolve a RunConfig from defaults, a config file and flag overrides.

    Args:
        path: Optional flat key=value file
        overrides: Flag values, keyed with dashes or underscores

    Returns:
        RunConfig: Validated configuration

    Raises:
        ConfigError: Naming the first unknown, mistyped or invalid key
    """
    merged: Dict[str, str] = {}
    if path is not None:
        merged.update(_read_file(Path(path)))
    for key, value in (overrides or {}).items():
        merged[normalize_key(key)] = value

    unknown = sorted(set(merged) - set(RunConfig.model_fields))
    if unknown:
        raise ConfigError(unknown[0], "unknown configuration key")

    try:
        config = RunConfig(**merged)
    except ValidationError as e:
        raise _config_error(e) from e

    # input_dim only needs to reach 3 when a clip is synthesized
    config.to_synth_config(dim=max(config.input_dim, 3))
    try:
        config.to_model_config()
    except ValidationError as e:
        raise _config_error(e, _COMPONENT_KEYS) from e

    try:
        config.modality_specs()
    except ValueError as e:
        raise ConfigError('modalities', str(e)) from e

    logger.debug(f"Config resolved from {len(merged)} explicit setting(s)")
    return config

