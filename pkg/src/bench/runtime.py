"""
Runtime Analysis Module
Sizes a model analytically and times stream_forward on random frames.
"""

import logging
import statistics
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np
import pandas as pd

from ..model import GruParams, ModelConfig, stream_forward
from ..timebase import DomainError

logger = logging.getLogger(__name__)

BENCH_COLUMNS = ['config', 'params', 'flops_per_frame', 'fps']


def count_params(cfg: ModelConfig) -> int:
    """Embedding, three gates and the [horizon x K] head."""
    d_in, d_e, h = cfg.d_in, cfg.d_embed, cfg.d_hidden
    head = cfg.horizon * cfg.num_classes
    return (d_in * d_e + d_e) + 3 * (d_e * h + h * h + h) + (h * head + head)


def flops_per_frame(cfg: ModelConfig) -> int:
    """Two FLOPs per multiply-accumulate; element-wise work is not counted."""
    d_in, d_e, h = cfg.d_in, cfg.d_embed, cfg.d_hidden
    macs = d_in * d_e + 3 * (d_e * h + h * h) + h * cfg.horizon * cfg.num_classes
    return 2 * macs


@dataclass
class BenchResult:
    config_name: str
    config: ModelConfig
    param_count: int
    flops_per_frame: int
    frames_per_second: float
    wall_clock_s: float
    num_frames: int
    repeats: int

    def row(self) -> dict:
        return {
            'config': self.config_name,
            'params': self.param_count,
            'flops_per_frame': self.flops_per_frame,
            'fps': round(self.frames_per_second, 1),
        }


def measure_throughput(params: GruParams, cfg: ModelConfig, num_frames: int = 10_000,
                       repeats: int = 3, config_name: str = "custom", seed: int = 0) -> BenchResult:
    """Median frames/s of stream_forward over `repeats` timed runs.

    One untimed warm-up run precedes the measurements.

    Raises:
        DomainError: If num_frames or repeats is not positive, or params do
            not match cfg
    """
    if num_frames < 1 or repeats < 1:
        raise DomainError(f"num_frames and repeats must be >= 1, got {num_frames}, {repeats}")
    if params.config != cfg:
        raise DomainError("parameters do not match the benchmark configuration")
    if num_frames < 1000:
        logger.warning(f"Timing {num_frames} frames; results below 1000 frames are noisy")

    frames = np.random.default_rng(seed).standard_normal((num_frames, cfg.d_in))
    stream_forward(params, frames)

    timings = []
    for _ in range(repeats):
        start = time.perf_counter()
        stream_forward(params, frames)
        timings.append(time.perf_counter() - start)

    wall_clock = statistics.median(timings)
    result = BenchResult(
        config_name=config_name,
        config=cfg,
        param_count=count_params(cfg),
        flops_per_frame=flops_per_frame(cfg),
        frames_per_second=num_frames / wall_clock,
        wall_clock_s=wall_clock,
        num_frames=num_frames,
        repeats=repeats,
    )
    logger.info(f"{config_name}: {result.frames_per_second:,.0f} frames/s, "
                f"{result.param_count:,} params, {result.flops_per_frame:,} FLOPs/frame")
    return result


def write_bench_csv(results: Sequence[BenchResult], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame([result.row() for result in results], columns=BENCH_COLUMNS).to_csv(path, index=False)
    logger.info(f"Bench table written to {path}")
    return path
