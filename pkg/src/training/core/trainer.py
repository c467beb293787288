"""
Trainer Module
Runs epochs of sampled windows through BPTT and Adam, checkpointing each epoch.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Union

import pandas as pd

from ...model import GruParams, ModelConfig, init_params, write_checkpoint
from ...timebase import DomainError
from ..config import TrainConfig
from .backprop import GradientError, backward_batch
from .optimizer import AdamState, adam_step, lr_at
from .sampler import Clip, WindowSampler

logger = logging.getLogger(__name__)

LOSS_LOG_COLUMNS = ['epoch', 'iter', 'lr', 'loss']


class TrainingDivergedError(DomainError):
    """Loss exceeded the divergence bound or became non-finite."""

    def __init__(self, message: str, last_good: GruParams, epoch: int):
        super().__init__(message)
        self.last_good = last_good
        self.epoch = epoch


@dataclass
class TrainResult:
    params: GruParams
    loss_log: pd.DataFrame
    checkpoints: List[Path] = field(default_factory=list)

    def epoch_losses(self) -> pd.Series:
        """Mean training loss per epoch."""
        if self.loss_log.empty:
            return pd.Series(dtype=float)
        return self.loss_log.groupby('epoch')['loss'].mean()


class Trainer:
    """Trains one model on a fixed set of clips."""

    def __init__(self, model_cfg: ModelConfig, train_cfg: TrainConfig,
                 checkpoint_dir: Optional[Union[str, Path]] = None):
        if model_cfg.horizon != train_cfg.horizon:
            raise DomainError(
                f"model horizon {model_cfg.horizon} differs from training horizon {train_cfg.horizon}")
        self.model_cfg = model_cfg
        self.train_cfg = train_cfg
        self.checkpoint_dir = Path(checkpoint_dir) if checkpoint_dir else None
        if self.checkpoint_dir:
            self.checkpoint_dir.mkdir(parents=True, exist_ok=True)

    def _save(self, params: GruParams, epoch: int) -> Optional[Path]:
        if not self.checkpoint_dir:
            return None
        return write_checkpoint(params, self.checkpoint_dir / f"epoch_{epoch:03d}.egck")

    def write_loss_log(self, loss_log: pd.DataFrame) -> Optional[Path]:
        if not self.checkpoint_dir:
            return None
        path = self.checkpoint_dir / "loss_log.csv"
        loss_log.to_csv(path, index=False)
        logger.info(f"Loss log written to {path}")
        return path

    def train(self, clips: Sequence[Clip], params: Optional[GruParams] = None) -> TrainResult:
        """Run the configured number of epochs.

        Args:
            clips: Training clips
            params: Starting parameters; a seeded initialization when omitted

        Returns:
            TrainResult: Final parameters, per-iteration loss log and checkpoints

        Raises:
            TrainingDivergedError: If the loss exceeds max_loss or is not finite
        """
        cfg = self.train_cfg
        params = params.copy() if params is not None else init_params(self.model_cfg, cfg.seed)
        if params.config != self.model_cfg:
            raise DomainError("starting parameters do not match the model configuration")

        sampler = WindowSampler(clips, cfg.window_len, cfg.horizon, cfg.batch_size, cfg.seed)
        if sampler.clips[0].stream.dim != self.model_cfg.d_in:
            raise DomainError(
                f"feature dim {sampler.clips[0].stream.dim} does not match model d_in {self.model_cfg.d_in}")

        batches = sampler.batches_per_epoch(cfg.samples_per_epoch)
        total_iters = cfg.epochs * batches
        logger.info(f"Training {cfg.epochs} epoch(s) x {batches} batches over "
                    f"{sampler.num_positions} window positions in {len(sampler.clips)} clip(s)")

        state = AdamState.for_params(params)
        rows = []
        checkpoints = []
        last_good = params.copy()
        iteration = 0

        for epoch in range(cfg.epochs):
            for batch in sampler.epoch(epoch, cfg.samples_per_epoch):
                lr = lr_at(iteration, total_iters, cfg)
                try:
                    loss, grads = backward_batch(params, batch.windows, batch.targets, batch.mask)
                except GradientError as exc:
                    logger.error(f"Non-finite values at epoch {epoch}, iter {iteration}: {exc}")
                    raise TrainingDivergedError(str(exc), last_good, epoch) from exc
                rows.append((epoch, iteration, lr, loss))

                if not math.isfinite(loss) or loss > cfg.max_loss:
                    logger.error(f"Loss diverged at epoch {epoch}, iter {iteration}: {loss}")
                    self.write_loss_log(pd.DataFrame(rows, columns=LOSS_LOG_COLUMNS))
                    raise TrainingDivergedError(
                        f"loss {loss} at iteration {iteration}", last_good, epoch)

                params, state = adam_step(params, grads, state, lr, cfg)
                iteration += 1

            epoch_loss = sum(row[3] for row in rows[-batches:]) / batches
            logger.info(f"Epoch {epoch + 1}/{cfg.epochs}: mean loss {epoch_loss:.4f}")
            last_good = params.copy()
            path = self._save(params, epoch)
            if path:
                checkpoints.append(path)

        loss_log = pd.DataFrame(rows, columns=LOSS_LOG_COLUMNS)
        self.write_loss_log(loss_log)
        return TrainResult(params, loss_log, checkpoints)


def train_model(model_cfg: ModelConfig, train_cfg: TrainConfig, clips: Sequence[Clip],
                checkpoint_dir: Optional[Union[str, Path]] = None,
                params: Optional[GruParams] = None) -> TrainResult:
    """Train a model; see Trainer.train."""
    return Trainer(model_cfg, train_cfg, checkpoint_dir).train(clips, params)
