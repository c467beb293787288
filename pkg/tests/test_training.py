"""
Tests for the training stack: loss, exact gradients, the optimizer, window
sampling and the epoch loop.
"""

import math
import tempfile
import unittest
from pathlib import Path

import numpy as np
import pandas as pd

from src.features import FeatureStream, SynthConfig, synth_conversation
from src.labeling import AnticipationTargets
from src.model import GruParams, ModelConfig, init_params, read_checkpoint
from src.timebase import DomainError, FrameClock, LabelTrack
from src.training import (
    AdamState,
    Clip,
    TrainConfig,
    TrainingDivergedError,
    WindowSampler,
    adam_step,
    backward_batch,
    backward_window,
    batch_loss,
    cross_entropy_loss,
    lr_at,
    max_relative_error,
    numerical_gradient,
    train_model,
)


def targets(*codes, horizon=None):
    codes = np.array(codes, dtype=np.int64)
    return AnticipationTargets(origin_frame=0, horizon=horizon or len(codes), targets=codes)


class TestCrossEntropyLoss(unittest.TestCase):
    """Test suite for the anticipation loss."""

    def test_single_target(self):
        result = cross_entropy_loss(np.array([[0.2, 0.7, 0.1]]), targets(1))
        self.assertAlmostEqual(result.loss, 0.356675, places=6)
        self.assertEqual(result.num_targets, 1)

    def test_uniform_rows(self):
        scores = np.full((4, 3), 1 / 3)
        self.assertAlmostEqual(cross_entropy_loss(scores, targets(0, 1, 2, 1)).loss, math.log(3), places=12)

    def test_truncated_targets_average_over_existing(self):
        scores = np.array([[0.5, 0.25, 0.25], [0.1, 0.1, 0.8], [0.3, 0.3, 0.4]])
        result = cross_entropy_loss(scores, targets(0, horizon=3))
        self.assertAlmostEqual(result.loss, math.log(2), places=12)

    def test_empty_targets(self):
        result = cross_entropy_loss(np.full((3, 3), 1 / 3), [])
        self.assertTrue(result.no_target)
        self.assertEqual(float(result), 0.0)

    def test_zero_probability_is_clamped(self):
        result = cross_entropy_loss(np.array([[1.0, 0.0, 0.0]]), targets(2))
        self.assertTrue(result.clamped)
        self.assertTrue(math.isfinite(result.loss))

    def test_too_many_targets(self):
        with self.assertRaises(DomainError):
            cross_entropy_loss(np.full((1, 3), 1 / 3), targets(0, 1))


class TestGradients(unittest.TestCase):
    """Test suite for backpropagation through time."""

    def test_zero_weight_head_bias_gradient(self):
        cfg = ModelConfig(d_in=3, d_embed=2, d_hidden=4, horizon=3)
        window = np.random.default_rng(0).standard_normal((5, 3))
        loss, grads = backward_window(GruParams.zeros(cfg), window, targets(1, 2, horizon=3))

        self.assertAlmostEqual(loss, math.log(3), places=12)
        expected = np.array([[1 / 3, -2 / 3, 1 / 3], [1 / 3, 1 / 3, -2 / 3], [0.0, 0.0, 0.0]]) / 2
        np.testing.assert_allclose(grads.b_out.reshape(3, 3), expected, atol=1e-15)
        self.assertFalse(grads.W_out.any())

    def test_matches_loss_of_forward_pass(self):
        cfg = ModelConfig(d_in=3, d_embed=3, d_hidden=4, horizon=2)
        params = init_params(cfg, 1)
        rng = np.random.default_rng(1)
        windows = rng.standard_normal((6, 5, 3))
        codes = rng.integers(0, 3, (6, 2))
        mask = np.ones((6, 2), dtype=bool)
        loss, _ = backward_batch(params, windows, codes, mask)
        self.assertEqual(loss, batch_loss(params, windows, codes, mask))

    def test_small_model_against_finite_differences(self):
        cfg = ModelConfig(d_in=3, d_embed=3, d_hidden=4, horizon=2)
        params = init_params(cfg, 7)
        rng = np.random.default_rng(7)
        window = rng.standard_normal((5, 3))
        goal = targets(2, 1)

        _, analytic = backward_window(params, window, goal)
        numeric = numerical_gradient(params, lambda p: backward_window(p, window, goal)[0])
        self.assertLessEqual(max_relative_error(analytic, numeric), 1e-4)

    def test_random_models_against_finite_differences(self):
        rng = np.random.default_rng(2024)
        for trial in range(20):
            cfg = ModelConfig(d_in=int(rng.integers(1, 5)), d_embed=int(rng.integers(1, 5)),
                              d_hidden=int(rng.integers(1, 6)), horizon=int(rng.integers(1, 4)))
            params = init_params(cfg, trial)
            length = int(rng.integers(1, 7))
            window = rng.standard_normal((length, cfg.d_in))
            m = int(rng.integers(1, cfg.horizon + 1))
            goal = targets(*rng.integers(0, 3, m), horizon=cfg.horizon)

            _, analytic = backward_window(params, window, goal)
            numeric = numerical_gradient(params, lambda p: backward_window(p, window, goal)[0])
            self.assertLessEqual(max_relative_error(analytic, numeric), 1e-4, f"trial {trial}: {cfg}")


class TestSchedule(unittest.TestCase):
    """Test suite for the learning-rate schedule."""

    def setUp(self):
        self.cfg = TrainConfig(peak_lr=1e-3, warmup_fraction=0.4)

    def test_warmup_then_cosine(self):
        self.assertEqual(lr_at(0, 100, self.cfg), 0.0)
        self.assertAlmostEqual(lr_at(20, 100, self.cfg), 5e-4, places=15)
        self.assertAlmostEqual(lr_at(40, 100, self.cfg), 1e-3, places=15)
        self.assertAlmostEqual(lr_at(70, 100, self.cfg), 5e-4, places=15)
        self.assertAlmostEqual(lr_at(100, 100, self.cfg), 0.0, places=15)

    def test_out_of_range(self):
        with self.assertRaises(DomainError):
            lr_at(101, 100, self.cfg)
        with self.assertRaises(DomainError):
            lr_at(0, 0, self.cfg)


class TestAdam(unittest.TestCase):
    """Test suite for the optimizer step."""

    def setUp(self):
        self.model_cfg = ModelConfig(d_in=2, d_embed=2, d_hidden=2, horizon=1)

    def test_zero_gradient_without_decay_is_a_no_op(self):
        params = init_params(self.model_cfg, 0)
        grads = GruParams.zeros_like(params)
        cfg = TrainConfig(weight_decay=0.0)
        new, state = adam_step(params, grads, AdamState.for_params(params), 1e-3, cfg)
        self.assertTrue(new.equals(params))
        self.assertEqual(state.step, 1)

    def test_first_step_moves_by_learning_rate(self):
        params = init_params(self.model_cfg, 0)
        grads = GruParams.zeros_like(params)
        grads.W_h[0, 0] = 3.0
        grads.b_out[1] = -0.01
        cfg = TrainConfig(weight_decay=0.0)
        new, _ = adam_step(params, grads, AdamState.for_params(params), 1e-3, cfg)
        self.assertAlmostEqual(new.W_h[0, 0] - params.W_h[0, 0], -1e-3, places=9)
        self.assertAlmostEqual(new.b_out[1] - params.b_out[1], 1e-3, places=8)

    def test_decay_applies_to_weights_only(self):
        params = GruParams.zeros(self.model_cfg)
        params.W_out[:] = 1.0
        params.b_out[:] = 1.0
        cfg = TrainConfig(weight_decay=0.1)
        new, _ = adam_step(params, GruParams.zeros_like(params), AdamState.for_params(params), 1.0, cfg)
        np.testing.assert_allclose(new.W_out, 0.9, atol=1e-15)
        np.testing.assert_array_equal(new.b_out, 1.0)

    def test_inputs_untouched(self):
        params = init_params(self.model_cfg, 0)
        before = params.copy()
        grads = init_params(self.model_cfg, 1)
        adam_step(params, grads, AdamState.for_params(params), 0.1, TrainConfig())
        self.assertTrue(params.equals(before))


def make_clip(num_frames=1000, dim=4, seed=0):
    rng = np.random.default_rng(seed)
    clock = FrameClock()
    stream = FeatureStream(clock, rng.standard_normal((num_frames, dim)).astype(np.float32))
    track = LabelTrack(clock, rng.integers(0, 3, num_frames))
    return Clip(stream, track, f"clip_{seed}")


class TestSampler(unittest.TestCase):
    """Test suite for window sampling."""

    def test_windows_have_the_requested_shape(self):
        sampler = WindowSampler([make_clip()], window_len=10, horizon=4, batch_size=8, seed=0)
        batch = next(sampler.epoch(0))
        self.assertEqual(batch.windows.shape, (8, 10, 4))
        self.assertEqual(batch.targets.shape, (8, 4))
        for row, (_, t) in enumerate(batch.end_frames):
            self.assertTrue(9 <= t <= 998)
            np.testing.assert_array_equal(batch.windows[row, -1], sampler.clips[0].stream.frames[t])

    def test_deterministic_per_seed_and_epoch(self):
        clips = [make_clip(seed=1), make_clip(num_frames=300, seed=2)]
        first = [b.end_frames for b in WindowSampler(clips, 10, 3, 16, seed=5).epoch(2, 200)]
        again = [b.end_frames for b in WindowSampler(clips, 10, 3, 16, seed=5).epoch(2, 200)]
        other = [b.end_frames for b in WindowSampler(clips, 10, 3, 16, seed=5).epoch(3, 200)]
        self.assertEqual(first, again)
        self.assertNotEqual(first, other)

    def test_end_frames_uniform(self):
        sampler = WindowSampler([make_clip()], window_len=10, horizon=4, batch_size=500, seed=3)
        ends = [t for batch in sampler.epoch(0, 10_000) for _, t in batch.end_frames]
        counts, _ = np.histogram(ends, bins=20, range=(9, 999))
        expected = len(ends) / 20
        self.assertTrue(np.all(np.abs(counts - expected) < 0.2 * expected), counts)

    def test_targets_truncated_at_clip_end(self):
        sampler = WindowSampler([make_clip(num_frames=20)], window_len=5, horizon=4, batch_size=64, seed=0)
        for batch in sampler.epoch(0, 500):
            for row, (_, t) in enumerate(batch.end_frames):
                self.assertEqual(int(batch.mask[row].sum()), min(4, 19 - t))

    def test_short_clips_rejected(self):
        with self.assertRaises(DomainError):
            WindowSampler([make_clip(num_frames=10)], window_len=10, horizon=2, batch_size=4)


class TestTrainer(unittest.TestCase):
    """Test suite for the training loop."""

    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()
        self.out = Path(self.temp_dir.name)
        self.model_cfg = ModelConfig(d_in=8, d_embed=8, d_hidden=8, horizon=3)
        synth = SynthConfig(dim=8, class_mean_separation=4.0, noise_sigma=0.5, seed=0)
        stream, track = synth_conversation(synth, 3000)
        self.clips = [Clip(stream, track, "synthetic")]

    def tearDown(self):
        self.temp_dir.cleanup()

    def train_cfg(self, **overrides):
        settings = dict(window_len=8, horizon=3, peak_lr=1e-2, epochs=4, batch_size=32,
                        samples_per_epoch=2000, seed=0)
        settings.update(overrides)
        return TrainConfig(**settings)

    def test_zero_epochs_returns_initialization(self):
        result = train_model(self.model_cfg, self.train_cfg(epochs=0), self.clips)
        self.assertTrue(result.params.equals(init_params(self.model_cfg, 0)))
        self.assertTrue(result.loss_log.empty)

    def test_loss_decreases_on_separable_data(self):
        result = train_model(self.model_cfg, self.train_cfg(), self.clips, checkpoint_dir=self.out)
        losses = result.epoch_losses()
        self.assertEqual(len(losses), 4)
        self.assertLess(losses.iloc[-1], math.log(3) - 0.3)
        self.assertEqual(len(result.checkpoints), 4)

        log = pd.read_csv(self.out / "loss_log.csv")
        self.assertEqual(list(log.columns), ['epoch', 'iter', 'lr', 'loss'])
        self.assertEqual(len(log), 4 * 63)

    def test_identical_runs_are_bit_identical(self):
        cfg = self.train_cfg(epochs=2, samples_per_epoch=320)
        first = train_model(self.model_cfg, cfg, self.clips, checkpoint_dir=self.out / "a")
        second = train_model(self.model_cfg, cfg, self.clips, checkpoint_dir=self.out / "b")
        self.assertTrue(first.params.equals(second.params))
        self.assertEqual((self.out / "a" / "epoch_001.egck").read_bytes(),
                         (self.out / "b" / "epoch_001.egck").read_bytes())
        self.assertTrue(read_checkpoint(first.checkpoints[-1]).equals(
            read_checkpoint(second.checkpoints[-1])))

    def test_divergence_raises_with_last_good_params(self):
        with self.assertRaises(TrainingDivergedError) as ctx:
            train_model(self.model_cfg, self.train_cfg(max_loss=1e-6), self.clips)
        self.assertEqual(ctx.exception.epoch, 0)
        self.assertTrue(ctx.exception.last_good.equals(init_params(self.model_cfg, 0)))

    def test_horizon_mismatch(self):
        with self.assertRaises(DomainError):
            train_model(self.model_cfg, self.train_cfg(horizon=4), self.clips)


if __name__ == '__main__':
    unittest.main()
