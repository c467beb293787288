"""
Tests for feature streams, the binary feature file and the synthesizer.
"""

import struct
import tempfile
import unittest
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from src.features import (
    BadHeaderError,
    BadMagicError,
    FeatureStream,
    ModalitySpec,
    NonFiniteError,
    SynthConfig,
    TruncatedError,
    VersionMismatchError,
    class_means,
    concat_modalities,
    read_feature_file,
    synth_conversation,
    synth_modalities,
    write_feature_file,
)
from src.timebase import DomainError, FrameClock


class TestFeatureFile(unittest.TestCase):
    """Test suite for feature file serialization."""

    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()
        self.path = Path(self.temp_dir.name) / "clip.egf"
        rng = np.random.default_rng(0)
        self.stream = FeatureStream(FrameClock(), rng.standard_normal((10, 4)), "audio")

    def tearDown(self):
        self.temp_dir.cleanup()

    def test_round_trip_is_bit_exact(self):
        small = FeatureStream(FrameClock(), np.array([[0.1, -2.5], [3e-8, 1e6], [7.0, 0.0]]))
        write_feature_file(small, self.path)
        loaded = read_feature_file(self.path)
        self.assertEqual(loaded.frames.tobytes(), small.frames.tobytes())
        self.assertEqual(loaded.clock.fps, 5)
        self.assertEqual(loaded.modality_tag, "synthetic")

    def test_round_trip_keeps_tag_and_rate(self):
        stream = FeatureStream(FrameClock(10), self.stream.frames, "visual")
        write_feature_file(stream, self.path)
        loaded = read_feature_file(self.path)
        self.assertEqual(loaded.modality_tag, "visual")
        self.assertEqual(loaded.clock.fps, 10)
        np.testing.assert_array_equal(loaded.frames, stream.frames)

    def test_bad_magic(self):
        write_feature_file(self.stream, self.path)
        data = bytearray(self.path.read_bytes())
        data[:4] = b"XXXX"
        self.path.write_bytes(bytes(data))
        with self.assertRaises(BadMagicError) as ctx:
            read_feature_file(self.path)
        self.assertEqual(ctx.exception.code, "bad_magic")

    def test_version_mismatch(self):
        write_feature_file(self.stream, self.path)
        data = bytearray(self.path.read_bytes())
        data[4:8] = struct.pack('<I', 2)
        self.path.write_bytes(bytes(data))
        with self.assertRaises(VersionMismatchError):
            read_feature_file(self.path)

    def test_truncated_payload(self):
        write_feature_file(self.stream, self.path)
        data = self.path.read_bytes()
        # drop the last frame: header promises 10, payload holds 9
        self.path.write_bytes(data[:-4 * self.stream.dim])
        with self.assertRaises(TruncatedError) as ctx:
            read_feature_file(self.path)
        self.assertEqual(ctx.exception.code, "truncated")

    def test_non_finite_payload(self):
        write_feature_file(self.stream, self.path)
        data = bytearray(self.path.read_bytes())
        data[-4:] = struct.pack('<f', float('nan'))
        self.path.write_bytes(bytes(data))
        with self.assertRaises(NonFiniteError):
            read_feature_file(self.path)

    def test_tag_not_utf8(self):
        write_feature_file(self.stream, self.path)
        data = bytearray(self.path.read_bytes())
        header_size = struct.calcsize('<4sIIQfI')
        data[header_size] = 0xFF
        self.path.write_bytes(bytes(data))
        with self.assertRaises(BadHeaderError) as ctx:
            read_feature_file(self.path)
        self.assertEqual(ctx.exception.code, "bad_header")
        self.assertIsInstance(ctx.exception, DomainError)

    def test_missing_file(self):
        with self.assertRaises(FileNotFoundError):
            read_feature_file(self.path)

    def test_stream_rejects_non_finite(self):
        with self.assertRaises(DomainError):
            FeatureStream(FrameClock(), np.array([[1.0, np.inf]]))


class TestConcatModalities(unittest.TestCase):
    """Test suite for feature-wise concatenation."""

    def setUp(self):
        rng = np.random.default_rng(1)
        self.a = FeatureStream(FrameClock(), rng.standard_normal((5, 2)), "audio")
        self.b = FeatureStream(FrameClock(), rng.standard_normal((5, 3)), "visual")

    def test_equal_lengths(self):
        joined = concat_modalities(self.a, self.b)
        self.assertEqual(joined.frames.shape, (5, 5))
        self.assertEqual(joined.modality_tag, "audio+visual")

    def test_shorter_stream_wins(self):
        joined = concat_modalities(self.a, self.b.slice(0, 4))
        self.assertEqual(joined.frames.shape, (4, 5))

    def test_self_concat_preserves_halves(self):
        joined = concat_modalities(self.a, self.a)
        np.testing.assert_array_equal(joined.frames[:, :2], self.a.frames)
        np.testing.assert_array_equal(joined.frames[:, 2:], self.a.frames)

    def test_mismatched_rates(self):
        other = FeatureStream(FrameClock(10), self.b.frames, "visual")
        with self.assertRaises(DomainError):
            concat_modalities(self.a, other)


class TestSynthesizer(unittest.TestCase):
    """Test suite for the semi-Markov conversation generator."""

    def test_same_seed_same_output(self):
        cfg = SynthConfig(dim=8, seed=5)
        s1, t1 = synth_conversation(cfg, 500)
        s2, t2 = synth_conversation(cfg, 500)
        self.assertEqual(s1.frames.tobytes(), s2.frames.tobytes())
        np.testing.assert_array_equal(t1.labels, t2.labels)

        s3, _ = synth_conversation(SynthConfig(dim=8, seed=6), 500)
        self.assertFalse(np.array_equal(s1.frames, s3.frames))

    def test_clips_from_different_seeds_share_class_means(self):
        expected = class_means(8, 3.0, 0)
        for seed in (0, 10_000):
            stream, track = synth_conversation(SynthConfig(dim=8, cue_lead_frames=0, seed=seed), 20_000)
            for class_id in range(3):
                empirical = stream.frames[track.labels == class_id].mean(axis=0)
                np.testing.assert_allclose(empirical, expected[class_id], atol=0.06)

    def test_means_seed_changes_geometry_not_labels(self):
        self.assertFalse(np.allclose(class_means(8, 3.0, 0), class_means(8, 3.0, 1)))
        means = class_means(8, 3.0, 7)
        np.testing.assert_allclose(means @ means.T, 9.0 * np.eye(3), atol=1e-12)

        s0, t0 = synth_conversation(SynthConfig(dim=8, seed=2), 500)
        s1, t1 = synth_conversation(SynthConfig(dim=8, seed=2, means_seed=1), 500)
        np.testing.assert_array_equal(t0.labels, t1.labels)
        self.assertFalse(np.array_equal(s0.frames, s1.frames))

    def test_modality_means_shared_across_seeds(self):
        specs = [ModalitySpec(tag="audio", dim=6, cue_lead_frames=0),
                 ModalitySpec(tag="visual", dim=5, class_mean_separation=2.0, cue_lead_frames=0)]
        expected = [class_means(6, 3.0, [0, 0]), class_means(5, 2.0, [0, 1])]
        for seed in (1, 10_001):
            streams, track = synth_modalities(SynthConfig(dim=4, seed=seed), 20_000, specs)
            for stream, means in zip(streams, expected):
                for class_id in range(3):
                    empirical = stream.frames[track.labels == class_id].mean(axis=0)
                    np.testing.assert_allclose(empirical, means[class_id], atol=0.06)

    def test_symmetric_chain_is_balanced(self):
        _, track = synth_conversation(SynthConfig(dim=3, seed=0), 100_000)
        counts = np.bincount(track.labels, minlength=3) / len(track)
        for freq in counts:
            self.assertAlmostEqual(freq, 1 / 3, delta=0.02)

    def test_dwell_mean(self):
        _, track = synth_conversation(SynthConfig(dim=3, seed=2), 50_000)
        runs = np.count_nonzero(np.diff(track.labels)) + 1
        self.assertAlmostEqual(len(track) / runs, 10.0, delta=1.0)

    def test_zero_separation_gives_noise(self):
        cfg = SynthConfig(dim=8, class_mean_separation=0.0, seed=3)
        stream, track = synth_conversation(cfg, 20_000)
        for class_id in range(3):
            class_mean = stream.frames[track.labels == class_id].mean(axis=0)
            self.assertLess(np.abs(class_mean).max(), 0.05)

    def test_cue_only_touches_frames_before_a_change(self):
        lead = 3
        cued, track = synth_conversation(SynthConfig(dim=6, cue_lead_frames=lead, seed=4), 2000)
        plain, _ = synth_conversation(SynthConfig(dim=6, cue_lead_frames=0, seed=4), 2000)
        differs = np.any(cued.frames != plain.frames, axis=1)

        changes = np.flatnonzero(np.diff(track.labels)) + 1
        last_start = changes[-1]
        near_change = np.zeros(len(track), dtype=bool)
        for c in changes:
            near_change[max(c - lead, 0):c] = True

        self.assertTrue(np.all(differs[changes - 1]))
        untouched = ~near_change
        untouched[last_start:] = False
        self.assertFalse(np.any(differs[untouched]))

    def test_invalid_transitions_rejected(self):
        with self.assertRaises(ValidationError):
            SynthConfig(transition_weights=((0.5, 0.25, 0.25), (0.5, 0.0, 0.5), (0.5, 0.5, 0.0)))
        with self.assertRaises(ValidationError):
            SynthConfig(transition_weights=((0.0, 0.6, 0.6), (0.5, 0.0, 0.5), (0.5, 0.5, 0.0)))
        with self.assertRaises(ValidationError):
            SynthConfig(noise_sigma=0.0)

    def test_modalities_share_labels(self):
        cfg = SynthConfig(dim=4, seed=9)
        specs = [ModalitySpec(tag="audio", dim=6), ModalitySpec(tag="visual", dim=5, class_mean_separation=1.0)]
        streams, track = synth_modalities(cfg, 300, specs)
        self.assertEqual([s.modality_tag for s in streams], ["audio", "visual"])
        self.assertEqual([s.dim for s in streams], [6, 5])
        self.assertTrue(all(len(s) == len(track) == 300 for s in streams))

        _, plain_track = synth_conversation(cfg, 300)
        np.testing.assert_array_equal(track.labels, plain_track.labels)


if __name__ == '__main__':
    unittest.main()
