"""
Tests for the command-line pipeline.
"""

import io
import json
import os
import struct
import tempfile
import unittest
from contextlib import redirect_stdout
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pandas as pd

from src.model import ModelConfig, init_params, read_checkpoint, write_checkpoint
from src.run_pipeline import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, build_parser, main
from src.timebase import ClassId, read_label_track

TINY = [
    '--num-frames=300', '--num-clips=2', '--input-dim=4', '--embed-dim=4', '--hidden-dim=4',
    '--horizon=3', '--window-len=5', '--epochs=1', '--samples-per-epoch=64', '--batch-size=16',
    '--workers=2',
]


class TestPipeline(unittest.TestCase):
    """Test suite for subcommands and exit codes."""

    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()
        self.root = Path(self.temp_dir.name)
        self.env = patch.dict(os.environ, {'TURN_LOG_DIR': str(self.root / 'logs')})
        self.env.start()

    def tearDown(self):
        self.env.stop()
        self.temp_dir.cleanup()

    def run_main(self, *argv):
        stdout = io.StringIO()
        with redirect_stdout(stdout):
            code = main(list(argv))
        return code, stdout.getvalue()

    def test_parser_lists_every_command(self):
        help_text = build_parser().format_help()
        for command in ('synth', 'label', 'train', 'eval', 'baseline', 'bench', 'stream', 'sweep-L'):
            self.assertIn(command, help_text)

    def test_unknown_key_exits_with_config_error(self):
        code, _ = self.run_main('train', '--hiden-dim=4')
        self.assertEqual(code, EXIT_CONFIG)

    def test_invalid_value_exits_with_config_error(self):
        code, _ = self.run_main('synth', '--out', str(self.root), '--fps=-5')
        self.assertEqual(code, EXIT_CONFIG)

    def test_eval_needs_a_model_or_baseline(self):
        code, _ = self.run_main('eval', '--data', str(self.root))
        self.assertEqual(code, EXIT_CONFIG)

    def test_missing_data_exits_with_runtime_error(self):
        code, _ = self.run_main('train', '--data', str(self.root / 'absent'), *TINY)
        self.assertEqual(code, EXIT_RUNTIME)

    def test_corrupt_checkpoint_header_exits_with_runtime_error(self):
        path = self.root / 'model.egck'
        write_checkpoint(init_params(ModelConfig(d_in=4, d_embed=4, d_hidden=4, horizon=3)), path)
        data = bytearray(path.read_bytes())
        struct.pack_into('<I', data, 24, 4)  # num_classes
        path.write_bytes(bytes(data))
        code, printed = self.run_main('stream', '--checkpoint', str(path), *TINY)
        self.assertEqual(code, EXIT_RUNTIME)
        self.assertEqual(printed, "")

    def test_input_dim_below_three_only_blocks_synthesis(self):
        code, _ = self.run_main('bench', '--preset', 'config', '--out', str(self.root),
                                '--bench-frames=50', '--bench-repeats=1', *TINY, '--input-dim=2')
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(pd.read_csv(self.root / 'bench.csv')['config'].tolist(), ['config'])

        code, _ = self.run_main('synth', '--out', str(self.root / 'data'), *TINY, '--input-dim=2')
        self.assertEqual(code, EXIT_CONFIG)

    def test_config_file_is_read(self):
        config = self.root / 'run.env'
        config.write_text("num_frames=50\ninput_dim=3\n")
        code, _ = self.run_main('synth', '--config', str(config), '--out', str(self.root / 'data'))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(len(read_label_track(self.root / 'data' / 'clip_000.labels.csv')), 50)

    def test_synth_train_eval_stream(self):
        data = self.root / 'data'
        self.assertEqual(self.run_main('synth', '--out', str(data), *TINY)[0], EXIT_OK)
        self.assertTrue((data / 'clip_001.egf').exists())
        self.assertTrue((data / 'clip_001.labels.csv').exists())

        train_dir = self.root / 'train'
        self.assertEqual(self.run_main('train', '--data', str(data), '--out', str(train_dir), *TINY)[0], EXIT_OK)
        params = read_checkpoint(train_dir / 'model.egck')
        self.assertEqual(params.config.d_in, 4)
        self.assertTrue((train_dir / 'epoch_000.egck').exists())
        self.assertTrue((train_dir / 'loss_log.csv').exists())

        eval_dir = self.root / 'eval'
        code, printed = self.run_main('eval', '--checkpoint', str(train_dir / 'model.egck'),
                                      '--data', str(data), '--out', str(eval_dir), *TINY)
        self.assertEqual(code, EXIT_OK)
        self.assertIn("mAP", printed)
        report = json.loads((eval_dir / 'eval_report.json').read_text())
        self.assertEqual(report['columns'], ["0.20s", "0.40s", "0.60s", "Avg"])

        code, printed = self.run_main('stream', '--checkpoint', str(train_dir / 'model.egck'),
                                      '--input-file', str(data / 'clip_000.egf'), *TINY)
        self.assertEqual(code, EXIT_OK)
        records = [json.loads(line) for line in printed.splitlines()]
        self.assertEqual(len(records), 300)
        self.assertEqual(len(records[0]['probs']), 9)

    def test_multi_seed_training(self):
        code, _ = self.run_main('train', '--out', str(self.root / 'train'), '--seeds=1,2', *TINY)
        self.assertEqual(code, EXIT_OK)
        first = read_checkpoint(self.root / 'train' / 'seed_1' / 'model.egck')
        second = read_checkpoint(self.root / 'train' / 'seed_2' / 'model.egck')
        self.assertFalse(first.equals(second))

    def test_silence_baseline_writes_triggers(self):
        out = self.root / 'baseline'
        code, _ = self.run_main('baseline', '--kind', 'silence', '--out', str(out), *TINY)
        self.assertEqual(code, EXIT_OK)
        self.assertTrue((out / 'clip_000_triggers.csv').exists())
        self.assertTrue((out / 'silence_baseline_report.json').exists())

    def test_bench(self):
        code, _ = self.run_main('bench', '--preset', 'config', '--out', str(self.root),
                                '--bench-frames=200', '--bench-repeats=1', *TINY)
        self.assertEqual(code, EXIT_OK)
        table = pd.read_csv(self.root / 'bench.csv')
        self.assertEqual(table['config'].tolist(), ['config'])

    def test_label_transcripts(self):
        transcripts = self.root / 'transcripts'
        transcripts.mkdir()
        lines = [
            {"speaker": "wearer", "is_target": True, "start": 0.0, "end": 1.0},
            {"speaker": "guest", "is_target": False, "start": 1.2, "end": 2.0},
        ]
        (transcripts / 'talk.jsonl').write_text("\n".join(json.dumps(line) for line in lines) + "\n")

        out = self.root / 'labels'
        code, _ = self.run_main('label', '--input', str(transcripts), '--out', str(out), '--smooth')
        self.assertEqual(code, EXIT_OK)
        track = read_label_track(out / 'talk.labels.csv')
        self.assertEqual(len(track), 10)
        self.assertEqual(track.labels[0], int(ClassId.TARGET_SPEAKER))
        self.assertEqual(track.labels[-1], int(ClassId.OTHER_SPEAKER))

    def test_window_sweep(self):
        code, _ = self.run_main('sweep-L', '--out', str(self.root), '--window-lens=3,6', *TINY)
        self.assertEqual(code, EXIT_OK)
        table = pd.read_csv(self.root / 'sweep_L.csv')
        self.assertEqual(table['window_len'].tolist(), [3, 6])
        self.assertTrue(np.isfinite(table['avg_map']).all())


if __name__ == '__main__':
    unittest.main()
