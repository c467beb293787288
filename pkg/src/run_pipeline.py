#!/usr/bin/env python3
"""
Main pipeline orchestration script.

Subcommands: synth, label, train, eval, baseline, bench, stream, sweep-L.
Any `--key value` flag not listed by a subcommand overrides a RunConfig key.
Exit codes: 0 success, 2 configuration error, 3 runtime or data error.
"""

import os

# one BLAS thread per process; per-clip fan-out uses threads instead
for _var in ('OMP_NUM_THREADS', 'OPENBLAS_NUM_THREADS', 'MKL_NUM_THREADS'):
    os.environ.setdefault(_var, '1')

import argparse
import logging
import sys
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from dotenv import load_dotenv

# Add project root to path so `src.` imports resolve when run as a script
project_root = Path(__file__).parent.parent
if str(project_root) not in sys.path:
    sys.path.append(str(project_root))

from src.baselines import (
    baseline_score_tensor,
    generous_score_track,
    random_baseline_scores,
    silence_triggers,
    write_triggers,
)
from src.bench import count_params, measure_throughput, write_bench_csv
from src.config import ConfigError, RunConfig, parse_config, parse_overrides
from src.evaluation import (
    EvalReport,
    ReportWriter,
    aggregate_reports,
    evaluate_streams,
    format_report_table,
)
from src.features import (
    FeatureStream,
    concat_modalities,
    read_feature_file,
    synth_conversation,
    synth_modalities,
    write_feature_file,
)
from src.labeling import TranscriptReader, segments_to_labels, smooth_segments, vad_to_labels
from src.model import GruParams, ModelConfig, init_params, read_checkpoint, stream_forward, write_checkpoint
from src.streaming import stream_mode
from src.timebase import ClassId, DomainError, LabelTrack, read_label_track, write_label_track
from src.training import Clip, Trainer

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

# held-out clips are synthesized from a disjoint seed range
HELD_OUT_SEED_OFFSET = 10_000

LABELS_SUFFIX = '.labels.csv'


def setup_logging() -> None:
    """Configure the root logger from TURN_LOG_LEVEL / TURN_LOG_DIR."""
    load_dotenv()
    log_dir = Path(os.getenv('TURN_LOG_DIR', 'logs'))
    log_dir.mkdir(parents=True, exist_ok=True)
    logging.basicConfig(
        level=os.getenv('TURN_LOG_LEVEL', 'INFO').upper(),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(log_dir / 'pipeline.log'),
            logging.StreamHandler(sys.stderr),
        ]
    )


# ---------------------------------------------------------------- data


def synth_one(cfg: RunConfig, seed: int) -> Tuple[List[FeatureStream], LabelTrack]:
    """One clip: a stream per configured modality, or a single stream."""
    synth_cfg = cfg.to_synth_config(seed=seed)
    specs = cfg.modality_specs()
    if specs:
        return synth_modalities(synth_cfg, cfg.num_frames, specs, cfg.clock())
    stream, track = synth_conversation(synth_cfg, cfg.num_frames, cfg.clock())
    return [stream], track


def join_streams(streams: Sequence[FeatureStream]) -> FeatureStream:
    stream = streams[0]
    for other in streams[1:]:
        stream = concat_modalities(stream, other)
    return stream


def synth_clips(cfg: RunConfig, held_out: bool = False) -> List[Clip]:
    """Synthesize num_clips clips; modality streams are concatenated."""
    base_seed = cfg.seed + (HELD_OUT_SEED_OFFSET if held_out else 0)
    clips = []
    for i in range(cfg.num_clips):
        streams, track = synth_one(cfg, base_seed + i)
        stream = join_streams(streams)
        clips.append(Clip(stream, track, f"clip_{i:03d}"))
    split = "held-out" if held_out else "training"
    logger.info(f"Synthesized {len(clips)} {split} clip(s) of {cfg.num_frames} frames")
    return clips


def load_clips(data_dir: Path) -> List[Clip]:
    """Pair `<clip>[.<tag>].egf` feature files with `<clip>.labels.csv`.

    Several feature files for one clip are concatenated in tag order.

    Raises:
        FileNotFoundError: If the directory or a clip's label track is missing
        DomainError: If the directory holds no feature files
    """
    if not data_dir.is_dir():
        raise FileNotFoundError(f"Data directory not found: {data_dir}")

    grouped: Dict[str, List[Path]] = defaultdict(list)
    for path in sorted(data_dir.glob('*.egf')):
        grouped[path.name.split('.')[0]].append(path)
    if not grouped:
        raise DomainError(f"no feature files (*.egf) in {data_dir}")

    clips = []
    for name, paths in sorted(grouped.items()):
        stream = join_streams([read_feature_file(path) for path in paths])
        track = read_label_track(data_dir / f"{name}{LABELS_SUFFIX}", stream.clock)
        clips.append(Clip(stream, track, name))
    logger.info(f"Loaded {len(clips)} clip(s) from {data_dir}")
    return clips


def get_clips(data: Optional[str], cfg: RunConfig, held_out: bool) -> List[Clip]:
    return load_clips(Path(data)) if data else synth_clips(cfg, held_out)


def predict(params: GruParams, clips: Sequence[Clip], workers: int) -> List[np.ndarray]:
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(lambda clip: stream_forward(params, clip.stream), clips))


def baseline_predictions(kind: str, clips: Sequence[Clip], cfg: RunConfig,
                         triggers_dir: Optional[Path] = None) -> List[np.ndarray]:
    """Score tensors of a non-learned baseline, one per clip."""
    predictions = []
    for i, clip in enumerate(clips):
        if kind == 'random':
            predictions.append(random_baseline_scores(len(clip), cfg.horizon, cfg.seed + i))
            continue
        triggers = silence_triggers(clip.track, cfg.silence_ms)
        if triggers_dir:
            write_triggers(triggers, triggers_dir / f"{clip.name}_triggers.csv")
        scores = generous_score_track(triggers, clip.track, cfg.grace_frames)
        predictions.append(baseline_score_tensor(scores, cfg.horizon))
        logger.info(f"{clip.name}: {len(triggers)} silence trigger(s)")
    return predictions


def evaluate(predictions: Sequence[np.ndarray], clips: Sequence[Clip], cfg: RunConfig) -> EvalReport:
    pairs = [(pred, clip.track) for pred, clip in zip(predictions, clips)]
    return evaluate_streams(pairs, cfg.ap_variant, cfg.workers)


def train_one(cfg: RunConfig, clips: Sequence[Clip], seed: int, window_len: Optional[int] = None,
              checkpoint_dir: Optional[Path] = None) -> GruParams:
    model_cfg = cfg.to_model_config(input_dim=clips[0].stream.dim)
    overrides = {'seed': seed}
    if window_len is not None:
        overrides['window_len'] = window_len
    trainer = Trainer(model_cfg, cfg.to_train_config(**overrides), checkpoint_dir)
    return trainer.train(clips).params


# ---------------------------------------------------------------- commands


def cmd_synth(args, cfg: RunConfig) -> int:
    out_dir = Path(args.out or Path(cfg.output_dir) / 'synth')
    for i in range(cfg.num_clips):
        name = f"clip_{i:03d}"
        streams, track = synth_one(cfg, cfg.seed + i)
        if not cfg.modalities:
            write_feature_file(streams[0], out_dir / f"{name}.egf")
        else:
            for stream in streams:
                write_feature_file(stream, out_dir / f"{name}.{stream.modality_tag}.egf")
        write_label_track(track, out_dir / f"{name}{LABELS_SUFFIX}")
    logger.info(f"✅ Wrote {cfg.num_clips} synthetic clip(s) to {out_dir}")
    return EXIT_OK


def _label_file(path: Path, args, cfg: RunConfig) -> LabelTrack:
    reader = TranscriptReader()
    segments = reader.read_vad(path) if args.vad else reader.read_transcript(path)
    duration = cfg.clip_duration_s or max((seg.end_s for seg in segments), default=0.0)
    if duration <= 0:
        raise DomainError(f"{path.name}: cannot infer clip duration from an empty file; set clip_duration_s")

    if args.vad:
        return vad_to_labels(segments, duration, cfg.clock(), smooth=args.smooth, min_dur_s=cfg.min_duration_s)

    if args.smooth:
        by_speaker: Dict[tuple, list] = defaultdict(list)
        for seg in segments:
            by_speaker[(seg.is_target, seg.speaker)].append(seg)
        segments = [
            smoothed
            for group in by_speaker.values()
            for smoothed in smooth_segments(sorted(group, key=lambda s: s.start_s), cfg.min_duration_s)
        ]
    return segments_to_labels(segments, duration, cfg.clock())


def cmd_label(args, cfg: RunConfig) -> int:
    source = Path(args.input)
    if not source.exists():
        raise FileNotFoundError(f"Input not found: {source}")
    files = TranscriptReader().get_supported_files(source) if source.is_dir() else [source]
    if not files:
        raise DomainError(f"no transcript files in {source}")
    out_dir = Path(args.out or Path(cfg.output_dir) / 'labels')

    with ThreadPoolExecutor(max_workers=cfg.workers) as executor:
        tracks = list(executor.map(lambda path: _label_file(path, args, cfg), files))

    for path, track in zip(files, tracks):
        write_label_track(track, out_dir / f"{path.stem}{LABELS_SUFFIX}")
    logger.info(f"✅ Labeled {len(files)} file(s) into {out_dir}")
    return EXIT_OK


def cmd_train(args, cfg: RunConfig) -> int:
    clips = get_clips(args.data, cfg, held_out=False)
    out_dir = Path(args.out or Path(cfg.output_dir) / 'train')
    seeds = cfg.seed_list()
    for seed in seeds:
        run_dir = out_dir if len(seeds) == 1 else out_dir / f"seed_{seed}"
        logger.info(f"🚀 Training seed {seed} into {run_dir}")
        params = train_one(cfg, clips, seed, checkpoint_dir=run_dir)
        write_checkpoint(params, run_dir / 'model.egck')
    return EXIT_OK


def cmd_eval(args, cfg: RunConfig) -> int:
    if not args.checkpoint and not args.baseline:
        raise ConfigError('checkpoint', "eval needs --checkpoint or --baseline")
    clips = get_clips(args.data, cfg, held_out=True)
    writer = ReportWriter(args.out or Path(cfg.output_dir) / 'eval')

    if args.baseline:
        report = evaluate(baseline_predictions(args.baseline, clips, cfg), clips, cfg)
        writer.write(report, f"{args.baseline}_baseline_report")
        print(format_report_table(report))
        return EXIT_OK

    reports = []
    for index, path in enumerate(args.checkpoint):
        params = read_checkpoint(path)
        report = evaluate(predict(params, clips, cfg.workers), clips, cfg)
        name = "eval_report" if len(args.checkpoint) == 1 else f"eval_report_{index}"
        writer.write(report, name)
        print(format_report_table(report))
        reports.append(report)
    if len(reports) > 1:
        summary = aggregate_reports(reports).summary()
        logger.info(f"Across checkpoints: {summary}")
        print(summary)
    return EXIT_OK


def cmd_baseline(args, cfg: RunConfig) -> int:
    clips = get_clips(args.data, cfg, held_out=True)
    out_dir = Path(args.out or Path(cfg.output_dir) / 'baseline')
    out_dir.mkdir(parents=True, exist_ok=True)
    predictions = baseline_predictions(args.kind, clips, cfg, triggers_dir=out_dir)
    report = evaluate(predictions, clips, cfg)
    ReportWriter(out_dir).write(report, f"{args.kind}_baseline_report")
    print(format_report_table(report))
    return EXIT_OK


def cmd_bench(args, cfg: RunConfig) -> int:
    presets = {
        'desk': ModelConfig.desk(horizon=cfg.horizon),
        'full': ModelConfig.full_scale(),
        'config': cfg.to_model_config(),
    }
    names = list(presets) if args.preset == 'all' else [args.preset]
    results = []
    for name in names:
        model_cfg = presets[name]
        params = init_params(model_cfg, cfg.seed)
        if params.num_scalars() != count_params(model_cfg):
            raise DomainError(f"{name}: parameter count mismatch")
        results.append(measure_throughput(params, model_cfg, cfg.bench_frames, cfg.bench_repeats, name, cfg.seed))
    path = write_bench_csv(results, Path(args.out or cfg.output_dir) / 'bench.csv')
    print(pd.read_csv(path).to_string(index=False))
    return EXIT_OK


def cmd_stream(args, cfg: RunConfig) -> int:
    params = read_checkpoint(args.checkpoint)
    if args.input_file:
        source = read_feature_file(args.input_file)
    else:
        source = sys.stdin
    stream_mode(params, cfg.trigger_threshold, source, sys.stdout)
    return EXIT_OK


def cmd_sweep_window(args, cfg: RunConfig) -> int:
    lens = cfg.window_len_list()
    if not lens:
        raise ConfigError('window_lens', "no window lengths to sweep")
    train_clips = get_clips(args.data, cfg, held_out=False)
    eval_clips = get_clips(args.eval_data, cfg, held_out=True)

    rows = []
    for window_len in lens:
        reports = []
        for seed in cfg.seed_list():
            params = train_one(cfg, train_clips, seed, window_len=window_len)
            reports.append(evaluate(predict(params, eval_clips, cfg.workers), eval_clips, cfg))
        summary = aggregate_reports(reports)
        logger.info(f"L={window_len}: {summary.summary()}")
        rows.append({
            'window_len': window_len,
            'avg_map': summary.avg_map_mean,
            'target_ap': summary.per_class_mean[int(ClassId.TARGET_SPEAKER)],
        })

    out_path = Path(args.out or cfg.output_dir) / 'sweep_L.csv'
    out_path.parent.mkdir(parents=True, exist_ok=True)
    table = pd.DataFrame(rows, columns=['window_len', 'avg_map', 'target_ap'])
    table.to_csv(out_path, index=False)
    logger.info(f"✅ Sweep written to {out_path}")
    print(table.to_string(index=False))
    return EXIT_OK


COMMANDS = {
    'synth': cmd_synth,
    'label': cmd_label,
    'train': cmd_train,
    'eval': cmd_eval,
    'baseline': cmd_baseline,
    'bench': cmd_bench,
    'stream': cmd_stream,
    'sweep-L': cmd_sweep_window,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='Streaming speech-initiation anticipation pipeline',
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        allow_abbrev=False,
        epilog='Any other --key value pair overrides the matching configuration key.'
    )
    sub = parser.add_subparsers(dest='command', required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        command = sub.add_parser(name, help=help_text, allow_abbrev=False)
        command.add_argument('--config', help='Flat key=value configuration file')
        command.add_argument('--out', help='Output directory (defaults under output_dir)')
        return command

    add('synth', 'Generate synthetic feature files and label tracks')

    label = add('label', 'Convert transcripts or VAD output into label tracks')
    label.add_argument('--input', required=True, help='Segment file or directory of JSONL files')
    label.add_argument('--smooth', action='store_true', help='Apply the 200 ms minimum-duration rule')
    label.add_argument('--vad', action='store_true', help='Inputs are VAD segments (speech -> OtherSpeaker)')

    train = add('train', 'Train the recurrent model')
    train.add_argument('--data', help='Directory of clips; synthesized when omitted')

    evaluate_cmd = add('eval', 'Evaluate checkpoints or a baseline')
    evaluate_cmd.add_argument('--checkpoint', nargs='+', help='Checkpoint file(s)')
    evaluate_cmd.add_argument('--baseline', choices=['random', 'silence'], help='Evaluate a baseline instead')
    evaluate_cmd.add_argument('--data', help='Directory of held-out clips; synthesized when omitted')

    baseline = add('baseline', 'Run a non-learned baseline')
    baseline.add_argument('--kind', choices=['random', 'silence'], required=True)
    baseline.add_argument('--data', help='Directory of clips; synthesized when omitted')

    bench = add('bench', 'Measure throughput and model size')
    bench.add_argument('--preset', choices=['desk', 'full', 'config', 'all'], default='desk')

    stream = add('stream', 'Score frames from stdin (or a feature file) as they arrive')
    stream.add_argument('--checkpoint', required=True)
    stream.add_argument('--input-file', help='Binary feature file to replay instead of stdin')

    sweep = add('sweep-L', 'Train and evaluate one model per window length')
    sweep.add_argument('--data', help='Training clips; synthesized when omitted')
    sweep.add_argument('--eval-data', help='Held-out clips; synthesized when omitted')

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    setup_logging()

    try:
        cfg = parse_config(args.config, parse_overrides(extra))
        logger.info(f"🚀 {args.command} with config {cfg.model_dump()}")
        return COMMANDS[args.command](args, cfg)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except (DomainError, OSError) as e:
        logger.error(f"❌ {args.command} failed: {e}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
