"""
Evaluator Module
Scores per-frame [horizon x 3] predictions against a label track.

For offset j the prediction made at frame t is paired with the label at
t + j; pairs with t + j >= T are dropped.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence, Tuple

import numpy as np

from ...timebase import DomainError, LabelTrack
from ...timebase.models import NUM_CLASSES
from ..models import AggregateReport, EvalReport
from .average_precision import average_precision

logger = logging.getLogger(__name__)

Pair = Tuple[np.ndarray, LabelTrack]


class Evaluator:
    """Computes AP cells over one or more clips.

    Cells are independent; with max_workers > 1 they are computed on a
    thread pool and merged back in (offset, class) order.
    """

    def __init__(self, variant: str = 'positives-rank', max_workers: int = 1):
        self.variant = variant
        self.max_workers = max_workers

    @staticmethod
    def _validate(pairs: Sequence[Pair]) -> int:
        if not pairs:
            raise DomainError("evaluation needs at least one clip")
        horizons = set()
        clocks = set()
        for pred, gt in pairs:
            pred = np.asarray(pred)
            if pred.ndim != 3 or pred.shape[2] != NUM_CLASSES:
                raise DomainError(f"predictions must be [T, horizon, {NUM_CLASSES}], got {pred.shape}")
            if pred.shape[1] == 0:
                raise DomainError("horizon must be >= 1")
            if pred.shape[0] != len(gt):
                raise DomainError(f"prediction length {pred.shape[0]} differs from label length {len(gt)}")
            horizons.add(pred.shape[1])
            clocks.add(gt.clock)
        if len(horizons) != 1:
            raise DomainError(f"clips disagree on horizon: {sorted(horizons)}")
        if len(clocks) != 1:
            raise DomainError("clips disagree on frame rate")
        return horizons.pop()

    @staticmethod
    def _cell_inputs(pairs: Sequence[Pair], offset: int, class_id: int) -> Tuple[np.ndarray, np.ndarray]:
        scores, positives = [], []
        for pred, gt in pairs:
            usable = len(gt) - offset
            if usable <= 0:
                continue
            scores.append(np.asarray(pred, dtype=np.float64)[:usable, offset - 1, class_id])
            positives.append(gt.labels[offset:] == class_id)
        if not scores:
            return np.empty(0), np.empty(0, dtype=bool)
        return np.concatenate(scores), np.concatenate(positives)

    def _cell(self, pairs: Sequence[Pair], offset: int, class_id: int) -> Tuple[float, int]:
        scores, positives = self._cell_inputs(pairs, offset, class_id)
        if scores.shape[0] == 0:
            return float('nan'), 0
        return average_precision(scores, positives, self.variant), int(scores.shape[0])

    def evaluate(self, pairs: Sequence[Pair]) -> EvalReport:
        """Pool (score, label) pairs across clips and compute every AP cell.

        Raises:
            DomainError: On shape or length mismatches, or a zero horizon
        """
        horizon = self._validate(pairs)
        cells = [(j, k) for j in range(1, horizon + 1) for k in range(NUM_CLASSES)]

        if self.max_workers > 1:
            with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
                results = list(executor.map(lambda cell: self._cell(pairs, *cell), cells))
        else:
            results = [self._cell(pairs, j, k) for j, k in cells]

        ap = np.array([value for value, _ in results]).reshape(horizon, NUM_CLASSES)
        num_pairs = [results[(j - 1) * NUM_CLASSES][1] for j in range(1, horizon + 1)]
        report = EvalReport(ap, pairs[0][1].clock.frame_duration_s, self.variant, num_pairs)

        if report.excluded_cells:
            logger.info(f"{report.excluded_cells} AP cell(s) absent (no positives or no pairs)")
        logger.info(f"Evaluated {len(pairs)} clip(s): avg mAP {report.avg_map:.4f}")
        return report


def evaluate_streams(pairs: Sequence[Pair], variant: str = 'positives-rank', max_workers: int = 1) -> EvalReport:
    """Dataset-level report over several (predictions, labels) clips."""
    return Evaluator(variant, max_workers).evaluate(list(pairs))


def evaluate_stream(pred: np.ndarray, gt: LabelTrack, variant: str = 'positives-rank') -> EvalReport:
    """Report for a single clip."""
    return Evaluator(variant).evaluate([(pred, gt)])


def _mean_se(values: np.ndarray) -> Tuple[float, float]:
    values = values[~np.isnan(values)]
    if values.size == 0:
        return float('nan'), float('nan')
    if values.size == 1:
        return float(values[0]), 0.0
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(values.size))


def aggregate_reports(reports: Sequence[EvalReport]) -> AggregateReport:
    """Mean and standard error of avg mAP and per-class AP across runs."""
    if not reports:
        raise DomainError("nothing to aggregate")
    avg_mean, avg_se = _mean_se(np.array([report.avg_map for report in reports]))
    per_class = np.stack([report.per_class_avg for report in reports])
    stats = [_mean_se(per_class[:, k]) for k in range(per_class.shape[1])]
    return AggregateReport(
        num_runs=len(reports),
        avg_map_mean=avg_mean,
        avg_map_se=avg_se,
        per_class_mean=np.array([mean for mean, _ in stats]),
        per_class_se=np.array([se for _, se in stats]),
    )

