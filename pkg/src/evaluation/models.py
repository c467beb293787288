"""
Evaluation Models

AP matrices and their aggregates. Absent cells (no positives, or no pairs)
are NaN and are excluded from every mean.
"""

from dataclasses import dataclass, field
from typing import List

import numpy as np

from ..timebase import ClassId, DomainError

AP_VARIANTS = ('positives-rank', 'all-thresholds')

CLASS_NAMES = [class_id.name.lower() for class_id in ClassId]


def _nanmean_rows(matrix: np.ndarray, axis: int) -> np.ndarray:
    present = ~np.isnan(matrix)
    counts = present.sum(axis=axis)
    totals = np.where(present, matrix, 0.0).sum(axis=axis)
    with np.errstate(invalid='ignore', divide='ignore'):
        return np.where(counts > 0, totals / np.maximum(counts, 1), np.nan)


@dataclass
class EvalReport:
    """AP per (offset, class) with its aggregates.

    `ap[j - 1, k]` is the AP of class k at offset j frames ahead.
    """

    ap: np.ndarray
    frame_duration_s: float = 0.2
    variant: str = 'positives-rank'
    num_pairs: List[int] = field(default_factory=list)

    def __post_init__(self):
        ap = np.asarray(self.ap, dtype=np.float64)
        if ap.ndim != 2 or ap.shape[0] < 1 or ap.shape[1] != len(ClassId):
            raise DomainError(f"AP matrix must be [horizon, {len(ClassId)}], got {ap.shape}")
        present = ap[~np.isnan(ap)]
        if present.size and (present.min() < 0 or present.max() > 1):
            raise DomainError("AP values must lie in [0, 1]")
        if self.variant not in AP_VARIANTS:
            raise DomainError(f"unknown AP variant {self.variant!r}")
        self.ap = ap

    @property
    def horizon(self) -> int:
        return int(self.ap.shape[0])

    @property
    def offsets_s(self) -> List[float]:
        return [j * self.frame_duration_s for j in range(1, self.horizon + 1)]

    @property
    def column_labels(self) -> List[str]:
        return [f"{offset:.2f}s" for offset in self.offsets_s]

    @property
    def map_per_offset(self) -> np.ndarray:
        """Mean AP over present classes at each offset."""
        return _nanmean_rows(self.ap, axis=1)

    @property
    def avg_map(self) -> float:
        per_offset = self.map_per_offset
        present = per_offset[~np.isnan(per_offset)]
        return float(np.mean(present)) if present.size else float('nan')

    @property
    def per_class_avg(self) -> np.ndarray:
        """Mean AP over offsets for each class (e.g. the Target Speaker AP)."""
        return _nanmean_rows(self.ap, axis=0)

    @property
    def target_ap(self) -> float:
        return float(self.per_class_avg[int(ClassId.TARGET_SPEAKER)])

    @property
    def excluded_cells(self) -> int:
        return int(np.isnan(self.ap).sum())

    @property
    def excluded_per_offset(self) -> np.ndarray:
        return np.isnan(self.ap).sum(axis=1)

    @property
    def excluded_per_class(self) -> np.ndarray:
        return np.isnan(self.ap).sum(axis=0)

    def equals(self, other: 'EvalReport') -> bool:
        return (self.variant == other.variant
                and self.frame_duration_s == other.frame_duration_s
                and np.array_equal(self.ap, other.ap, equal_nan=True))


@dataclass
class AggregateReport:
    """Mean and standard error of a metric set across repeated runs."""

    num_runs: int
    avg_map_mean: float
    avg_map_se: float
    per_class_mean: np.ndarray
    per_class_se: np.ndarray

    def summary(self) -> str:
        target = int(ClassId.TARGET_SPEAKER)
        return (f"avg mAP {100 * self.avg_map_mean:.1f} ± {100 * self.avg_map_se:.1f}, "
                f"target AP {100 * self.per_class_mean[target]:.1f} ± {100 * self.per_class_se[target]:.1f} "
                f"over {self.num_runs} run(s)")
