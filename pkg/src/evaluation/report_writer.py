"""
Report Writer Module
Writes evaluation reports as a JSON table, a CSV matrix and a text table.
"""

import json
import logging
import math
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np
import pandas as pd

from ..timebase import DomainError
from .models import CLASS_NAMES, EvalReport

logger = logging.getLogger(__name__)

AVG_COLUMN = "Avg"
MAP_ROW = "mAP"


def _cell(value: float) -> Optional[float]:
    return None if math.isnan(value) else float(value)


def report_to_dict(report: EvalReport) -> Dict:
    """Rows are classes plus mAP; columns are offsets (0.20s ...) plus Avg."""
    columns = report.column_labels + [AVG_COLUMN]
    rows = {}
    per_class = report.per_class_avg
    for k, name in enumerate(CLASS_NAMES):
        values = list(report.ap[:, k]) + [per_class[k]]
        rows[name] = {column: _cell(value) for column, value in zip(columns, values)}
    values = list(report.map_per_offset) + [report.avg_map]
    rows[MAP_ROW] = {column: _cell(value) for column, value in zip(columns, values)}

    return {
        'variant': report.variant,
        'frame_duration_s': report.frame_duration_s,
        'columns': columns,
        'rows': rows,
        'excluded_cells': report.excluded_cells,
        'excluded_per_offset': [int(n) for n in report.excluded_per_offset],
        'num_pairs': list(report.num_pairs),
    }


def report_to_frame(report: EvalReport) -> pd.DataFrame:
    """Long-form matrix with columns offset_s, class, ap."""
    records = []
    for j, offset in enumerate(report.offsets_s):
        for k, name in enumerate(CLASS_NAMES):
            records.append((round(offset, 6), name, report.ap[j, k]))
    return pd.DataFrame(records, columns=['offset_s', 'class', 'ap'])


def format_report_table(report: EvalReport) -> str:
    """Fixed-width table of AP x 100, one row per class plus mAP."""
    columns = report.column_labels + [AVG_COLUMN]
    name_width = max(len(name) for name in CLASS_NAMES + [MAP_ROW]) + 2
    table = report_to_dict(report)

    lines = [f"Per-frame AP ({report.variant})", "=" * 50]
    lines.append("".ljust(name_width) + "".join(column.rjust(8) for column in columns))
    for name, row in table['rows'].items():
        cells = ["-" if row[column] is None else f"{100 * row[column]:.1f}" for column in columns]
        lines.append(name.ljust(name_width) + "".join(cell.rjust(8) for cell in cells))
    if report.excluded_cells:
        lines.append(f"{report.excluded_cells} cell(s) absent and excluded from averages")
    return "\n".join(lines) + "\n"


class ReportWriter:
    """Writes report artifacts into one output directory."""

    def __init__(self, outputs_dir: Union[str, Path] = "outputs"):
        self.outputs_dir = Path(outputs_dir)
        self.outputs_dir.mkdir(parents=True, exist_ok=True)

    def write(self, report: EvalReport, name: str = "eval_report") -> Dict[str, Path]:
        """Write `<name>.json`, `<name>.csv` and `<name>.txt`.

        Returns:
            Dict[str, Path]: Written paths keyed by format
        """
        base = self.outputs_dir / name
        paths = {
            'json': base.with_suffix('.json'),
            'csv': base.with_suffix('.csv'),
            'txt': base.with_suffix('.txt'),
        }
        try:
            with open(paths['json'], 'w') as f:
                json.dump(report_to_dict(report), f, indent=2)
            report_to_frame(report).to_csv(paths['csv'], index=False)
            paths['txt'].write_text(format_report_table(report))
        except OSError as e:
            logger.error(f"Error writing report {base}: {e}")
            raise

        logger.info(f"Report written to {paths['json']} (avg mAP {report.avg_map:.4f})")
        return paths


def write_report(report: EvalReport, path: Union[str, Path]) -> Dict[str, Path]:
    """Write a report next to `path`; the suffix of `path` is ignored."""
    path = Path(path)
    return ReportWriter(path.parent).write(report, path.stem)


def read_report(path: Union[str, Path]) -> EvalReport:
    """Read back a JSON report written by write_report.

    Raises:
        FileNotFoundError: If the file does not exist
        DomainError: If the document lacks the expected rows or columns
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Report not found: {path}")
    with open(path) as f:
        document = json.load(f)

    try:
        offsets = [column for column in document['columns'] if column != AVG_COLUMN]
        ap = np.array([
            [np.nan if document['rows'][name][column] is None else document['rows'][name][column]
             for name in CLASS_NAMES]
            for column in offsets
        ], dtype=np.float64)
        return EvalReport(ap, document['frame_duration_s'], document['variant'], document.get('num_pairs', []))
    except KeyError as e:
        raise DomainError(f"report {path} is missing {e}") from e
