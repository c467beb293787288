"""
Evaluation Package
Per-frame anticipatory average precision, per class and per future offset.
"""

from .models import EvalReport, AggregateReport, AP_VARIANTS
from .core import average_precision, evaluate_stream, evaluate_streams, aggregate_reports, Evaluator
from .report_writer import ReportWriter, write_report, read_report, format_report_table

__all__ = [
    'EvalReport',
    'AggregateReport',
    'AP_VARIANTS',
    'average_precision',
    'evaluate_stream',
    'evaluate_streams',
    'aggregate_reports',
    'Evaluator',
    'ReportWriter',
    'write_report',
    'read_report',
    'format_report_table',
]
