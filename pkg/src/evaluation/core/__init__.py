"""
Evaluation Core Package
"""

from .average_precision import average_precision
from .evaluator import Evaluator, evaluate_stream, evaluate_streams, aggregate_reports

__all__ = ['average_precision', 'Evaluator', 'evaluate_stream', 'evaluate_streams', 'aggregate_reports']
