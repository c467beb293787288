"""
Bench Package
Parameter counts, analytic FLOPs and measured streaming throughput.
"""

from .runtime import BenchResult, count_params, flops_per_frame, measure_throughput, write_bench_csv

__all__ = ['BenchResult', 'count_params', 'flops_per_frame', 'measure_throughput', 'write_bench_csv']
