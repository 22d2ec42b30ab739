from .bench import BenchCell, BenchConfig, BenchError, BenchReport, read_report, run_benchmark, write_report
from .datagen import GenSpec, generate, points_for_size
from .pointsio import format_points, parse_points, read_points, write_points

__all__ = [
    "BenchCell", "BenchConfig", "BenchError", "BenchReport", "GenSpec",
    "format_points", "generate", "parse_points", "points_for_size",
    "read_points", "read_report", "run_benchmark", "write_points", "write_report",
]
