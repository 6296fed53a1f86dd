"""
Бенчмарки рантайма: калибровка, замеры, таблица производительности.
"""

from .benchmarks import BENCHMARKS
from .calibration import calibrate_loop
from .exceptions import (
    BenchmarkError,
    ClockUnavailableError,
    EmptyTableError,
    TableParseError,
    UnknownBenchmarkError
)
from .models import (
    BENCHMARK_IDS,
    SWITCH_BOUND_IDS,
    SWITCH_FREE_IDS,
    BenchConfig,
    PropertyResult,
    TimingRow,
    TimingTable,
    median_of
)
from .report import MACHINE_FORMAT, TEXT_FORMAT, normalize_format, parse_table, render_table
from .suite import check_properties, describe_environment, measure, run_suite

__all__ = [
    "BENCHMARKS",
    "calibrate_loop",
    "BenchmarkError",
    "ClockUnavailableError",
    "EmptyTableError",
    "TableParseError",
    "UnknownBenchmarkError",
    "BENCHMARK_IDS",
    "SWITCH_BOUND_IDS",
    "SWITCH_FREE_IDS",
    "BenchConfig",
    "PropertyResult",
    "TimingRow",
    "TimingTable",
    "median_of",
    "MACHINE_FORMAT",
    "TEXT_FORMAT",
    "normalize_format",
    "parse_table",
    "render_table",
    "check_properties",
    "describe_environment",
    "measure",
    "run_suite",
]
