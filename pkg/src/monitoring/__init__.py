"""
Модуль мониторинга и метрик для Prometheus.
"""

from .prometheus import (
    REGISTRY,
    BenchMetrics,
    RuntimeMetrics,
    SuiteMetrics,
    dump_metrics,
    get_bench_metrics,
    get_runtime_metrics,
    get_suite_metrics
)

__all__ = [
    "REGISTRY",
    "BenchMetrics",
    "RuntimeMetrics",
    "SuiteMetrics",
    "dump_metrics",
    "get_bench_metrics",
    "get_runtime_metrics",
    "get_suite_metrics"
]
