"""
Prometheus метрики рантайма, бенчмарков и регрессионного набора.

Все метрики регистрируются в отдельном реестре REGISTRY: процессы
srrt короткоживущие, поэтому метрики сбрасываются в textfile
(для node_exporter) командой --metrics-out, а не отдаются по HTTP.
"""

import logging
from pathlib import Path
from typing import Optional, Union

from prometheus_client import CollectorRegistry, Counter, Gauge, Histogram, write_to_textfile

logger = logging.getLogger(__name__)

REGISTRY = CollectorRegistry()


class RuntimeMetrics:
    """Метрики планировщика процессов."""

    def __init__(self, registry: CollectorRegistry = REGISTRY):
        """Инициализация метрик рантайма."""
        self.switches = Counter(
            'srrt_runtime_context_switches_total',
            'Количество переключений контекстов',
            ['backend'],
            registry=registry
        )

        self.processes_spawned = Counter(
            'srrt_runtime_processes_spawned_total',
            'Количество созданных процессов',
            ['backend'],
            registry=registry
        )

        self.processes_reaped = Counter(
            'srrt_runtime_processes_reaped_total',
            'Количество убранных завершённых процессов',
            ['backend'],
            registry=registry
        )

        self.blocks = Counter(
            'srrt_runtime_blocks_total',
            'Количество блокировок процессов',
            ['backend'],
            registry=registry
        )

        # Живые процессы на момент возврата из run()
        self.live_processes = Gauge(
            'srrt_runtime_live_processes',
            'Живые процессы после остановки планировщика',
            ['backend'],
            registry=registry
        )

    def record_run(self, backend: str, live: int, switches: int, spawned: int, reaped: int, blocks: int):
        """
        Запись итогов одного запуска Runtime.run.

        Args:
            backend: fast или portable
            live: Число живых процессов после остановки
            switches, spawned, reaped, blocks: Приращения счётчиков с прошлой записи
        """
        self.switches.labels(backend=backend).inc(switches)
        self.processes_spawned.labels(backend=backend).inc(spawned)
        self.processes_reaped.labels(backend=backend).inc(reaped)
        self.blocks.labels(backend=backend).inc(blocks)
        self.live_processes.labels(backend=backend).set(live)


class BenchMetrics:
    """Метрики бенчмарков."""

    def __init__(self, registry: CollectorRegistry = REGISTRY):
        """Инициализация метрик бенчмарков."""
        self.per_op = Gauge(
            'srrt_bench_microseconds_per_op',
            'Медианное время операции в микросекундах',
            ['benchmark', 'backend'],
            registry=registry
        )

        # Результаты csloop
        self.switch_time = Histogram(
            'srrt_bench_csloop_microseconds_per_switch',
            'Время одного переключения по csloop',
            ['backend'],
            buckets=[0.05, 0.1, 0.2, 0.5, 1, 2, 5, 10, 50],
            registry=registry
        )

        self.calibration_warnings = Counter(
            'srrt_bench_calibration_warnings_total',
            'Замеры, оказавшиеся быстрее калибровочного цикла',
            ['benchmark'],
            registry=registry
        )

    def record_row(self, benchmark: str, backend: str, per_op_us: float):
        """Запись результата одной строки таблицы."""
        self.per_op.labels(benchmark=benchmark, backend=backend).set(per_op_us)

    def observe_switch(self, backend: str, per_switch_us: float):
        self.switch_time.labels(backend=backend).observe(per_switch_us)

    def record_calibration_warning(self, benchmark: str):
        self.calibration_warnings.labels(benchmark=benchmark).inc()


class SuiteMetrics:
    """Метрики регрессионного набора."""

    def __init__(self, registry: CollectorRegistry = REGISTRY):
        """Инициализация метрик набора."""
        self.cases = Counter(
            'srrt_vsuite_cases_total',
            'Прогнанные случаи набора',
            ['outcome'],  # outcome: pass, fail, xfail, xpass, timeout, error
            registry=registry
        )

        self.case_duration = Histogram(
            'srrt_vsuite_case_duration_seconds',
            'Время прогона одного случая',
            buckets=[0.1, 0.5, 1, 2, 5, 10, 30, 60],
            registry=registry
        )

    def record_case(self, outcome: str, seconds: float):
        """
        Запись прогнанного случая.

        Args:
            outcome: Исход (pass, fail, xfail, xpass, timeout, error)
            seconds: Время прогона
        """
        self.cases.labels(outcome=outcome).inc()
        self.case_duration.observe(seconds)


# Глобальные экземпляры метрик
_runtime_metrics: Optional[RuntimeMetrics] = None
_bench_metrics: Optional[BenchMetrics] = None
_suite_metrics: Optional[SuiteMetrics] = None


def get_runtime_metrics() -> RuntimeMetrics:
    """
    Получение глобального экземпляра метрик рантайма.

    Returns:
        RuntimeMetrics instance
    """
    global _runtime_metrics
    if _runtime_metrics is None:
        _runtime_metrics = RuntimeMetrics()
    return _runtime_metrics


def get_bench_metrics() -> BenchMetrics:
    """
    Получение глобального экземпляра метрик бенчмарков.

    Returns:
        BenchMetrics instance
    """
    global _bench_metrics
    if _bench_metrics is None:
        _bench_metrics = BenchMetrics()
    return _bench_metrics


def get_suite_metrics() -> SuiteMetrics:
    global _suite_metrics
    if _suite_metrics is None:
        _suite_metrics = SuiteMetrics()
    return _suite_metrics


def dump_metrics(path: Union[str, Path]) -> bool:
    """
    Запись всех метрик в файл формата textfile.

    Args:
        path: Путь к .prom файлу

    Returns:
        True при успешной записи
    """
    try:
        write_to_textfile(str(path), REGISTRY)
        logger.info(f"✅ Метрики записаны в {path}")
        return True
    except OSError as e:
        logger.error(f"❌ Не удалось записать метрики в {path}: {e}")
        return False
