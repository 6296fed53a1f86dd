"""
Прогон таблицы: замеры, медианы, проверка свойств.
"""

import logging
import platform
from datetime import datetime, timezone
from typing import List, Optional

import greenlet

from src.ctxswitch import BackendKind
from .benchmarks import BENCHMARKS
from .calibration import calibrate_loop, require_monotonic_clock
from .exceptions import EmptyTableError, UnknownBenchmarkError
from .models import (
    BENCHMARK_IDS,
    LOOP_OVERHEAD,
    SWITCH_BOUND_IDS,
    SWITCH_FREE_IDS,
    BenchConfig,
    PropertyResult,
    TimingRow,
    TimingTable,
    median_of
)

logger = logging.getLogger(__name__)

# Импорт метрик (ленивая инициализация)
try:
    from src.monitoring import get_bench_metrics
    METRICS_AVAILABLE = True
except ImportError:
    METRICS_AVAILABLE = False

INVARIANCE_TOLERANCE = 0.25
SWITCH_RATIO_THRESHOLD = 1.5
ORDERING_CHAIN = ["semaphore pair", "asynchronous send/receive", "rendezvous"]


def describe_environment() -> str:
    """Описание машины для шапки таблицы."""
    return (
        f"{platform.platform()}; {platform.machine() or 'unknown'}; "
        f"{platform.python_implementation()} {platform.python_version()}; "
        f"greenlet {greenlet.__version__}"
    )


def measure(
    benchmark_id: str,
    backend: BackendKind,
    cfg: BenchConfig,
    calibration_us: Optional[float] = None
) -> TimingRow:
    """
    Замер одной строки таблицы на одном backend.

    Args:
        benchmark_id: Название строки
        backend: Реализация переключения
        cfg: Параметры прогона
        calibration_us: Стоимость итерации цикла (если None, калибруется заново)

    Returns:
        TimingRow со всеми замерами и медианой

    Raises:
        UnknownBenchmarkError: Неизвестная строка
    """
    body = BENCHMARKS.get(benchmark_id)
    if body is None:
        raise UnknownBenchmarkError(f"Неизвестный бенчмарк: {benchmark_id}")
    require_monotonic_clock()

    kind = BackendKind(backend)
    iterations = cfg.iterations_for(benchmark_id)
    if calibration_us is None:
        calibration_us = calibrate_loop(cfg)

    for _ in range(cfg.warmup_trials):
        body(kind, iterations)

    trials_us = [body(kind, iterations) * 1e6 / iterations for _ in range(cfg.trials)]

    # Строка калибровки сама из себя не вычитается
    subtract = 0.0 if benchmark_id == LOOP_OVERHEAD else calibration_us
    median_us = max(0.0, median_of(trials_us) - subtract)

    if subtract and sum(trials_us) / len(trials_us) <= subtract:
        logger.warning(
            f"⚠️ {benchmark_id} ({kind.value}): среднее замеров не превышает калибровку "
            f"{subtract:.5f} мкс"
        )
        if METRICS_AVAILABLE:
            get_bench_metrics().record_calibration_warning(benchmark_id)

    row = TimingRow(
        benchmark_id=benchmark_id,
        backend=kind,
        median_us=median_us,
        trials_us=trials_us,
        calibration_us=subtract
    )
    if METRICS_AVAILABLE:
        get_bench_metrics().record_row(benchmark_id, kind.value, median_us)
    logger.info(f"{benchmark_id:<42} {kind.value:<8} {median_us:10.4f} мкс")
    return row


def run_suite(cfg: BenchConfig) -> TimingTable:
    """
    Прогон всех строк для всех запрошенных backend.

    Порядок: строки в порядке BENCHMARK_IDS, внутри строки fast, затем portable.
    """
    calibration_us = calibrate_loop(cfg)
    rows = [
        measure(benchmark_id, backend, cfg, calibration_us)
        for benchmark_id in BENCHMARK_IDS
        for backend in cfg.ordered_backends
    ]
    table = TimingTable(
        environment=describe_environment(),
        timestamp=datetime.now(timezone.utc),
        rows=rows
    )
    logger.info(f"✅ Таблица готова: {len(rows)} строк")
    return table


def _relative_difference(a: float, b: float) -> float:
    reference = max(a, b)
    if reference == 0:
        return 0.0
    return abs(a - b) / reference


def check_properties(
    table: TimingTable,
    invariance_tolerance: float = INVARIANCE_TOLERANCE,
    switch_ratio: float = SWITCH_RATIO_THRESHOLD
) -> List[PropertyResult]:
    """
    Проверка свойств таблицы.

    - invariance: строки без переключений совпадают на обоих backend
      с относительной разницей не больше invariance_tolerance;
    - switch_sensitivity: строки с переключениями на portable медленнее
      fast больше чем в switch_ratio раз;
    - ordering: semaphore pair < asynchronous send/receive < rendezvous
      на каждом backend.

    Свойства, для которых в таблице нет данных, пропускаются.

    Raises:
        EmptyTableError: Пустая таблица
    """
    if not table.rows:
        raise EmptyTableError("Таблица замеров пуста")

    results: List[PropertyResult] = []
    fast, portable = BackendKind.FAST, BackendKind.PORTABLE

    for benchmark_id in SWITCH_FREE_IDS:
        a, b = table.get(benchmark_id, fast), table.get(benchmark_id, portable)
        if a is None or b is None:
            continue
        observed = _relative_difference(a.median_us, b.median_us)
        results.append(PropertyResult(
            name="invariance",
            subject=benchmark_id,
            observed=observed,
            threshold=invariance_tolerance,
            passed=observed <= invariance_tolerance
        ))

    for benchmark_id in SWITCH_BOUND_IDS:
        a, b = table.get(benchmark_id, fast), table.get(benchmark_id, portable)
        if a is None or b is None:
            continue
        observed = b.median_us / a.median_us if a.median_us > 0 else float("inf")
        results.append(PropertyResult(
            name="switch_sensitivity",
            subject=benchmark_id,
            observed=observed,
            threshold=switch_ratio,
            passed=observed > switch_ratio
        ))

    for backend in table.backends:
        chain = [table.get(benchmark_id, backend) for benchmark_id in ORDERING_CHAIN]
        if any(row is None for row in chain):
            continue
        values = [row.median_us for row in chain]
        # Наименьшее из отношений соседей: > 1 означает строгий порядок
        ratios = [
            later / earlier if earlier > 0 else (float("inf") if later > 0 else 1.0)
            for earlier, later in zip(values, values[1:])
        ]
        observed = min(ratios)
        results.append(PropertyResult(
            name="ordering",
            subject=f"{backend.value}: " + " < ".join(ORDERING_CHAIN),
            observed=observed,
            threshold=1.0,
            passed=observed > 1.0
        ))

    for result in results:
        if not result.passed:
            logger.warning(
                f"⚠️ Свойство {result.name} не выполнено для {result.subject}: "
                f"{result.observed:.3f} (порог {result.threshold})"
            )
    return results
