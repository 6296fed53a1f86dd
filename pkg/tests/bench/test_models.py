"""
Тесты для моделей бенчмарков.
"""

import pytest
from pydantic import ValidationError

from src.bench import (
    BENCHMARK_IDS,
    SWITCH_BOUND_IDS,
    SWITCH_FREE_IDS,
    BenchConfig,
    TimingRow,
    TimingTable,
    median_of
)
from src.ctxswitch import BackendKind


def test_benchmark_ids_order():
    """Двенадцать строк, первая: накладные расходы цикла."""
    assert len(BENCHMARK_IDS) == 12
    assert BENCHMARK_IDS[0] == "loop control overhead"
    assert BENCHMARK_IDS[-1] == "rendezvous"
    assert set(SWITCH_FREE_IDS) | set(SWITCH_BOUND_IDS) == set(BENCHMARK_IDS)
    assert not set(SWITCH_FREE_IDS) & set(SWITCH_BOUND_IDS)


def test_median_of():
    """Медиана нечётного числа замеров."""
    assert median_of([3.0, 1.0, 2.0]) == 2.0


def test_bench_config_defaults():
    """Конфигурация по умолчанию валидна и содержит оба backend."""
    cfg = BenchConfig()

    assert cfg.trials % 2 == 1
    assert cfg.ordered_backends == [BackendKind.FAST, BackendKind.PORTABLE]


def test_bench_config_even_trials():
    """Чётное число замеров запрещено."""
    with pytest.raises(ValidationError):
        BenchConfig(trials=4)


def test_bench_config_too_few_iterations():
    """Меньше 1000 операций в замере запрещено."""
    with pytest.raises(ValidationError):
        BenchConfig(iterations_per_trial=999)


def test_iterations_for_spawn_heavy():
    """Строки с созданием процессов используют свой счётчик итераций."""
    cfg = BenchConfig(iterations_per_trial=100000, spawn_iterations=2000)

    assert cfg.iterations_for("process create/destroy") == 2000
    assert cfg.iterations_for("interresource call, new process") == 2000
    assert cfg.iterations_for("semaphore pair") == 100000


def test_timing_row_median_subtracts_calibration():
    """median_us: медиана замеров за вычетом калибровки."""
    row = TimingRow(
        benchmark_id="semaphore pair",
        backend=BackendKind.FAST,
        median_us=1.5,
        trials_us=[2.0, 1.0, 3.0],
        calibration_us=0.5
    )

    assert row.median_us == 1.5


def test_timing_row_median_clamped_at_zero():
    """Калибровка больше медианы: медиана обрезается до нуля."""
    row = TimingRow(
        benchmark_id="semaphore V only",
        backend=BackendKind.FAST,
        median_us=0.0,
        trials_us=[0.01],
        calibration_us=0.05
    )

    assert row.median_us == 0.0


def test_timing_row_wrong_median():
    """Несогласованная медиана отклоняется."""
    with pytest.raises(ValidationError):
        TimingRow(
            benchmark_id="semaphore pair",
            backend=BackendKind.FAST,
            median_us=9.0,
            trials_us=[1.0, 2.0, 3.0]
        )


def test_timing_row_unknown_id():
    """Строка не из таблицы отклоняется."""
    with pytest.raises(ValidationError):
        TimingRow(benchmark_id="quantum teleport", backend=BackendKind.FAST, median_us=1.0, trials_us=[1.0])


def test_timing_table_duplicate_rows():
    """Пара (бенчмарк, backend) встречается в таблице не больше одного раза."""
    row = TimingRow(benchmark_id="rendezvous", backend=BackendKind.FAST, median_us=1.0, trials_us=[1.0])

    with pytest.raises(ValidationError):
        TimingTable(rows=[row, row])


def test_timing_table_get_and_backends():
    """Поиск строки и перечень backend в порядке fast, portable."""
    rows = [
        TimingRow(benchmark_id="rendezvous", backend=BackendKind.PORTABLE, median_us=2.0, trials_us=[2.0]),
        TimingRow(benchmark_id="rendezvous", backend=BackendKind.FAST, median_us=1.0, trials_us=[1.0]),
    ]
    table = TimingTable(rows=rows)

    assert table.get("rendezvous", BackendKind.FAST).median_us == 1.0
    assert table.get("semaphore pair", BackendKind.FAST) is None
    assert table.backends == [BackendKind.FAST, BackendKind.PORTABLE]
