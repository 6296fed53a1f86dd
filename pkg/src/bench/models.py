"""
Модели данных для бенчмарков рантайма.
"""

import math
import statistics
from datetime import datetime, timezone
from typing import List, Set

from pydantic import BaseModel, Field, field_validator, model_validator

from src.common.config import RuntimeSettings
from src.ctxswitch import BackendKind

# Порядок строк таблицы фиксирован и совпадает с порядком прогона
LOOP_OVERHEAD = "loop control overhead"
BENCHMARK_IDS: List[str] = [
    LOOP_OVERHEAD,
    "local call, optimised",
    "interresource call, no new process",
    "interresource call, new process",
    "process create/destroy",
    "semaphore P only",
    "semaphore V only",
    "semaphore pair",
    "semaphore requiring context switch",
    "asynchronous send/receive",
    "message passing requiring context switch",
    "rendezvous",
]

# Строки без переключений: одинаковы для обоих backend
SWITCH_FREE_IDS: List[str] = [
    LOOP_OVERHEAD,
    "local call, optimised",
    "semaphore P only",
    "semaphore V only",
    "semaphore pair",
    "asynchronous send/receive",
    "interresource call, no new process",
]

SWITCH_BOUND_IDS: List[str] = [
    "process create/destroy",
    "semaphore requiring context switch",
    "message passing requiring context switch",
    "rendezvous",
    "interresource call, new process",
]

# Строки, где каждая итерация создаёт процесс
SPAWN_HEAVY_IDS: Set[str] = {"process create/destroy", "interresource call, new process"}

BACKEND_ORDER: List[BackendKind] = [BackendKind.FAST, BackendKind.PORTABLE]


class BenchConfig(BaseModel):
    """Параметры прогона таблицы."""
    iterations_per_trial: int = Field(
        default_factory=lambda: RuntimeSettings.BENCH_ITERATIONS,
        ge=1000,
        description="Операций в одном замере"
    )
    spawn_iterations: int = Field(
        default_factory=lambda: RuntimeSettings.BENCH_SPAWN_ITERATIONS,
        ge=1000,
        description="Операций в замере для строк с созданием процессов"
    )
    trials: int = Field(
        default_factory=lambda: RuntimeSettings.BENCH_TRIALS,
        ge=1,
        description="Число замеров (нечётное)"
    )
    warmup_trials: int = Field(
        default_factory=lambda: RuntimeSettings.BENCH_WARMUP,
        ge=0,
        description="Прогревочные замеры, не попадающие в таблицу"
    )
    backends: Set[BackendKind] = Field(
        default_factory=lambda: set(BACKEND_ORDER),
        min_length=1,
        description="Измеряемые реализации переключения"
    )

    @field_validator('trials')
    @classmethod
    def validate_trials(cls, v: int) -> int:
        """Медиана без интерполяции требует нечётного числа замеров."""
        if v % 2 == 0:
            raise ValueError(f"trials должно быть нечётным: {v}")
        return v

    def iterations_for(self, benchmark_id: str) -> int:
        if benchmark_id in SPAWN_HEAVY_IDS:
            return self.spawn_iterations
        return self.iterations_per_trial

    @property
    def ordered_backends(self) -> List[BackendKind]:
        return [kind for kind in BACKEND_ORDER if kind in self.backends]


def median_of(values: List[float]) -> float:
    """Медиана списка замеров."""
    return statistics.median(values)


class TimingRow(BaseModel):
    """Одна строка таблицы: бенчмарк на одном backend."""
    benchmark_id: str = Field(..., description="Название строки таблицы")
    backend: BackendKind
    median_us: float = Field(..., ge=0, description="Медиана за вычетом калибровки, мкс/операцию")
    trials_us: List[float] = Field(..., min_length=1, description="Сырые замеры, мкс/операцию")
    calibration_us: float = Field(0.0, ge=0, description="Вычтенная стоимость итерации цикла")

    @field_validator('benchmark_id')
    @classmethod
    def validate_benchmark_id(cls, v: str) -> str:
        if v not in BENCHMARK_IDS:
            raise ValueError(f"Неизвестный бенчмарк: {v}")
        return v

    @model_validator(mode='after')
    def check_median(self) -> 'TimingRow':
        expected = max(0.0, median_of(self.trials_us) - self.calibration_us)
        if not math.isclose(self.median_us, expected, rel_tol=1e-9, abs_tol=1e-9):
            raise ValueError(
                f"median_us={self.median_us} не равна медиане замеров за вычетом калибровки ({expected})"
            )
        return self


class TimingTable(BaseModel):
    """Таблица производительности рантайма."""
    environment: str = Field("", description="Описание машины и интерпретатора")
    timestamp: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
    rows: List[TimingRow] = Field(default_factory=list)

    @model_validator(mode='after')
    def check_unique_rows(self) -> 'TimingTable':
        seen = set()
        for row in self.rows:
            key = (row.benchmark_id, row.backend)
            if key in seen:
                raise ValueError(f"Повторная строка {row.benchmark_id} / {row.backend.value}")
            seen.add(key)
        return self

    def get(self, benchmark_id: str, backend: BackendKind):
        """Строка по паре (бенчмарк, backend) или None."""
        for row in self.rows:
            if row.benchmark_id == benchmark_id and row.backend == backend:
                return row
        return None

    @property
    def backends(self) -> List[BackendKind]:
        present = {row.backend for row in self.rows}
        return [kind for kind in BACKEND_ORDER if kind in present]


class PropertyResult(BaseModel):
    """Результат проверки одного свойства таблицы."""
    name: str = Field(..., description="invariance, switch_sensitivity или ordering")
    subject: str = Field(..., description="Строка таблицы или backend")
    observed: float
    threshold: float
    passed: bool
