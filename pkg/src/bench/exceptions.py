"""
Исключения для модуля бенчмарков.
"""


class BenchmarkError(Exception):
    """Базовая ошибка замеров."""
    pass


class UnknownBenchmarkError(BenchmarkError, KeyError):
    """Идентификатор бенчмарка не входит в таблицу."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class ClockUnavailableError(BenchmarkError):
    """Нет монотонных часов высокого разрешения."""
    pass


class EmptyTableError(BenchmarkError, ValueError):
    """Таблица замеров пуста."""
    pass


class TableParseError(BenchmarkError, ValueError):
    """Машиночитаемая таблица не разбирается."""
    pass
