"""
Вывод таблицы в текстовом и машиночитаемом (JSON) виде.
"""

from typing import Union

from jinja2 import Environment, StrictUndefined
from pydantic import ValidationError

from .exceptions import EmptyTableError, TableParseError
from .models import BENCHMARK_IDS, TimingTable

TEXT_FORMAT = "text"
MACHINE_FORMAT = "machine-readable"
# Короткий синоним для командной строки
FORMAT_ALIASES = {"json": MACHINE_FORMAT}

NAME_WIDTH = 42
COLUMN_WIDTH = 14

_TEXT_TEMPLATE = """\
Run time system performance (median of {{ trials }} trials)
environment: {{ environment }}
timestamp: {{ timestamp }}

{{ "benchmark" | fmt(name_width, left=True) }}{% for backend in backends %}{{ backend | fmt(column_width) }}{% endfor %}
{{ "-" * (name_width + column_width * backends | length) }}
{% for line in lines -%}
{{ line.name | fmt(name_width, left=True) }}{% for value in line.cells %}{{ value | us(column_width) }}{% endfor %}
{% endfor %}"""


def _fmt(value: str, width: int, left: bool = False) -> str:
    return value.ljust(width) if left else value.rjust(width)


def _us(value, width: int) -> str:
    if value is None:
        return "-".rjust(width)
    return f"{value:.3f} µs".rjust(width)


_env = Environment(undefined=StrictUndefined, keep_trailing_newline=True)
_env.filters["fmt"] = _fmt
_env.filters["us"] = _us
_text_template = _env.from_string(_TEXT_TEMPLATE)


def normalize_format(fmt: str) -> str:
    """Приведение синонимов к text / machine-readable."""
    fmt = FORMAT_ALIASES.get(fmt, fmt)
    if fmt not in (TEXT_FORMAT, MACHINE_FORMAT):
        raise ValueError(f"Неизвестный формат таблицы: {fmt}")
    return fmt


def render_table(table: TimingTable, fmt: str = TEXT_FORMAT) -> bytes:
    """
    Вывод таблицы.

    text повторяет раскладку исходной таблицы: строка на бенчмарк,
    колонка на backend. machine-readable выдаёт JSON со стабильными полями
    environment, timestamp, rows[benchmark_id, backend, median_us,
    trials_us, calibration_us].

    Raises:
        EmptyTableError: В таблице нет строк
    """
    if not table.rows:
        raise EmptyTableError("Нельзя вывести пустую таблицу")
    fmt = normalize_format(fmt)

    if fmt == MACHINE_FORMAT:
        return table.model_dump_json(indent=2).encode("utf-8") + b"\n"

    backends = table.backends
    lines = []
    for benchmark_id in BENCHMARK_IDS:
        values = [table.get(benchmark_id, backend) for backend in backends]
        if all(row is None for row in values):
            continue
        lines.append({
            "name": benchmark_id,
            "cells": [row.median_us if row is not None else None for row in values],
        })

    text = _text_template.render(
        trials=len(table.rows[0].trials_us),
        environment=table.environment or "unknown",
        timestamp=table.timestamp.isoformat(),
        backends=[backend.value for backend in backends],
        lines=lines,
        name_width=NAME_WIDTH,
        column_width=COLUMN_WIDTH,
    )
    return text.encode("utf-8")


def parse_table(data: Union[bytes, str]) -> TimingTable:
    """
    Разбор машиночитаемого вывода render_table.

    Raises:
        TableParseError: Данные не являются таблицей
        EmptyTableError: Таблица пуста
    """
    try:
        table = TimingTable.model_validate_json(data)
    except ValidationError as e:
        raise TableParseError(f"Не удалось разобрать таблицу: {e}") from e
    if not table.rows:
        raise EmptyTableError("Таблица не содержит строк")
    return table
