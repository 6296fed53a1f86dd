"""
Утилиты для настройки логирования.
"""

import logging
import sys
from pathlib import Path

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def get_log_path(filename: str) -> Path:
    """
    Возвращает путь к файлу лога в директории logs.

    Args:
        filename: Имя файла лога (например, srrt.log)

    Returns:
        Абсолютный путь к файлу лога
    """
    project_root = Path(__file__).resolve().parents[2]
    logs_dir = project_root / "logs"
    logs_dir.mkdir(parents=True, exist_ok=True)
    return logs_dir / filename


def setup_logging(level: str = "INFO", filename: str = "srrt.log"):
    """
    Настройка логирования для CLI: stderr + файл в logs/.

    stdout не используется, там печатаются только отчёты и таблицы.

    Args:
        level: Уровень логирования
        filename: Имя файла лога
    """
    handlers = [logging.StreamHandler(sys.stderr)]
    try:
        handlers.append(logging.FileHandler(get_log_path(filename), encoding='utf-8'))
    except OSError:
        # Каталог только для чтения: остаёмся на stderr
        pass

    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True
    )
