"""
Общие утилиты проекта.
"""

from .config import RuntimeSettings
from .logging_utils import get_log_path, setup_logging

__all__ = ["RuntimeSettings", "get_log_path", "setup_logging"]
