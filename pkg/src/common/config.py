"""
Конфигурация рантайма из переменных окружения.
Загружает .env и валидирует параметры стеков, бенчмарков и vsuite.
"""

import os
import sys
from typing import Tuple
from dotenv import load_dotenv

# Загрузка переменных окружения
load_dotenv()


def _env_bool(name: str, default: str = "false") -> bool:
    return os.getenv(name, default).strip().lower() in ("1", "true", "yes", "on")


class RuntimeSettings:
    """Настройки рантайма, бенчмарков и verification suite."""

    # ===== Стеки и контексты =====
    STACK_SIZE: int = int(os.getenv('SRRT_STACK_SIZE', '65536'))
    CANARY_LEN: int = int(os.getenv('SRRT_CANARY_LEN', '64'))
    DEFAULT_BACKEND: str = os.getenv('SRRT_DEFAULT_BACKEND', 'fast')
    # Проверка канареек при каждом переключении
    DIAGNOSTIC: bool = _env_bool('SRRT_DIAGNOSTIC')
    MAX_PROCESSES: int = int(os.getenv('SRRT_MAX_PROCESSES', '10000'))

    # ===== csloop =====
    CSLOOP_SECONDS: int = int(os.getenv('SRRT_CSLOOP_SECONDS', '2'))

    # ===== Бенчмарки =====
    BENCH_TRIALS: int = int(os.getenv('SRRT_BENCH_TRIALS', '11'))
    BENCH_WARMUP: int = int(os.getenv('SRRT_BENCH_WARMUP', '1'))
    BENCH_ITERATIONS: int = int(os.getenv('SRRT_BENCH_ITERATIONS', '100000'))
    # Для строк с созданием процессов (spawn дороже на порядок)
    BENCH_SPAWN_ITERATIONS: int = int(os.getenv('SRRT_BENCH_SPAWN_ITERATIONS', '10000'))

    # ===== Verification suite =====
    VSUITE_DIR: str = os.getenv('SRRT_VSUITE_DIR', 'vsuite')
    VSUITE_TIMEOUT: float = float(os.getenv('SRRT_VSUITE_TIMEOUT', '30'))

    # ===== Логирование =====
    LOG_LEVEL: str = os.getenv('SRRT_LOG_LEVEL', 'INFO')
    LOG_FILE: str = os.getenv('SRRT_LOG_FILE', 'srrt.log')

    @classmethod
    def validate(cls) -> Tuple[bool, str]:
        """
        Валидация конфигурации.

        Returns:
            Кортеж (успех, сообщение об ошибке/предупреждении)
        """
        warnings = []

        if cls.STACK_SIZE < 4096:
            return False, f"SRRT_STACK_SIZE должен быть >= 4096 (сейчас {cls.STACK_SIZE})"

        if cls.CANARY_LEN < 64 or 2 * cls.CANARY_LEN >= cls.STACK_SIZE:
            return False, (
                f"SRRT_CANARY_LEN должен быть >= 64 и 2*canary < stack "
                f"(сейчас {cls.CANARY_LEN}/{cls.STACK_SIZE})"
            )

        if cls.DEFAULT_BACKEND not in ("fast", "portable"):
            return False, "SRRT_DEFAULT_BACKEND должен быть fast или portable"

        if cls.BENCH_TRIALS < 1 or cls.BENCH_TRIALS % 2 == 0:
            return False, "SRRT_BENCH_TRIALS должен быть нечётным положительным числом"

        if cls.BENCH_ITERATIONS < 1000 or cls.BENCH_SPAWN_ITERATIONS < 1000:
            return False, "Число итераций на прогон должно быть >= 1000"

        if cls.CSLOOP_SECONDS < 1:
            return False, "SRRT_CSLOOP_SECONDS должен быть >= 1"

        if cls.VSUITE_TIMEOUT <= 0:
            warnings.append(
                "ВНИМАНИЕ: SRRT_VSUITE_TIMEOUT <= 0, будет использовано значение 30 с"
            )

        if cls.DIAGNOSTIC:
            warnings.append(
                "ВНИМАНИЕ: включён диагностический режим, "
                "проверка стеков на каждом переключении искажает замеры"
            )

        if warnings:
            return True, "\n".join(warnings)

        return True, ""

    @classmethod
    def print_config(cls):
        """Вывод конфигурации в stderr (stdout занят артефактами)."""
        out = sys.stderr
        print("=" * 60, file=out)
        print("КОНФИГУРАЦИЯ SR RUNTIME:", file=out)
        print(f"  Stack Size: {cls.STACK_SIZE}", file=out)
        print(f"  Canary Len: {cls.CANARY_LEN}", file=out)
        print(f"  Default Backend: {cls.DEFAULT_BACKEND}", file=out)
        print(f"  Diagnostic: {'✓ включён' if cls.DIAGNOSTIC else '✗ выключен'}", file=out)
        print(f"  Max Processes: {cls.MAX_PROCESSES}", file=out)
        print(file=out)
        print("  === Бенчмарки ===", file=out)
        print(f"  Trials: {cls.BENCH_TRIALS} (warmup {cls.BENCH_WARMUP})", file=out)
        print(f"  Iterations: {cls.BENCH_ITERATIONS} / spawn {cls.BENCH_SPAWN_ITERATIONS}", file=out)
        print(f"  csloop Seconds: {cls.CSLOOP_SECONDS}", file=out)
        print(file=out)
        print(f"  vsuite Dir: {cls.VSUITE_DIR}", file=out)
        print(f"  vsuite Timeout: {cls.VSUITE_TIMEOUT}", file=out)
        print(f"  Log: {cls.LOG_FILE} ({cls.LOG_LEVEL})", file=out)
        print("=" * 60, file=out)
