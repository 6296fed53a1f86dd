"""
Калибровка: стоимость одной итерации пустого счётного цикла.
"""

import logging
import time

from .exceptions import ClockUnavailableError
from .models import BenchConfig, median_of

logger = logging.getLogger(__name__)

# Допустимое расхождение калибровки при удвоении числа итераций
SELF_CONSISTENCY_TOLERANCE = 0.10


def require_monotonic_clock():
    """
    Raises:
        ClockUnavailableError: perf_counter не монотонен на этой платформе
    """
    try:
        info = time.get_clock_info("perf_counter")
    except (ValueError, OSError) as e:
        raise ClockUnavailableError(f"Часы perf_counter недоступны: {e}") from e
    if not info.monotonic:
        raise ClockUnavailableError("Часы perf_counter не монотонны")


def _loop_cost(iterations: int, trials: int) -> float:
    clock = time.perf_counter
    samples = []
    for _ in range(trials):
        start = clock()
        for _ in range(iterations):
            pass
        samples.append((clock() - start) * 1e6 / iterations)
    return median_of(samples)


def calibrate_loop(cfg: BenchConfig) -> float:
    """
    Стоимость итерации пустого цикла в микросекундах.

    Перед возвратом проверяется самосогласованность: замер с удвоенным
    числом итераций должен отличаться меньше чем на 10%, иначе пишется
    предупреждение (машина не в покое или часы грубые).

    Args:
        cfg: Параметры прогона

    Returns:
        Микросекунды на итерацию, >= 0
    """
    require_monotonic_clock()
    iterations = cfg.iterations_per_trial

    for _ in range(cfg.warmup_trials):
        _loop_cost(iterations, 1)

    base = _loop_cost(iterations, cfg.trials)
    doubled = _loop_cost(2 * iterations, cfg.trials)

    reference = max(base, doubled)
    if reference > 0 and abs(base - doubled) / reference >= SELF_CONSISTENCY_TOLERANCE:
        logger.warning(
            f"⚠️ Калибровка нестабильна: {base:.5f} мкс при {iterations} итерациях, "
            f"{doubled:.5f} мкс при {2 * iterations}"
        )

    logger.info(f"Калибровка цикла: {base:.5f} мкс/итерацию")
    return max(0.0, base)
