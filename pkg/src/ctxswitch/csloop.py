"""
csloop: сырой темп переключений контекстов за заданное число секунд.

Два контекста перекидывают управление друг другу; одно переключение в
одну сторону считается за одно, круг туда-обратно — за два.
"""

import logging
import time

from src.common.config import RuntimeSettings
from .backends import make_backend
from .exceptions import InvalidArgumentError
from .models import BackendKind, SwitchStats
from .stack import alloc_stack

logger = logging.getLogger(__name__)

# Кругов между проверками часов
ROUND_TRIPS_PER_CHECK = 1000


def run_csloop(backend: BackendKind, seconds: int) -> SwitchStats:
    """
    Замер переключений пинг-понгом двух контекстов.

    Время берётся монотонными часами внутри пинг-контекста, поэтому
    создание контекстов и их уничтожение в замер не попадают.

    Args:
        backend: Реализация переключения
        seconds: Длительность замера, целое >= 1

    Returns:
        SwitchStats с числом переключений и микросекундами на одно

    Raises:
        InvalidArgumentError: seconds < 1
    """
    if isinstance(seconds, bool) or not isinstance(seconds, int) or seconds < 1:
        raise InvalidArgumentError(f"seconds должен быть целым >= 1, получено {seconds!r}")

    kind = BackendKind(backend)
    impl = make_backend(kind)
    size, canary = RuntimeSettings.STACK_SIZE, RuntimeSettings.CANARY_LEN
    result = {"round_trips": 0, "elapsed": 0.0}
    contexts = {}

    def ping(_arg):
        sw = impl.swap
        me, other = contexts["ping"], contexts["pong"]
        clock = time.perf_counter
        round_trips = 0
        start = clock()
        while True:
            for _ in range(ROUND_TRIPS_PER_CHECK):
                sw(me, other)
            round_trips += ROUND_TRIPS_PER_CHECK
            now = clock()
            if now - start >= seconds:
                break
        result["round_trips"] = round_trips
        result["elapsed"] = now - start

    def pong(_arg):
        sw = impl.swap
        me, other = contexts["pong"], contexts["ping"]
        while True:
            sw(me, other)

    contexts["ping"] = impl.make_context(alloc_stack(size, canary), ping, name="ping")
    contexts["pong"] = impl.make_context(alloc_stack(size, canary), pong, name="pong")

    logger.info(f"csloop: backend={kind.value}, {seconds} с")
    # ping по возврату отдаёт управление в root
    impl.swap(impl.root, contexts["ping"])

    total = 2 * result["round_trips"]
    elapsed = result["elapsed"]
    stats = SwitchStats(
        backend=kind,
        total_switches=total,
        elapsed=elapsed,
        per_switch=elapsed * 1e6 / total
    )
    logger.info(
        f"✅ csloop {kind.value}: {total} переключений за {elapsed:.3f} с, "
        f"{stats.per_switch:.4f} мкс/переключение"
    )
    return stats
