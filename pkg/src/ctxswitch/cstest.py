"""
cstest: проверка примитивов переключения контекстов.

Три подтеста:
- переполнение стека обнаруживается проверкой канареек при переключении;
- возврат из точки входа (underflow) обнаруживается и не роняет процесс;
- десять контекстов по кругу дают ровно ожидаемую последовательность.
"""

import logging
from typing import Callable, Iterable, List, Tuple

from src.common.config import RuntimeSettings
from .backends import ContextBackend, make_backend, stack_check
from .exceptions import InvalidTargetError
from .models import BackendKind, CswTestReport, Fault, StackStatus
from .stack import alloc_stack

logger = logging.getLogger(__name__)

DEFAULT_CONTEXTS = 10
DEFAULT_ROUNDS = 1000
FRAME_SIZE = 512


def _new_backend(kind: BackendKind, faults: Iterable[Fault]) -> ContextBackend:
    return make_backend(kind, diagnostic=True, faults=faults)


def _new_stack():
    return alloc_stack(RuntimeSettings.STACK_SIZE, RuntimeSettings.CANARY_LEN)


def check_overflow(kind: BackendKind, faults: Iterable[Fault] = ()) -> Tuple[bool, str]:
    """
    Контролируемая рекурсия до выхода за рабочую область стека.

    Сначала самопроверка: байт, записанный прямо в глубокую границу,
    должен распознаваться как переполнение.
    """
    backend = _new_backend(kind, faults)

    selftest_stack = _new_stack()
    selftest = backend.make_context(selftest_stack, lambda _arg: None, name="selftest")
    selftest_stack.poke(0, b"\x00")
    if stack_check(selftest) != StackStatus.OVERFLOW:
        return False, "overflow: самопроверка канарейки не сработала"

    stack = _new_stack()
    ctx_holder = {}

    def recurse(depth: int) -> int:
        room = stack.sp - stack.canary_len
        if room < FRAME_SIZE:
            # Последний кадр залезает на половину защитной области
            stack.push_frame(room + stack.canary_len // 2)
            return depth + 1
        stack.push_frame(FRAME_SIZE)
        return recurse(depth + 1)

    def entry(_arg):
        depth = recurse(0)
        ctx_holder["depth"] = depth
        backend.swap(ctx_holder["ctx"], backend.root)

    ctx = backend.make_context(stack, entry, name="overflow")
    ctx_holder["ctx"] = ctx
    backend.swap(backend.root, ctx)

    detected = (ctx.name, StackStatus.OVERFLOW) in backend.stack_faults
    if detected:
        return True, f"overflow: обнаружено при переключении (глубина {ctx_holder['depth']})"
    return False, "overflow: переключение не заметило испорченную канарейку"


def check_underflow(kind: BackendKind, faults: Iterable[Fault] = ()) -> Tuple[bool, str]:
    """Точка входа завершается обычным возвратом; это должно распознаваться."""
    backend = _new_backend(kind, faults)
    stack = _new_stack()
    trace: List[str] = []

    def entry(_arg):
        stack.push_frame(FRAME_SIZE)
        trace.append("ran")
        stack.pop_frame(FRAME_SIZE)

    ctx = backend.make_context(stack, entry, name="underflow")
    backend.swap(backend.root, ctx)

    if trace != ["ran"]:
        return False, "underflow: точка входа не исполнилась"
    if stack_check(ctx) != StackStatus.UNDERFLOW:
        return False, f"underflow: контекст после возврата в статусе {ctx.status.value}"

    try:
        backend.swap(backend.root, ctx)
    except InvalidTargetError:
        return True, "underflow: обнаружен, возврат в завершённый контекст запрещён"
    return False, "underflow: переключение в завершённый контекст не отклонено"


def round_robin_trace(backend: ContextBackend, contexts: int, rounds: int) -> List[int]:
    """
    Круговое переключение contexts контекстов rounds раз.

    Каждый контекст дописывает свой номер и передаёт управление следующему;
    последний на последнем круге возвращается в root.
    """
    trace: List[int] = []
    ring = []

    def make_entry(index: int) -> Callable:
        def entry(_arg):
            for lap in range(rounds):
                trace.append(index)
                if index == contexts - 1 and lap == rounds - 1:
                    target = backend.root
                else:
                    target = ring[(index + 1) % contexts]
                backend.swap(ring[index], target)
        return entry

    for index in range(contexts):
        ring.append(backend.make_context(_new_stack(), make_entry(index), name=f"rr-{index}"))

    backend.swap(backend.root, ring[0])
    return trace


def check_switch_order(
    kind: BackendKind,
    faults: Iterable[Fault] = (),
    contexts: int = DEFAULT_CONTEXTS,
    rounds: int = DEFAULT_ROUNDS
) -> Tuple[bool, str]:
    """Трасса кругового переключения совпадает с 0..N-1, повторённым rounds раз."""
    backend = _new_backend(kind, faults)
    trace = round_robin_trace(backend, contexts, rounds)
    expected = list(range(contexts)) * rounds
    if trace == expected:
        return True, f"switch order: {contexts} контекстов x {rounds} кругов совпали"
    mismatch = next(
        (i for i, (got, want) in enumerate(zip(trace, expected)) if got != want),
        min(len(trace), len(expected))
    )
    return False, f"switch order: расхождение на позиции {mismatch} (длина {len(trace)})"


def run_cstest(backend: BackendKind, faults: Iterable[Fault] = ()) -> CswTestReport:
    """
    Полный прогон cstest.

    Падение подтеста фиксируется как провал в detail, процесс не прерывается.

    Args:
        backend: Реализация переключения
        faults: Внедряемые неисправности

    Returns:
        CswTestReport
    """
    kind = BackendKind(backend)
    faults = frozenset(faults)
    report = CswTestReport(backend=kind)
    checks = (
        ("overflow_detected", check_overflow),
        ("underflow_detected", check_underflow),
        ("switch_order_ok", check_switch_order),
    )

    for field, check in checks:
        try:
            ok, message = check(kind, faults)
        except Exception as e:
            ok, message = False, f"{field}: сбой {type(e).__name__}: {e}"
            logger.error(f"❌ cstest {kind.value}: подтест {field} упал: {e}", exc_info=True)
        setattr(report, field, ok)
        report.detail.append(message)
        logger.info(f"cstest {kind.value}: {'✓' if ok else '✗'} {message}")

    return report
