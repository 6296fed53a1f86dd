"""
Реализации переключения контекстов поверх greenlet.

fast     — сохраняет только точку возобновления (стек greenlet).
portable — дополнительно сохраняет и восстанавливает полное состояние
           потока исполнения (маска сигналов, лимит рекурсии, интервал
           переключения, окружение десятичной арифметики), как
           getcontext/setcontext из SVR4.
"""

import decimal
import logging
import signal
import sys
from typing import Any, Callable, Iterable, List, Optional, Tuple

import greenlet

from .exceptions import InvalidTargetError, StackConflictError
from .models import BackendKind, ContextStatus, Fault, StackStatus
from .stack import StackDescriptor

logger = logging.getLogger(__name__)

_HAS_SIGMASK = hasattr(signal, "pthread_sigmask")

# SKIP_SWITCH теряет каждое N-е переключение
SKIP_SWITCH_PERIOD = 7


class Context:
    """Приостановленное исполнение, привязанное к собственному стеку."""

    __slots__ = ("name", "stack", "status", "entry", "arg", "resume_state", "reaper", "_greenlet")

    def __init__(
        self,
        name: str,
        stack: Optional[StackDescriptor],
        entry: Optional[Callable[[Any], Any]] = None,
        arg: Any = None,
        status: ContextStatus = ContextStatus.FRESH
    ):
        self.name = name
        self.stack = stack
        self.entry = entry
        self.arg = arg
        self.status = status
        self.resume_state: Any = None
        self.reaper: Optional["Context"] = None
        self._greenlet: Optional[greenlet.greenlet] = None

    def __repr__(self) -> str:
        return f"Context({self.name!r}, {self.status.value})"


def _guard_status(stack: Optional[StackDescriptor]) -> StackStatus:
    if stack is None:
        return StackStatus.OK
    if not stack.deep_guard_intact():
        return StackStatus.OVERFLOW
    if not stack.shallow_guard_intact():
        return StackStatus.UNDERFLOW
    return StackStatus.OK


def stack_check(ctx: Context) -> StackStatus:
    """
    Диагностика стека контекста.

    Переполнение приоритетнее underflow, если испорчены обе границы.

    Args:
        ctx: Проверяемый контекст (не должен быть запущен)

    Returns:
        StackStatus.OVERFLOW / UNDERFLOW / OK
    """
    status = _guard_status(ctx.stack)
    if status == StackStatus.OK and ctx.status == ContextStatus.RETURNED:
        return StackStatus.UNDERFLOW
    return status


class ContextBackend:
    """
    Общая логика переключения: статусы, проверки, трассировка.

    Подклассы определяют только get_context/set_context — сохранение и
    восстановление состояния сверх точки возобновления.
    """

    kind: BackendKind

    def __init__(
        self,
        diagnostic: bool = False,
        faults: Iterable[Fault] = (),
        trace: bool = False
    ):
        """
        Инициализация backend.

        Args:
            diagnostic: Проверять стек уходящего контекста на каждом переключении
            faults: Внедряемые неисправности (для cstest)
            trace: Записывать пары (from, to) каждого переключения
        """
        self.diagnostic = diagnostic
        self.faults = frozenset(faults)
        self.switch_count = 0
        self.stack_faults: List[Tuple[str, StackStatus]] = []
        self.switch_trace: Optional[List[Tuple[str, str]]] = [] if trace else None
        self._swap_calls = 0
        self._next_id = 0

        self.root = Context("root", None, status=ContextStatus.RUNNING)
        self.root._greenlet = greenlet.getcurrent()
        self.root.resume_state = self.get_context(self.root)
        self.current = self.root
        self.reaper = self.root

        logger.debug(
            f"Backend {self.kind.value} создан "
            f"(diagnostic={diagnostic}, faults={sorted(f.value for f in self.faults)})"
        )

    # ===== Сохранение/восстановление состояния =====

    def get_context(self, ctx: Context) -> Any:
        """Сохранение состояния ctx сверх точки возобновления."""
        raise NotImplementedError

    def set_context(self, ctx: Context):
        """Восстановление сохранённого состояния ctx."""
        raise NotImplementedError

    # ===== Создание и переключение =====

    def make_context(
        self,
        stack: StackDescriptor,
        entry: Callable[[Any], Any],
        arg: Any = None,
        name: Optional[str] = None,
        reaper: Optional[Context] = None
    ) -> Context:
        """
        Создание свежего контекста на заданном стеке.

        Первое переключение в него начинает исполнение entry(arg).

        Raises:
            StackConflictError: Стек уже привязан к контексту
        """
        if stack.owner is not None:
            raise StackConflictError(
                f"Стек уже привязан к контексту {stack.owner.name}"
            )
        self._next_id += 1
        ctx = Context(name or f"ctx-{self._next_id}", stack, entry, arg)
        ctx.reaper = reaper or self.reaper
        # Новый контекст наследует состояние создателя, как makecontext после getcontext
        ctx.resume_state = self.get_context(ctx)
        ctx._greenlet = greenlet.greenlet(
            run=lambda: self._trampoline(ctx),
            parent=ctx.reaper._greenlet
        )
        stack.owner = ctx
        return ctx

    def swap(self, from_ctx: Context, to_ctx: Context):
        """
        Сохранить from_ctx и передать управление to_ctx.

        Возврат из вызова происходит, когда какое-то переключение снова
        выберет from_ctx.

        Raises:
            InvalidTargetError: Переключение в себя, в запущенный или завершённый контекст
        """
        if to_ctx is from_ctx:
            raise InvalidTargetError(f"Переключение контекста {to_ctx.name} в самого себя")
        if from_ctx is not self.current or from_ctx.status != ContextStatus.RUNNING:
            raise InvalidTargetError(f"Контекст {from_ctx.name} сейчас не исполняется")
        if to_ctx.status in (ContextStatus.RUNNING, ContextStatus.RETURNED):
            raise InvalidTargetError(
                f"Нельзя переключиться в {to_ctx.name}: статус {to_ctx.status.value}"
            )

        self._swap_calls += 1
        if Fault.SKIP_SWITCH in self.faults and self._swap_calls % SKIP_SWITCH_PERIOD == 0:
            return

        from_ctx.resume_state = self.get_context(from_ctx)
        from_ctx.status = ContextStatus.SUSPENDED
        self._check_on_switch(from_ctx)
        to_ctx.status = ContextStatus.RUNNING
        self.current = to_ctx
        self.switch_count += 1
        if self.switch_trace is not None:
            self.switch_trace.append((from_ctx.name, to_ctx.name))

        to_ctx._greenlet.switch()

        # Кто-то переключился обратно: статус и current уже выставлены им
        self.set_context(from_ctx)

    def _trampoline(self, ctx: Context):
        """Обёртка точки входа: нормальный возврат уходит в reaper, а не в никуда."""
        self.set_context(ctx)
        try:
            ctx.entry(ctx.arg)
        except greenlet.GreenletExit:
            # Сборщик мусора добивает брошенный контекст
            ctx.status = ContextStatus.RETURNED
            raise
        except BaseException:
            self._fall_off(ctx)
            raise
        self._fall_off(ctx)

    def _fall_off(self, ctx: Context):
        if Fault.DROP_UNDERFLOW_TRAMPOLINE in self.faults:
            ctx.status = ContextStatus.SUSPENDED
        else:
            ctx.status = ContextStatus.RETURNED
        # Возврат сам по себе ожидаем, проверяются только границы
        self._check_on_switch(ctx, guards_only=True)
        reaper = ctx.reaper
        reaper.status = ContextStatus.RUNNING
        self.current = reaper
        self.switch_count += 1
        if self.switch_trace is not None:
            self.switch_trace.append((ctx.name, reaper.name))
        # Возврат из run передаёт управление родителю greenlet, то есть reaper

    def _check_on_switch(self, ctx: Context, guards_only: bool = False):
        if not self.diagnostic or Fault.DROP_CANARY_CHECK in self.faults:
            return
        status = _guard_status(ctx.stack) if guards_only else stack_check(ctx)
        if status != StackStatus.OK:
            self.stack_faults.append((ctx.name, status))
            logger.error(f"❌ Стек контекста {ctx.name}: {status.value}")


class FastBackend(ContextBackend):
    """Минимальная точка возобновления: состояние целиком живёт в greenlet."""

    kind = BackendKind.FAST

    def get_context(self, ctx: Context) -> Any:
        return None

    def set_context(self, ctx: Context):
        pass


class PortableState:
    """Полное состояние исполнения, аналог struct ucontext."""

    __slots__ = ("sigmask", "recursion_limit", "switch_interval", "fp_env")

    def __init__(self, sigmask, recursion_limit: int, switch_interval: float, fp_env: decimal.Context):
        self.sigmask = sigmask
        self.recursion_limit = recursion_limit
        self.switch_interval = switch_interval
        # Режим округления и точность, аналог окружения FPU
        self.fp_env = fp_env


class PortableBackend(ContextBackend):
    """
    Полное сохранение состояния на каждом переключении.

    Маска сигналов читается и ставится системным вызовом, как это делают
    getcontext/setcontext; у каждого контекста своя маска. Окружение
    десятичной арифметики копируется целиком, как регистры FPU.
    На платформах без pthread_sigmask маска не сохраняется.

    Создание контекста тоже платит полную цену: новый контекст получает
    снимок состояния создателя, а первый вход восстанавливает его.
    """

    kind = BackendKind.PORTABLE

    def get_context(self, ctx: Context) -> PortableState:
        sigmask = signal.pthread_sigmask(signal.SIG_BLOCK, ()) if _HAS_SIGMASK else None
        return PortableState(
            sigmask,
            sys.getrecursionlimit(),
            sys.getswitchinterval(),
            decimal.getcontext().copy()
        )

    def set_context(self, ctx: Context):
        state: PortableState = ctx.resume_state
        if state is None:
            return
        if state.sigmask is not None:
            signal.pthread_sigmask(signal.SIG_SETMASK, state.sigmask)
        sys.setrecursionlimit(state.recursion_limit)
        sys.setswitchinterval(state.switch_interval)
        decimal.setcontext(state.fp_env)


_BACKENDS = {
    BackendKind.FAST: FastBackend,
    BackendKind.PORTABLE: PortableBackend,
}


def make_backend(
    kind: BackendKind,
    diagnostic: bool = False,
    faults: Iterable[Fault] = (),
    trace: bool = False
) -> ContextBackend:
    """
    Фабрика backend по виду.

    Args:
        kind: fast или portable
        diagnostic: Проверка канареек на каждом переключении
        faults: Внедряемые неисправности
        trace: Трассировка переключений

    Returns:
        Экземпляр backend, привязанный к текущему потоку
    """
    return _BACKENDS[BackendKind(kind)](diagnostic=diagnostic, faults=faults, trace=trace)


def make_context(
    backend: ContextBackend,
    stack: StackDescriptor,
    entry: Callable[[Any], Any],
    arg: Any = None,
    name: Optional[str] = None
) -> Context:
    """Создание контекста на backend (см. ContextBackend.make_context)."""
    return backend.make_context(stack, entry, arg, name=name)


def swap(backend: ContextBackend, from_ctx: Context, to_ctx: Context):
    """Переключение from_ctx -> to_ctx (см. ContextBackend.swap)."""
    backend.swap(from_ctx, to_ctx)
