"""
Буфер стека с защитными канарейками на обоих концах.

Раскладка буфера (индексы растут вправо):

    [0 .. canary_len)                 глубокая граница, сюда пишет переполнение
    [canary_len .. size - canary_len) рабочая область, кадры растут влево
    [size - canary_len .. size)       мелкая граница, её портит underflow
"""

from typing import Optional, TYPE_CHECKING

from .exceptions import InvalidArgumentError, StackConflictError, StackFaultError
from .models import ContextStatus

if TYPE_CHECKING:
    from .backends import Context

MIN_STACK_SIZE = 4096
MIN_CANARY_LEN = 64
CANARY_PATTERN = bytes.fromhex("DEADBEEF")
FRAME_FILL = b"\xCC"


class StackDescriptor:
    """Стек контекста: буфер, канарейки и указатель вершины."""

    __slots__ = ("buffer", "size", "canary_len", "canary_pattern", "sp", "owner", "_guard")

    def __init__(self, size: int, canary_len: int, canary_pattern: bytes = CANARY_PATTERN):
        """
        Инициализация стека.

        Args:
            size: Размер буфера в байтах
            canary_len: Размер каждой защитной области
            canary_pattern: Повторяемая последовательность байт
        """
        self.size = size
        self.canary_len = canary_len
        self.canary_pattern = canary_pattern
        repeats = canary_len // len(canary_pattern) + 1
        self._guard = (canary_pattern * repeats)[:canary_len]
        self.buffer = bytearray(size)
        self.owner: Optional["Context"] = None
        self.sp = size - canary_len
        self._fill_guards()

    def _fill_guards(self):
        self.buffer[:self.canary_len] = self._guard
        self.buffer[self.size - self.canary_len:] = self._guard

    @property
    def usable_size(self) -> int:
        """Размер рабочей области между канарейками."""
        return self.size - 2 * self.canary_len

    @property
    def top(self) -> int:
        """Начальное положение указателя стека (мелкий конец)."""
        return self.size - self.canary_len

    @property
    def used(self) -> int:
        """Сколько байт занято кадрами."""
        return self.top - self.sp

    def deep_guard_intact(self) -> bool:
        return self.buffer[:self.canary_len] == self._guard

    def shallow_guard_intact(self) -> bool:
        return self.buffer[self.size - self.canary_len:] == self._guard

    def push_frame(self, nbytes: int) -> int:
        """
        Размещение кадра под указателем стека.

        Канарейки не проверяются: неконтролируемая рекурсия затирает
        глубокую границу так же, как настоящее переполнение.

        Args:
            nbytes: Размер кадра

        Returns:
            Новое значение указателя стека

        Raises:
            StackFaultError: Кадр вышел за начало буфера
        """
        new_sp = self.sp - nbytes
        if new_sp < 0:
            raise StackFaultError(
                f"Кадр {nbytes} байт выходит за буфер стека (sp={self.sp})"
            )
        self.buffer[new_sp:self.sp] = FRAME_FILL * nbytes
        self.sp = new_sp
        return new_sp

    def pop_frame(self, nbytes: int) -> int:
        """Освобождение кадра. Выход за конец буфера даёт StackFaultError."""
        new_sp = self.sp + nbytes
        if new_sp > self.size:
            raise StackFaultError(f"Снятие {nbytes} байт выходит за вершину стека")
        self.sp = new_sp
        return new_sp

    def poke(self, offset: int, data: bytes):
        """Сырая запись в буфер без учёта канареек."""
        if offset < 0 or offset + len(data) > self.size:
            raise StackFaultError(f"Запись [{offset}, {offset + len(data)}) вне буфера")
        self.buffer[offset:offset + len(data)] = data

    def recycle(self):
        """
        Возврат стека в исходное состояние для повторного использования.

        Raises:
            StackConflictError: Стек принадлежит ещё живому контексту
        """
        if self.owner is not None and self.owner.status != ContextStatus.RETURNED:
            raise StackConflictError(
                f"Стек занят живым контекстом {self.owner.name} ({self.owner.status.value})"
            )
        self._fill_guards()
        self.sp = self.top
        self.owner = None


def alloc_stack(size: int, canary_len: int, canary_pattern: bytes = CANARY_PATTERN) -> StackDescriptor:
    """
    Выделение стека с канарейками.

    Args:
        size: Размер буфера, не меньше 4096
        canary_len: Размер защитной области, не меньше 64, 2*canary_len < size
        canary_pattern: Шаблон канарейки

    Returns:
        Новый StackDescriptor

    Raises:
        InvalidArgumentError: Нарушены ограничения на размеры
    """
    if size < MIN_STACK_SIZE:
        raise InvalidArgumentError(f"Размер стека {size} меньше минимума {MIN_STACK_SIZE}")
    if canary_len < MIN_CANARY_LEN:
        raise InvalidArgumentError(f"Канарейка {canary_len} меньше минимума {MIN_CANARY_LEN}")
    if 2 * canary_len >= size:
        raise InvalidArgumentError(f"Канарейки 2*{canary_len} не помещаются в стек {size}")
    if not canary_pattern:
        raise InvalidArgumentError("Шаблон канарейки не может быть пустым")
    return StackDescriptor(size, canary_len, canary_pattern)
