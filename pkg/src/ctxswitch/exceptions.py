"""
Исключения для модуля переключения контекстов.
"""


class ContextSwitchError(Exception):
    """Базовая ошибка примитивов переключения контекстов."""
    pass


class InvalidArgumentError(ContextSwitchError, ValueError):
    """Нарушены ограничения на аргументы (размер стека, канарейки, секунды)."""
    pass


class StackConflictError(ContextSwitchError):
    """Стек уже привязан к живому контексту."""
    pass


class InvalidTargetError(ContextSwitchError):
    """
    Недопустимая цель переключения.

    Переключение в себя, в уже работающий или завершившийся контекст.
    """
    pass


class StackFaultError(ContextSwitchError):
    """Запись вышла за физические границы буфера стека (аналог SIGSEGV)."""
    pass
