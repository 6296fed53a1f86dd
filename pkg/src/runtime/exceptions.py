"""
Исключения рантайма.
"""


class RuntimeSystemError(Exception):
    """Базовая ошибка рантайма процессов."""
    pass


class CapacityError(RuntimeSystemError):
    """Не удалось выделить стек или превышен лимит процессов."""
    pass


class DeadlockError(RuntimeSystemError):
    """
    Взаимная блокировка.

    Возникает при join самого себя и когда главный процесс остался
    заблокированным, а готовых к запуску процессов больше нет.
    """
    pass


class InvalidStateError(RuntimeSystemError):
    """Операция недопустима в текущем состоянии (повторный reply, вызов вне процесса)."""
    pass


class NotFoundError(RuntimeSystemError, KeyError):
    """Неизвестный proc, операция ресурса или pid."""

    def __str__(self) -> str:
        # KeyError по умолчанию оборачивает сообщение в кавычки
        return str(self.args[0]) if self.args else ""


class ProcessFailedError(RuntimeSystemError):
    """Тело процесса завершилось исключением."""
    pass
