"""
Примитивы переключения контекстов и их харнессы.

Основные компоненты:
- StackDescriptor / alloc_stack: стек с канарейками
- FastBackend / PortableBackend: две реализации переключения
- run_cstest: проверка переполнения, underflow и порядка переключений
- run_csloop: сырой темп переключений
"""

from .models import (
    BackendKind,
    ContextStatus,
    StackStatus,
    Fault,
    SwitchStats,
    CswTestReport
)

from .stack import StackDescriptor, alloc_stack, CANARY_PATTERN

from .backends import (
    Context,
    ContextBackend,
    FastBackend,
    PortableBackend,
    make_backend,
    make_context,
    swap,
    stack_check
)

from .exceptions import (
    ContextSwitchError,
    InvalidArgumentError,
    StackConflictError,
    InvalidTargetError,
    StackFaultError
)

from .cstest import run_cstest, round_robin_trace
from .csloop import run_csloop

__all__ = [
    # Модели
    "BackendKind",
    "ContextStatus",
    "StackStatus",
    "Fault",
    "SwitchStats",
    "CswTestReport",

    # Стеки и контексты
    "StackDescriptor",
    "alloc_stack",
    "CANARY_PATTERN",
    "Context",
    "ContextBackend",
    "FastBackend",
    "PortableBackend",
    "make_backend",
    "make_context",
    "swap",
    "stack_check",

    # Харнессы
    "run_cstest",
    "round_robin_trace",
    "run_csloop",

    # Исключения
    "ContextSwitchError",
    "InvalidArgumentError",
    "StackConflictError",
    "InvalidTargetError",
    "StackFaultError",
]
