"""
Модели модуля ctxswitch: перечисления состояний и отчёты харнессов.
"""

from enum import Enum
from typing import List

from pydantic import BaseModel, Field, model_validator


class BackendKind(str, Enum):
    """Реализация переключения контекстов."""
    FAST = "fast"  # Минимальная точка возобновления
    PORTABLE = "portable"  # Полное состояние через системный сервис


class ContextStatus(str, Enum):
    """Состояние контекста."""
    FRESH = "fresh"  # Ещё ни разу не запускался
    SUSPENDED = "suspended"
    RUNNING = "running"
    RETURNED = "returned"  # Точка входа завершилась (underflow)


class StackStatus(str, Enum):
    """Результат проверки стека."""
    OK = "ok"
    OVERFLOW = "overflow"
    UNDERFLOW = "underflow"


class Fault(str, Enum):
    """Внедряемые неисправности для проверки самого cstest."""
    DROP_CANARY_CHECK = "drop_canary_check"
    DROP_UNDERFLOW_TRAMPOLINE = "drop_underflow_trampoline"
    SKIP_SWITCH = "skip_switch"


class SwitchStats(BaseModel):
    """Результат csloop: число переключений и время на одно переключение."""
    backend: BackendKind = Field(..., description="Реализация переключения")
    total_switches: int = Field(..., gt=0, description="Переключений в одну сторону")
    elapsed: float = Field(..., gt=0, description="Секунды чистого цикла")
    per_switch: float = Field(..., gt=0, description="Микросекунды на переключение")

    @model_validator(mode='after')
    def check_parity(self) -> 'SwitchStats':
        """Пинг-понг даёт только чётное число переключений."""
        if self.total_switches % 2:
            raise ValueError(f"total_switches должен быть чётным: {self.total_switches}")
        return self


class CswTestReport(BaseModel):
    """Отчёт cstest: три проверки и сообщения по каждой."""
    backend: BackendKind
    overflow_detected: bool = False
    underflow_detected: bool = False
    switch_order_ok: bool = False
    detail: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        """Отчёт проходит только если все три проверки успешны."""
        return self.overflow_detected and self.underflow_detected and self.switch_order_ok
