"""
Модели данных verification suite.
"""

from enum import Enum
from pathlib import Path
from typing import ClassVar, Dict, List, Optional

from pydantic import BaseModel, Field, model_validator

from src.common.config import RuntimeSettings
from src.ctxswitch import BackendKind

MANIFEST_NAME = "case.json"
DEFAULT_GOLDEN = "expected.out"


class CaseStatus(str, Enum):
    """Исход одного случая."""
    PASS = "pass"
    FAIL = "fail"
    XFAIL = "xfail"  # Ожидаемый провал
    XPASS = "xpass"  # Ожидался провал, но вывод совпал
    TIMEOUT = "timeout"


class Target(str, Enum):
    """Какую сборку рантайма используют сценарии."""
    INSTALLED = "installed"
    FRESH = "fresh"


class CaseManifest(BaseModel):
    """Содержимое case.json."""
    scenario: Optional[str] = Field(None, description="Именованный сценарий рантайма")
    command: Optional[List[str]] = Field(None, min_length=1, description="Внешняя команда")
    golden: str = Field(DEFAULT_GOLDEN, description="Файл эталонного вывода")
    expected_fail: bool = Field(False, description="Случай заведомо падает")
    timeout: float = Field(
        default_factory=lambda: RuntimeSettings.VSUITE_TIMEOUT if RuntimeSettings.VSUITE_TIMEOUT > 0 else 30.0,
        gt=0,
        description="Лимит времени, секунды"
    )
    backend: BackendKind = Field(BackendKind.FAST, description="Backend для сценария")

    model_config = {"extra": "forbid"}

    @model_validator(mode='after')
    def check_program(self) -> 'CaseManifest':
        if (self.scenario is None) == (self.command is None):
            raise ValueError("Нужно указать ровно одно из полей scenario или command")
        return self


class TestCase(BaseModel):
    """Случай набора, готовый к запуску."""
    __test__: ClassVar[bool] = False

    name: str
    directory: Path
    program: List[str] = Field(..., min_length=1, description="argv запускаемой программы")
    scenario: Optional[str] = Field(None, description="Имя сценария, если случай не внешняя команда")
    golden: Optional[bytes] = None
    expected_fail: bool = False
    timeout: float = Field(30.0, gt=0)

    @model_validator(mode='after')
    def check_golden(self) -> 'TestCase':
        if self.golden is None and not self.expected_fail:
            raise ValueError(f"У случая {self.name} нет эталонного вывода")
        return self


class TestOutcome(BaseModel):
    """Результат прогона случая."""
    __test__: ClassVar[bool] = False

    name: str
    status: CaseStatus
    diff: Optional[str] = Field(None, description="Описание первого расхождения")
    output: Optional[str] = Field(None, description="Вывод программы (только в verbose)")
    duration: float = Field(0.0, ge=0, exclude=True)


class SuiteReport(BaseModel):
    """Итоги прогона набора."""
    outcomes: List[TestOutcome] = Field(default_factory=list)

    @property
    def counts(self) -> Dict[str, int]:
        counts = {status.value: 0 for status in CaseStatus}
        for outcome in self.outcomes:
            counts[outcome.status.value] += 1
        return counts

    @property
    def overall_pass(self) -> bool:
        """xpass не ломает итог, но выводится отдельно."""
        return not any(
            outcome.status in (CaseStatus.FAIL, CaseStatus.TIMEOUT)
            for outcome in self.outcomes
        )

    @property
    def flagged(self) -> List[str]:
        return [outcome.name for outcome in self.outcomes if outcome.status == CaseStatus.XPASS]
