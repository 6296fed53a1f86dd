"""
Драйвер verification suite: поиск случаев, запуск, сравнение с эталоном.

Каждый случай — каталог с case.json и файлом эталонного вывода.
Программа случая запускается отдельным процессом, так что падение
или зависание одного случая не мешает остальным.
"""

import json
import logging
import os
import subprocess
import sys
import time
from pathlib import Path
from typing import List, Optional, Union

from pydantic import ValidationError

from .exceptions import SuiteConfigurationError, SuiteIOError
from .models import (
    MANIFEST_NAME,
    CaseManifest,
    CaseStatus,
    SuiteReport,
    Target,
    TestCase,
    TestOutcome
)

logger = logging.getLogger(__name__)

# Импорт метрик (ленивая инициализация)
try:
    from src.monitoring import get_suite_metrics
    METRICS_AVAILABLE = True
except ImportError:
    METRICS_AVAILABLE = False

PROJECT_ROOT = Path(__file__).resolve().parents[2]

# Подстановка интерпретатора в command из case.json
PYTHON_PLACEHOLDER = "{python}"


def _program_for(manifest: CaseManifest) -> List[str]:
    if manifest.scenario is not None:
        return [
            sys.executable, "-m", "src.vsuite.scenario_runner",
            manifest.scenario, "--backend", manifest.backend.value
        ]
    return [sys.executable if arg == PYTHON_PLACEHOLDER else arg for arg in manifest.command]


def load_case(directory: Path) -> TestCase:
    """
    Чтение одного случая из каталога.

    Raises:
        SuiteConfigurationError: Некорректный case.json или нет эталона
    """
    manifest_path = directory / MANIFEST_NAME
    try:
        manifest = CaseManifest.model_validate_json(manifest_path.read_bytes())
    except (ValidationError, json.JSONDecodeError) as e:
        raise SuiteConfigurationError(f"{directory.name}: некорректный {MANIFEST_NAME}: {e}") from e
    except OSError as e:
        raise SuiteConfigurationError(f"{directory.name}: не читается {MANIFEST_NAME}: {e}") from e

    golden_path = directory / manifest.golden
    golden = golden_path.read_bytes() if golden_path.is_file() else None
    try:
        return TestCase(
            name=directory.name,
            directory=directory,
            program=_program_for(manifest),
            scenario=manifest.scenario,
            golden=golden,
            expected_fail=manifest.expected_fail,
            timeout=manifest.timeout
        )
    except ValidationError as e:
        raise SuiteConfigurationError(
            f"{directory.name}: нет эталона {manifest.golden} для случая без expected_fail"
        ) from e


def discover(root: Union[str, Path]) -> List[TestCase]:
    """
    Поиск случаев: каждый подкаталог с case.json, по имени.

    Raises:
        SuiteIOError: Каталог не существует или не читается
        SuiteConfigurationError: Некорректный случай
    """
    root = Path(root)
    try:
        entries = sorted(entry for entry in root.iterdir() if entry.is_dir())
    except OSError as e:
        raise SuiteIOError(f"Не удалось прочитать каталог набора {root}: {e}") from e

    cases = [load_case(entry) for entry in entries if (entry / MANIFEST_NAME).is_file()]
    logger.info(f"Найдено случаев: {len(cases)} в {root}")
    return cases


def normalize_output(data: bytes) -> bytes:
    return data.replace(b"\r\n", b"\n").replace(b"\r", b"\n")


def first_difference(expected: bytes, actual: bytes) -> Optional[str]:
    """
    Описание первого расхождения или None, если байты совпадают.

    Позиция считается с нуля.
    """
    if expected == actual:
        return None
    limit = min(len(expected), len(actual))
    offset = next((i for i in range(limit) if expected[i] != actual[i]), limit)
    line = expected[:offset].count(b"\n") + 1
    want = expected[offset:offset + 20]
    got = actual[offset:offset + 20]
    return f"output differs at byte {offset} (line {line}): expected {want!r}, got {got!r}"


def _environment(target: Target) -> dict:
    env = dict(os.environ)
    if target == Target.FRESH:
        existing = env.get("PYTHONPATH")
        env["PYTHONPATH"] = str(PROJECT_ROOT) + (os.pathsep + existing if existing else "")
    return env


def run_case(tc: TestCase, verbose: bool = False, target: Target = Target.FRESH) -> TestOutcome:
    """
    Запуск случая и сравнение вывода с эталоном.

    Args:
        tc: Случай
        verbose: Сохранить полный вывод в результате
        target: fresh — рантайм из рабочего дерева, installed — установленный пакет

    Returns:
        TestOutcome; для expected_fail несовпадение даёт xfail, совпадение — xpass
    """
    target = Target(target)
    # Внешние команды всегда работают в каталоге случая
    cwd = PROJECT_ROOT if target == Target.FRESH and tc.scenario is not None else tc.directory
    start = time.monotonic()
    output = b""
    diff: Optional[str]

    try:
        completed = subprocess.run(
            tc.program,
            cwd=str(cwd),
            env=_environment(target),
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            timeout=tc.timeout
        )
        output = completed.stdout
        if completed.returncode != 0:
            stderr_tail = completed.stderr.decode("utf-8", "replace").strip().splitlines()[-1:]
            diff = f"exit status {completed.returncode}" + (f": {stderr_tail[0]}" if stderr_tail else "")
        elif tc.golden is None:
            diff = "no golden output"
        else:
            diff = first_difference(normalize_output(tc.golden), normalize_output(output))
        status = CaseStatus.PASS if diff is None else CaseStatus.FAIL
    except subprocess.TimeoutExpired as e:
        output = e.stdout or b""
        diff = f"timed out after {tc.timeout:g} s"
        status = CaseStatus.TIMEOUT
    except OSError as e:
        diff = f"cannot execute {tc.program[0]}: {e}"
        status = CaseStatus.FAIL

    if tc.expected_fail:
        status = CaseStatus.XPASS if status == CaseStatus.PASS else CaseStatus.XFAIL

    duration = time.monotonic() - start
    outcome = TestOutcome(
        name=tc.name,
        status=status,
        diff=diff,
        output=output.decode("utf-8", "replace") if verbose else None,
        duration=duration
    )

    if METRICS_AVAILABLE:
        get_suite_metrics().record_case(status.value, duration)
    if status in (CaseStatus.FAIL, CaseStatus.TIMEOUT):
        logger.warning(f"❌ {tc.name}: {status.value} ({diff})")
    elif status == CaseStatus.XPASS:
        logger.warning(f"⚠️ {tc.name}: ожидался провал, но вывод совпал")
    else:
        logger.info(f"✅ {tc.name}: {status.value}")
    return outcome


def run_suite(
    root: Union[str, Path],
    verbose: bool = False,
    target: Target = Target.FRESH
) -> SuiteReport:
    """
    Прогон всех случаев по порядку.

    Драйвер не прерывается на отдельных случаях: каждый получает свой исход.
    """
    cases = discover(root)
    report = SuiteReport(outcomes=[run_case(tc, verbose=verbose, target=target) for tc in cases])
    counts = report.counts
    logger.info(
        f"Итог набора: {len(report.outcomes)} случаев, "
        + ", ".join(f"{key}={value}" for key, value in counts.items())
    )
    return report


def render_report(report: SuiteReport, verbose: bool = False) -> str:
    """
    Текстовый отчёт: строка на случай и итоговая строка.

    В verbose добавляются вывод программы и описание расхождения.
    """
    lines = []
    for outcome in report.outcomes:
        lines.append(f"{outcome.status.value.upper():<8}{outcome.name}")
        if verbose:
            if outcome.diff:
                lines.append(f"    diff: {outcome.diff}")
            if outcome.output:
                lines.extend(f"    | {line}" for line in outcome.output.splitlines())
        elif outcome.status in (CaseStatus.FAIL, CaseStatus.TIMEOUT) and outcome.diff:
            lines.append(f"    {outcome.diff}")

    counts = report.counts
    summary = " ".join(f"{key}={value}" for key, value in counts.items())
    verdict = "PASS" if report.overall_pass else "FAIL"
    lines.append(f"total={len(report.outcomes)} {summary} overall={verdict}")
    if report.flagged:
        lines.append(f"xpass (stale expectation): {', '.join(report.flagged)}")
    return "\n".join(lines) + "\n"
