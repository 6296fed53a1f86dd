"""
Единая точка входа srrt: csw-test, csloop, timings, vsuite.

Коды возврата:
    0 — успех
    1 — проверка не пройдена (cstest или vsuite)
    2 — ошибка командной строки
    3 — ошибка конфигурации
    4 — ошибка рантайма, переключения контекстов или замеров
    5 — ошибка ввода/вывода
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from src.bench import (
    BenchConfig,
    BenchmarkError,
    check_properties,
    normalize_format,
    render_table,
    run_suite as run_timings
)
from src.common import RuntimeSettings, setup_logging
from src.ctxswitch import BackendKind, ContextSwitchError, Fault, run_csloop, run_cstest
from src.runtime import RuntimeSystemError
from src.vsuite import (
    SuiteConfigurationError,
    SuiteIOError,
    Target,
    render_report,
    run_suite as run_vsuite
)

logger = logging.getLogger(__name__)

# Импорт метрик (ленивая инициализация)
try:
    from src.monitoring import dump_metrics, get_bench_metrics
    METRICS_AVAILABLE = True
except ImportError:
    METRICS_AVAILABLE = False

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_RUNTIME = 4
EXIT_IO = 5

BACKEND_CHOICES = ["fast", "portable", "both"]
FORMAT_CHOICES = ["text", "machine-readable", "json"]


def _positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"ожидалось целое число, получено {value!r}")
    if number < 1:
        raise argparse.ArgumentTypeError(f"ожидалось число >= 1, получено {number}")
    return number


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", default=RuntimeSettings.LOG_LEVEL, help="Уровень логирования")
    common.add_argument("--metrics-out", type=Path, help="Записать метрики Prometheus в файл")
    common.add_argument("--verbose", action="store_true", help="Подробный вывод")

    parser = argparse.ArgumentParser(
        prog="srrt",
        description="Рантайм процессов SR: проверки, замеры и verification suite"
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="{csw-test,csloop,timings,vsuite}")

    csw = sub.add_parser("csw-test", parents=[common], help="Проверка переключения контекстов")
    csw.add_argument("--backend", choices=BACKEND_CHOICES, default=RuntimeSettings.DEFAULT_BACKEND)
    csw.add_argument(
        "--fault",
        choices=[fault.value for fault in Fault],
        action="append",
        default=[],
        help="Внедрить неисправность (проверка самого cstest)"
    )

    loop = sub.add_parser("csloop", parents=[common], help="Сырой темп переключений")
    loop.add_argument("--backend", choices=BACKEND_CHOICES, default=RuntimeSettings.DEFAULT_BACKEND)
    loop.add_argument("--seconds", type=_positive_int, default=RuntimeSettings.CSLOOP_SECONDS)

    timings = sub.add_parser("timings", parents=[common], help="Таблица производительности рантайма")
    timings.add_argument("--backend", choices=BACKEND_CHOICES, default="both")
    timings.add_argument("--trials", type=_positive_int, default=RuntimeSettings.BENCH_TRIALS)
    timings.add_argument("--iters", type=_positive_int, default=RuntimeSettings.BENCH_ITERATIONS)
    timings.add_argument(
        "--spawn-iters", type=_positive_int, default=RuntimeSettings.BENCH_SPAWN_ITERATIONS,
        help="Итераций для строк с созданием процессов"
    )
    timings.add_argument("--warmup", type=int, default=RuntimeSettings.BENCH_WARMUP)
    timings.add_argument("--format", choices=FORMAT_CHOICES, default="text")
    timings.add_argument("--out", type=Path, help="Файл для таблицы вместо stdout")

    suite = sub.add_parser("vsuite", parents=[common], help="Verification suite")
    suite.add_argument("--dir", type=Path, default=Path(RuntimeSettings.VSUITE_DIR))
    suite.add_argument("--target", choices=[target.value for target in Target], default=Target.FRESH.value)

    return parser


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """
    Разбор командной строки.

    Ошибки и --help завершают процесс через SystemExit (2 и 0).
    """
    return _build_parser().parse_args(argv)


def _backends(choice: str) -> List[BackendKind]:
    if choice == "both":
        return [BackendKind.FAST, BackendKind.PORTABLE]
    return [BackendKind(choice)]


def _emit(data: bytes, out: Optional[Path] = None):
    if out is not None:
        out.write_bytes(data)
        logger.info(f"✅ Результат записан в {out}")
        return
    sys.stdout.buffer.write(data)
    sys.stdout.flush()


# ===== Подкоманды =====

def _cmd_csw_test(args: argparse.Namespace) -> int:
    faults = [Fault(value) for value in args.fault]
    kinds = _backends(args.backend)
    lines = []
    passed = True
    for kind in kinds:
        report = run_cstest(kind, faults)
        passed = passed and report.passed
        prefix = f"{kind.value}: " if len(kinds) > 1 else ""
        lines.append(f"{prefix}overflow_detected {str(report.overflow_detected).lower()}")
        lines.append(f"{prefix}underflow_detected {str(report.underflow_detected).lower()}")
        lines.append(f"{prefix}switch_order_ok {str(report.switch_order_ok).lower()}")
        if args.verbose:
            for message in report.detail:
                logger.info(f"{kind.value}: {message}")
    _emit(("\n".join(lines) + "\n").encode("utf-8"))
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def _cmd_csloop(args: argparse.Namespace) -> int:
    lines = []
    per_switch = {}
    for kind in _backends(args.backend):
        stats = run_csloop(kind, args.seconds)
        per_switch[kind] = stats.per_switch
        if METRICS_AVAILABLE:
            get_bench_metrics().observe_switch(kind.value, stats.per_switch)
        lines.append(
            f"{kind.value}: {stats.total_switches} switches in {stats.elapsed:.3f} s, "
            f"{stats.per_switch:.4f} us/switch"
        )
    if len(per_switch) == 2:
        ratio = per_switch[BackendKind.PORTABLE] / per_switch[BackendKind.FAST]
        lines.append(f"portable/fast ratio: {ratio:.2f}")
        if ratio < 2:
            logger.warning(f"⚠️ Отношение portable/fast {ratio:.2f} меньше 2")
    _emit(("\n".join(lines) + "\n").encode("utf-8"))
    return EXIT_OK


def _cmd_timings(args: argparse.Namespace) -> int:
    fmt = normalize_format(args.format)
    cfg = BenchConfig(
        iterations_per_trial=args.iters,
        spawn_iterations=args.spawn_iters,
        trials=args.trials,
        warmup_trials=args.warmup,
        backends=set(_backends(args.backend))
    )
    table = run_timings(cfg)
    _emit(render_table(table, fmt), args.out)

    results = check_properties(table)
    failed = [result for result in results if not result.passed]
    logger.info(f"Свойства таблицы: {len(results) - len(failed)} из {len(results)} выполнены")
    return EXIT_OK


def _cmd_vsuite(args: argparse.Namespace) -> int:
    report = run_vsuite(args.dir, verbose=args.verbose, target=Target(args.target))
    _emit(render_report(report, verbose=args.verbose).encode("utf-8"))
    return EXIT_OK if report.overall_pass else EXIT_CHECK_FAILED


COMMANDS = {
    "csw-test": _cmd_csw_test,
    "csloop": _cmd_csloop,
    "timings": _cmd_timings,
    "vsuite": _cmd_vsuite,
}


def execute(args: argparse.Namespace) -> int:
    """
    Исполнение разобранной команды.

    Returns:
        Код возврата (см. описание модуля)
    """
    setup_logging(args.log_level, RuntimeSettings.LOG_FILE)

    is_valid, message = RuntimeSettings.validate()
    if not is_valid:
        logger.error(f"Ошибка конфигурации: {message}")
        logger.error("Проверьте файл .env и переменные SRRT_*")
        return EXIT_CONFIG
    if message:
        logger.warning(message)
    if args.verbose:
        RuntimeSettings.print_config()

    try:
        code = COMMANDS[args.command](args)
    except (SuiteConfigurationError, ValidationError) as e:
        logger.error(f"❌ Ошибка конфигурации: {e}")
        code = EXIT_CONFIG
    except (SuiteIOError, OSError) as e:
        logger.error(f"❌ Ошибка ввода/вывода: {e}")
        code = EXIT_IO
    except (ContextSwitchError, RuntimeSystemError, BenchmarkError) as e:
        logger.error(f"❌ Ошибка рантайма: {e}", exc_info=True)
        code = EXIT_RUNTIME
    except Exception as e:
        logger.error(f"❌ Непредвиденная ошибка: {e}", exc_info=True)
        code = EXIT_RUNTIME

    if args.metrics_out is not None and METRICS_AVAILABLE:
        if not dump_metrics(args.metrics_out) and code == EXIT_OK:
            code = EXIT_IO
    return code


def main(argv: Optional[List[str]] = None) -> int:
    """Разбор аргументов и исполнение; SystemExit argparse превращается в код возврата."""
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    return execute(args)
