"""
Запуск именованного сценария рантайма с выводом логической трассы.

Использование:
    python -m src.vsuite.scenario_runner semaphore_trace --backend portable
"""

import argparse
import logging
import sys
from typing import List, Optional

from src.ctxswitch import BackendKind
from src.runtime.scenarios import SCENARIOS, run_named_scenario


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="scenario_runner",
        description="Логическая трасса именованного сценария рантайма"
    )
    parser.add_argument("name", choices=sorted(SCENARIOS), help="Имя сценария")
    parser.add_argument(
        "--backend",
        choices=[kind.value for kind in BackendKind],
        default=BackendKind.FAST.value,
        help="Реализация переключения контекстов"
    )
    args = parser.parse_args(argv)

    # В stdout только трасса
    logging.basicConfig(level=logging.WARNING, stream=sys.stderr)

    for line in run_named_scenario(args.name, BackendKind(args.backend)):
        sys.stdout.write(line + "\n")
    sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
