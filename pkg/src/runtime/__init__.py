"""
Рантайм процессов SR: планировщик, семафоры, операции и ресурсы.
"""

from .events import Event, EventTrace, NO_PID
from .exceptions import (
    CapacityError,
    DeadlockError,
    InvalidStateError,
    NotFoundError,
    ProcessFailedError,
    RuntimeSystemError
)
from .models import Invocation, Message, OperationQueue, Process, ProcessState, Resource, Semaphore
from .scenarios import (
    SCENARIOS,
    Scenario,
    ScenarioResult,
    random_scenario,
    run_named_scenario,
    run_scenario
)
from .scheduler import Runtime
from .simulator import Simulator, simulate

__all__ = [
    "Event",
    "EventTrace",
    "NO_PID",
    "CapacityError",
    "DeadlockError",
    "InvalidStateError",
    "NotFoundError",
    "ProcessFailedError",
    "RuntimeSystemError",
    "Invocation",
    "Message",
    "OperationQueue",
    "Process",
    "ProcessState",
    "Resource",
    "Semaphore",
    "SCENARIOS",
    "Scenario",
    "ScenarioResult",
    "random_scenario",
    "run_named_scenario",
    "run_scenario",
    "Runtime",
    "Simulator",
    "simulate",
]
