"""
Сценарии для рантайма.

1. Маленький язык программ процессов (инструкции-кортежи), который
   рантайм исполняет внутри процессов, а runtime.simulator — явным
   автоматом состояний. Трассы обоих исполнителей должны совпадать.
2. Генератор случайных программ на 2-3 процесса.
3. Реестр именованных сценариев с логическими трассами для vsuite.

Инструкции:
    ("yield",)            уступить процессор
    ("P", s) / ("V", s)   операции над семафором s
    ("send", q, value)    асинхронная отправка в очередь q
    ("recv", q)           приём из очереди q
    ("call", q, value)    rendezvous-вызов через очередь q
    ("accept", q)         принять вызов из очереди q
    ("reply", delta)      ответить на принятый вызов значением payload + delta
    ("spawn", k)          создать процесс с программой k
    ("join",)             дождаться последнего созданного потомка
"""

import random
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from src.ctxswitch import BackendKind, run_cstest
from .events import Event
from .models import OperationQueue, Semaphore
from .scheduler import Runtime

Instr = Tuple[Any, ...]
Program = List[Instr]


class Scenario:
    """Набор программ, начальные процессы и начальные значения семафоров."""

    def __init__(
        self,
        programs: Sequence[Program],
        initial: Sequence[int],
        semaphores: Sequence[int] = (0, 0),
        queues: int = 2,
        name: str = "scenario"
    ):
        self.programs = [list(program) for program in programs]
        self.initial = list(initial)
        self.semaphores = list(semaphores)
        self.queues = queues
        self.name = name

    def __repr__(self) -> str:
        return f"Scenario({self.name!r}, programs={self.programs}, initial={self.initial})"


class ScenarioResult:
    """Трасса и счётчики одного прогона сценария."""

    def __init__(self, events: List[Event], sends: int, receives: int, remaining: int,
                 calls: int, accepts: int, replies: int):
        self.events = events
        self.sends = sends
        self.receives = receives
        self.remaining = remaining
        self.calls = calls
        self.accepts = accepts
        self.replies = replies


StepHook = Callable[[Runtime, List[Semaphore], List[OperationQueue]], None]


def run_scenario(
    scenario: Scenario,
    backend: BackendKind = BackendKind.FAST,
    on_step: Optional[StepHook] = None
) -> ScenarioResult:
    """
    Исполнение сценария рантаймом с журналом событий.

    Args:
        scenario: Программы процессов
        backend: Реализация переключения
        on_step: Вызывается после каждой инструкции (для проверки инвариантов)

    Returns:
        ScenarioResult с трассой и счётчиками сообщений и вызовов
    """
    rt = Runtime(backend, trace=True)
    sems = [Semaphore(count) for count in scenario.semaphores]
    queues = [OperationQueue(f"q{index}") for index in range(scenario.queues)]
    counters = {"sends": 0, "receives": 0, "calls": 0, "accepts": 0, "replies": 0}
    record = rt.trace.record

    def make_body(program_index: int) -> Callable[[Any], None]:
        def body(_arg):
            pid = rt.current_pid
            last_child = None
            inv = None
            for instr in scenario.programs[program_index]:
                op = instr[0]
                if op == "yield":
                    rt.yield_now()
                elif op == "P":
                    rt.sem_p(sems[instr[1]])
                elif op == "V":
                    rt.sem_v(sems[instr[1]])
                elif op == "send":
                    counters["sends"] += 1
                    rt.op_send(queues[instr[1]], instr[2])
                elif op == "recv":
                    value = rt.op_receive(queues[instr[1]])
                    counters["receives"] += 1
                    record("recv", pid, value)
                elif op == "call":
                    counters["calls"] += 1
                    value = rt.op_call(queues[instr[1]], instr[2])
                    record("result", pid, value)
                elif op == "accept":
                    inv = rt.op_accept(queues[instr[1]])
                    counters["accepts"] += 1
                    record("accept", pid, inv.payload)
                elif op == "reply":
                    rt.op_reply(inv, inv.payload + instr[1])
                    counters["replies"] += 1
                    inv = None
                elif op == "spawn":
                    last_child = rt.spawn(make_body(instr[1]))
                elif op == "join":
                    rt.join(last_child)
                else:
                    raise ValueError(f"Неизвестная инструкция: {instr!r}")
                if on_step is not None:
                    on_step(rt, sems, queues)
        return body

    for program_index in scenario.initial:
        rt.spawn(make_body(program_index))
    rt.run()

    remaining = sum(len(queue.messages) for queue in queues)
    return ScenarioResult(rt.trace.events, remaining=remaining, **counters)


# ===== Генератор случайных сценариев =====

def _random_program(rng: random.Random, length: int, values: List[int], allow_spawn: bool,
                    child_slots: List[Program]) -> Program:
    program: Program = []
    spawned = False
    while len(program) < length:
        roll = rng.random()
        if roll < 0.15:
            program.append(("yield",))
        elif roll < 0.30:
            program.append(("P", rng.randrange(2)))
        elif roll < 0.45:
            program.append(("V", rng.randrange(2)))
        elif roll < 0.58:
            values[0] += 1
            program.append(("send", rng.randrange(2), values[0]))
        elif roll < 0.70:
            program.append(("recv", rng.randrange(2)))
        elif roll < 0.80:
            values[0] += 1
            program.append(("call", rng.randrange(2), values[0]))
        elif roll < 0.90:
            program.append(("accept", rng.randrange(2)))
            program.append(("reply", rng.randrange(1, 10)))
        elif allow_spawn and not spawned:
            child = _random_program(rng, rng.randint(1, 3), values, False, child_slots)
            child_slots.append(child)
            # Индекс исправляется после сборки: дети идут после начальных программ
            program.append(("spawn", -len(child_slots)))
            program.append(("join",))
            spawned = True
        else:
            program.append(("yield",))
    return program


def random_scenario(rng: random.Random, processes: Optional[int] = None,
                    max_length: int = 6) -> Scenario:
    """
    Случайный сценарий на 2 или 3 начальных процесса.

    Программы корректны по построению: reply следует сразу за accept,
    join — сразу за spawn. Взаимные блокировки допустимы и заканчиваются
    событием halt с перечнем заблокированных процессов.
    """
    count = processes or rng.choice((2, 3))
    values = [0]
    children: List[Program] = []
    initial_programs = [
        _random_program(rng, rng.randint(1, max_length), values, True, children)
        for _ in range(count)
    ]
    programs = initial_programs + children
    fixed: List[Program] = []
    for program in programs:
        fixed.append([
            ("spawn", count - instr[1] - 1) if instr[0] == "spawn" else instr
            for instr in program
        ])
    return Scenario(
        fixed,
        initial=list(range(count)),
        semaphores=[rng.randint(0, 1), rng.randint(0, 1)],
        queues=2,
        name=f"random-{count}"
    )


# ===== Именованные сценарии для vsuite =====

def _scenario_scheduler_order(backend: BackendKind) -> List[str]:
    rt = Runtime(backend)
    lines: List[str] = []

    def worker(name):
        for step in range(3):
            lines.append(f"{name}{step}")
            rt.yield_now()

    for name in "ABC":
        rt.spawn(worker, name)
    rt.run()
    return [" ".join(lines)]


def _scenario_semaphore_trace(backend: BackendKind) -> List[str]:
    rt = Runtime(backend)
    empty, full = Semaphore(1), Semaphore(0)
    slot: List[int] = []
    lines: List[str] = []

    def producer(count):
        for item in range(count):
            rt.sem_p(empty)
            slot.append(item)
            lines.append(f"produce {item}")
            rt.sem_v(full)

    def consumer(count):
        for _ in range(count):
            rt.sem_p(full)
            lines.append(f"consume {slot.pop()}")
            rt.sem_v(empty)

    rt.spawn(consumer, 4)
    rt.spawn(producer, 4)
    rt.run()
    lines.append(f"final empty={empty.count} full={full.count}")
    return lines


def _scenario_message_fifo(backend: BackendKind) -> List[str]:
    rt = Runtime(backend)
    queue = OperationQueue("mailbox")
    lines: List[str] = []

    def receiver(count):
        for _ in range(count):
            lines.append(f"recv {rt.op_receive(queue)}")

    def sender(words):
        for word in words:
            rt.op_send(queue, word)
            lines.append(f"send {word}")
        rt.yield_now()

    rt.spawn(receiver, 5)
    rt.spawn(sender, ["alpha", "beta", "gamma", "delta", "epsilon"])
    rt.run()
    lines.append(f"left {len(queue.messages)}")
    return lines


def _scenario_rendezvous_echo(backend: BackendKind) -> List[str]:
    rt = Runtime(backend)
    queue = OperationQueue("echo")
    lines: List[str] = []

    def server(count):
        for _ in range(count):
            inv = rt.op_accept(queue)
            lines.append(f"accept {inv.payload} from {inv.caller}")
            rt.op_reply(inv, inv.payload.upper())

    def client(word):
        lines.append(f"reply {rt.op_call(queue, word)}")

    rt.spawn(server, 3)
    for word in ("ping", "pong", "done"):
        rt.spawn(client, word)
    rt.run()
    return lines


def _scenario_create_join(backend: BackendKind) -> List[str]:
    rt = Runtime(backend)
    lines: List[str] = []
    resource = rt.create_resource("arith", {"inc": lambda x: x + 1})
    rt.serve(resource, "double", lambda x: 2 * x)

    def main(_arg):
        before = rt.census()
        lines.append(f"new-process inc(1) = {rt.call_proc_new_process(resource, 'inc', 1)}")
        lines.append(f"served double(21) = {rt.call_proc_served(resource, 'double', 21)}")
        child = rt.spawn(lambda _a: None)
        rt.join(child)
        rt.join(child)
        lines.append(f"census delta {rt.census() - before}")
        lines.append(f"child state {rt.state_of(child).value}")

    rt.run(main)
    return lines


def _scenario_cstest(backend: BackendKind) -> List[str]:
    report = run_cstest(backend)
    return [
        f"overflow_detected {report.overflow_detected}",
        f"underflow_detected {report.underflow_detected}",
        f"switch_order_ok {report.switch_order_ok}",
    ]


SCENARIOS: Dict[str, Callable[[BackendKind], List[str]]] = {
    "scheduler_order": _scenario_scheduler_order,
    "semaphore_trace": _scenario_semaphore_trace,
    "message_fifo": _scenario_message_fifo,
    "rendezvous_echo": _scenario_rendezvous_echo,
    "create_join": _scenario_create_join,
    "cstest": _scenario_cstest,
}


def run_named_scenario(name: str, backend: BackendKind = BackendKind.FAST) -> List[str]:
    """
    Исполнение именованного сценария.

    Raises:
        KeyError: Неизвестный сценарий
    """
    try:
        scenario = SCENARIOS[name]
    except KeyError:
        raise KeyError(f"Неизвестный сценарий: {name}") from None
    return scenario(BackendKind(backend))
