"""
Эталонный исполнитель сценариев без переключения контекстов.

Процессы представлены счётчиком команд и ожидаемым завершением
блокирующей операции. Правила очереди готовых и порядок событий
совпадают с Runtime, поэтому журнал симулятора служит оракулом для
трасс run_scenario на любом backend.
"""

from collections import deque
from typing import Any, Deque, Dict, List, Optional

from .events import Event, EventTrace, NO_PID
from .scenarios import Scenario


class _SimInvocation:
    __slots__ = ("caller", "payload", "reply")

    def __init__(self, caller: int, payload: Any):
        self.caller = caller
        self.payload = payload
        self.reply: Any = None


class _SimProcess:
    __slots__ = ("pid", "program", "pc", "pending", "mailbox", "inv", "last_child", "join_waiters")

    def __init__(self, pid: int, program: list):
        self.pid = pid
        self.program = program
        self.pc = 0
        self.pending: Optional[str] = None
        self.mailbox: Any = None
        self.inv: Optional[_SimInvocation] = None
        self.last_child: Optional[int] = None
        self.join_waiters: Deque[int] = deque()


class _SimQueue:
    __slots__ = ("messages", "receivers", "invocations", "acceptors")

    def __init__(self):
        self.messages: Deque[Any] = deque()
        self.receivers: Deque[int] = deque()
        self.invocations: Deque[_SimInvocation] = deque()
        self.acceptors: Deque[int] = deque()


class Simulator:
    """Явный автомат состояний для сценариев Scenario."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.trace = EventTrace()
        self.procs: Dict[int, _SimProcess] = {}
        self.ready: Deque[int] = deque()
        self.counts = list(scenario.semaphores)
        self.sem_waiters: List[Deque[int]] = [deque() for _ in scenario.semaphores]
        self.queues = [_SimQueue() for _ in range(scenario.queues)]
        self.next_pid = 0

    # ===== Примитивы =====

    def _spawn(self, program_index: int) -> int:
        pid = self.next_pid
        self.next_pid += 1
        self.procs[pid] = _SimProcess(pid, self.scenario.programs[program_index])
        self.ready.append(pid)
        self.trace.record("spawn", pid)
        return pid

    def _wake(self, pid: int):
        self.ready.append(pid)
        self.trace.record("wake", pid)

    def _block(self, proc: _SimProcess, reason: str):
        proc.pending = reason
        self.trace.record("block", proc.pid, reason)

    def _die(self, proc: _SimProcess):
        del self.procs[proc.pid]
        self.trace.record("death", proc.pid)
        while proc.join_waiters:
            self._wake(proc.join_waiters.popleft())

    def _complete(self, proc: _SimProcess):
        """Завершение блокирующей операции после повторного запуска."""
        reason, proc.pending = proc.pending, None
        if reason == "receive":
            value, proc.mailbox = proc.mailbox, None
            self.trace.record("recv", proc.pid, value)
        elif reason == "call":
            inv, proc.mailbox = proc.mailbox, None
            self.trace.record("result", proc.pid, inv.reply)
        elif reason == "accept":
            proc.inv, proc.mailbox = proc.mailbox, None
            self.trace.record("accept", proc.pid, proc.inv.payload)

    # ===== Исполнение =====

    def _step(self, proc: _SimProcess):
        """Исполнять процесс до блокировки, уступки или завершения."""
        if proc.pending is not None:
            self._complete(proc)
        pid = proc.pid
        while proc.pc < len(proc.program):
            instr = proc.program[proc.pc]
            proc.pc += 1
            op = instr[0]
            if op == "yield":
                if self.ready:
                    self.ready.append(pid)
                    return
            elif op == "P":
                index = instr[1]
                if self.counts[index] > 0:
                    self.counts[index] -= 1
                else:
                    self.sem_waiters[index].append(pid)
                    self._block(proc, "P")
                    return
            elif op == "V":
                index = instr[1]
                if self.sem_waiters[index]:
                    self._wake(self.sem_waiters[index].popleft())
                else:
                    self.counts[index] += 1
            elif op == "send":
                queue = self.queues[instr[1]]
                if queue.receivers:
                    receiver = queue.receivers.popleft()
                    self.procs[receiver].mailbox = instr[2]
                    self._wake(receiver)
                else:
                    queue.messages.append(instr[2])
            elif op == "recv":
                queue = self.queues[instr[1]]
                if queue.messages:
                    self.trace.record("recv", pid, queue.messages.popleft())
                else:
                    queue.receivers.append(pid)
                    self._block(proc, "receive")
                    return
            elif op == "call":
                queue = self.queues[instr[1]]
                inv = _SimInvocation(pid, instr[2])
                proc.mailbox = inv
                if queue.acceptors:
                    server = queue.acceptors.popleft()
                    self.procs[server].mailbox = inv
                    self._wake(server)
                else:
                    queue.invocations.append(inv)
                self._block(proc, "call")
                return
            elif op == "accept":
                queue = self.queues[instr[1]]
                if queue.invocations:
                    proc.inv = queue.invocations.popleft()
                    self.trace.record("accept", pid, proc.inv.payload)
                else:
                    queue.acceptors.append(pid)
                    self._block(proc, "accept")
                    return
            elif op == "reply":
                inv, proc.inv = proc.inv, None
                inv.reply = inv.payload + instr[1]
                self._wake(inv.caller)
            elif op == "spawn":
                proc.last_child = self._spawn(instr[1])
            elif op == "join":
                target = self.procs.get(proc.last_child)
                if target is not None:
                    target.join_waiters.append(pid)
                    self._block(proc, "join")
                    return
            else:
                raise ValueError(f"Неизвестная инструкция: {instr!r}")
        self._die(proc)

    def run(self) -> List[Event]:
        """Прогон сценария до опустошения очереди готовых."""
        for program_index in self.scenario.initial:
            self._spawn(program_index)
        while self.ready:
            proc = self.procs[self.ready.popleft()]
            self.trace.record("dispatch", proc.pid)
            self._step(proc)
        self.trace.record("halt", NO_PID, tuple(sorted(self.procs)))
        return self.trace.events

    @property
    def remaining_messages(self) -> int:
        return sum(len(queue.messages) for queue in self.queues)


def simulate(scenario: Scenario) -> List[Event]:
    """Журнал событий эталонного исполнения сценария."""
    return Simulator(scenario).run()
