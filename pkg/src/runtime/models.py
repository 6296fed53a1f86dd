"""
Объекты рантайма: процессы, семафоры, очереди операций, ресурсы.
"""

from collections import deque
from enum import Enum
from typing import Any, Callable, Deque, Dict, List, Optional, TYPE_CHECKING

if TYPE_CHECKING:
    from src.ctxswitch import Context


class ProcessState(str, Enum):
    """Состояние процесса."""
    READY = "ready"
    RUNNING = "running"
    BLOCKED = "blocked"
    DEAD = "dead"


class Process:
    """Легковесный процесс, исполняемый планировщиком на своём контексте."""

    __slots__ = (
        "pid", "name", "entry", "arg", "context", "state",
        "join_waiters", "result", "error", "mailbox"
    )

    def __init__(self, pid: int, entry: Callable[[Any], Any], arg: Any = None, name: Optional[str] = None):
        self.pid = pid
        self.name = name or f"p{pid}"
        self.entry = entry
        self.arg = arg
        self.context: Optional["Context"] = None
        self.state = ProcessState.READY
        self.join_waiters: Deque["Process"] = deque()
        self.result: Any = None
        self.error: Optional[BaseException] = None
        # Сюда send/call кладут полезную нагрузку для разбуженного процесса
        self.mailbox: Any = None

    def __repr__(self) -> str:
        return f"Process({self.pid}, {self.state.value})"


class Semaphore:
    """Семафор со счётчиком и FIFO-очередью ожидающих."""

    __slots__ = ("count", "waiters")

    def __init__(self, count: int = 0):
        if count < 0:
            raise ValueError(f"Начальное значение семафора не может быть отрицательным: {count}")
        self.count = count
        self.waiters: Deque[Process] = deque()

    @property
    def waiter_pids(self) -> List[int]:
        return [proc.pid for proc in self.waiters]


class Invocation:
    """Вызов rendezvous: вызывающий ждёт, пока сервер не ответит."""

    __slots__ = ("caller", "payload", "reply", "replied", "acceptor", "_caller_proc")

    def __init__(self, caller: Process, payload: Any):
        self.caller = caller.pid
        self.payload = payload
        self.reply: Any = None
        self.replied = False
        self.acceptor: Optional[int] = None
        self._caller_proc = caller


class Message:
    """Запись асинхронного вызова: отправитель, порядковый номер, полезная нагрузка."""

    __slots__ = ("sender", "seq", "payload")

    def __init__(self, sender: int, seq: int, payload: Any):
        self.sender = sender
        self.seq = seq
        self.payload = payload

    def __repr__(self) -> str:
        return f"Message({self.sender}#{self.seq}, {self.payload!r})"


class OperationQueue:
    """
    Очередь операции: асинхронные сообщения и вызовы rendezvous.

    messages и receivers никогда не бывают непустыми одновременно;
    то же для invocations и acceptors.
    """

    __slots__ = ("name", "messages", "receivers", "invocations", "acceptors", "sent")

    def __init__(self, name: str = "op"):
        self.name = name
        self.messages: Deque[Message] = deque()
        self.receivers: Deque[Process] = deque()
        self.invocations: Deque[Invocation] = deque()
        self.acceptors: Deque[Process] = deque()
        self.sent = 0

    @property
    def receiver_pids(self) -> List[int]:
        return [proc.pid for proc in self.receivers]

    @property
    def pending_payloads(self) -> List[Any]:
        return [message.payload for message in self.messages]


class Resource:
    """Ресурс SR: таблица proc и серверные операции."""

    def __init__(self, rid: int, name: str, procs: Optional[Dict[str, Callable[[Any], Any]]] = None):
        self.rid = rid
        self.name = name
        self.procs: Dict[str, Callable[[Any], Any]] = dict(procs or {})
        self.server_ops: Dict[str, OperationQueue] = {}
        self.handlers: Dict[str, Callable[[Any], Any]] = {}
