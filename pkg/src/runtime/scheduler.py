"""
Кооперативный планировщик и примитивы SR: процессы, семафоры,
асинхронные операции, rendezvous и межресурсные вызовы.

Все процессы одного Runtime живут в одном потоке ОС. Пробуждение
ставит процесс в хвост очереди готовых и не передаёт ему управление
немедленно: переключение происходит только при блокировке, yield или
завершении текущего процесса.
"""

import logging
from collections import deque
from typing import Any, Callable, Deque, Dict, List, Optional

import greenlet

from src.common.config import RuntimeSettings
from src.ctxswitch import BackendKind, Context, StackDescriptor, alloc_stack, make_backend
from .events import EventTrace, NO_PID
from .exceptions import (
    CapacityError,
    DeadlockError,
    InvalidStateError,
    NotFoundError,
    ProcessFailedError
)
from .models import Invocation, Message, OperationQueue, Process, ProcessState, Resource, Semaphore

logger = logging.getLogger(__name__)

# Импорт метрик (ленивая инициализация)
try:
    from src.monitoring import get_runtime_metrics
    METRICS_AVAILABLE = True
except ImportError:
    METRICS_AVAILABLE = False
    logger.warning("Модуль мониторинга недоступен, метрики отключены")


class Runtime:
    """Планировщик процессов поверх одного backend переключения."""

    def __init__(
        self,
        backend: BackendKind = BackendKind.FAST,
        diagnostic: Optional[bool] = None,
        trace: bool = False,
        max_processes: Optional[int] = None,
        stack_size: Optional[int] = None,
        canary_len: Optional[int] = None
    ):
        """
        Инициализация рантайма.

        Args:
            backend: Реализация переключения контекстов
            diagnostic: Проверка канареек на каждом переключении (по умолчанию из настроек)
            trace: Вести журнал событий планировщика
            max_processes: Лимит одновременно живых процессов
            stack_size: Размер стека процесса
            canary_len: Размер защитной области стека
        """
        self.kind = BackendKind(backend)
        self.diagnostic = RuntimeSettings.DIAGNOSTIC if diagnostic is None else diagnostic
        self.backend = make_backend(self.kind, diagnostic=self.diagnostic)
        self.trace: Optional[EventTrace] = EventTrace() if trace else None
        self.max_processes = max_processes or RuntimeSettings.MAX_PROCESSES
        self.stack_size = stack_size or RuntimeSettings.STACK_SIZE
        self.canary_len = canary_len or RuntimeSettings.CANARY_LEN

        self._processes: Dict[int, Process] = {}
        self._ready: Deque[Process] = deque()
        self._current: Optional[Process] = None
        self._free_stacks: List[StackDescriptor] = []
        self._dead_pending: List[Process] = []
        self._resources: Dict[str, Resource] = {}
        self._next_pid = 0
        self._next_rid = 0
        self._running = False
        self._escaped: Optional[BaseException] = None

        # Счётчики для метрик
        self.spawned = 0
        self.reaped = 0
        self.blocks = 0
        self._reported = {"switches": 0, "spawned": 0, "reaped": 0, "blocks": 0}

        self._reaper = self.backend.make_context(
            self._new_stack(), self._reaper_loop, name="reaper"
        )
        self.backend.reaper = self._reaper

        logger.debug(f"Runtime создан: backend={self.kind.value}, diagnostic={self.diagnostic}")

    # ===== Свойства планировщика =====

    @property
    def current_pid(self) -> Optional[int]:
        return self._current.pid if self._current else None

    @property
    def ready_pids(self) -> List[int]:
        return [proc.pid for proc in self._ready]

    def census(self) -> int:
        """Число живых (не завершённых) процессов."""
        return len(self._processes)

    def state_of(self, pid: int) -> ProcessState:
        """Состояние процесса; у завершённых процессов DEAD."""
        proc = self._processes.get(pid)
        if proc is not None:
            return proc.state
        if 0 <= pid < self._next_pid:
            return ProcessState.DEAD
        raise NotFoundError(f"Процесс {pid} не существует")

    # ===== Запуск =====

    def run(self, main: Optional[Callable[[Any], Any]] = None, arg: Any = None) -> Any:
        """
        Исполнять процессы, пока есть готовые к запуску.

        Args:
            main: Главный процесс (необязательно)
            arg: Аргумент главного процесса

        Returns:
            Результат main, если он был передан

        Raises:
            DeadlockError: main остался заблокированным
            ProcessFailedError: main завершился исключением
            BaseException: SystemExit/KeyboardInterrupt из тела процесса;
                планирование останавливается, оставшиеся готовые ждут следующего run()
        """
        if self._running:
            raise InvalidStateError("Runtime уже запущен")

        main_proc = None
        if main is not None:
            main_proc = self._processes[self.spawn(main, arg, name="main")]

        self._running = True
        try:
            self.backend.swap(self.backend.root, self._reaper)
        finally:
            self._running = False
            self._current = None

        if self.trace is not None:
            self.trace.record("halt", NO_PID, tuple(sorted(self._processes)))
        self._report_metrics()

        if self._escaped is not None:
            escaped, self._escaped = self._escaped, None
            raise escaped

        if main_proc is None:
            return None
        if main_proc.error is not None:
            raise ProcessFailedError(f"Главный процесс упал: {main_proc.error}") from main_proc.error
        if main_proc.state != ProcessState.DEAD:
            blocked = sorted(self._processes)
            raise DeadlockError(f"Главный процесс заблокирован, готовых нет; живые: {blocked}")
        return main_proc.result

    def _reaper_loop(self, _arg):
        """Уборка завершённых процессов и выбор следующего."""
        while True:
            while self._dead_pending:
                proc = self._dead_pending.pop()
                stack = proc.context.stack
                stack.recycle()
                self._free_stacks.append(stack)
                proc.context = None
                self.reaped += 1
            if self._ready and self._escaped is None:
                self._switch_to(self._reaper, self._ready.popleft())
            else:
                self._current = None
                self.backend.swap(self._reaper, self.backend.root)

    def _process_main(self, proc: Process):
        try:
            proc.result = proc.entry(proc.arg)
        except greenlet.GreenletExit:
            raise
        except Exception as e:
            proc.error = e
            logger.error(f"❌ Процесс {proc.name} завершился ошибкой: {e}", exc_info=True)
        except BaseException as e:
            # SystemExit, KeyboardInterrupt: процесс умирает, run() поднимает их у вызывающего
            proc.error = e
            if self._escaped is None:
                self._escaped = e
            logger.warning(f"⚠️ Процесс {proc.name} прерван {type(e).__name__}, планирование остановлено")

        proc.state = ProcessState.DEAD
        del self._processes[proc.pid]
        if self.trace is not None:
            self.trace.record("death", proc.pid)
        while proc.join_waiters:
            self._wake(proc.join_waiters.popleft())
        self._dead_pending.append(proc)
        self._current = None
        # Возврат отдаёт управление reaper

    # ===== Переключение =====

    def _new_stack(self) -> StackDescriptor:
        try:
            return alloc_stack(self.stack_size, self.canary_len)
        except MemoryError as e:
            raise CapacityError(f"Не удалось выделить стек {self.stack_size} байт") from e

    def _require_current(self) -> Process:
        proc = self._current
        if proc is None:
            raise InvalidStateError("Операция доступна только из процесса рантайма")
        return proc

    def _switch_to(self, from_ctx: Context, proc: Process):
        proc.state = ProcessState.RUNNING
        self._current = proc
        if self.trace is not None:
            self.trace.record("dispatch", proc.pid)
        self.backend.swap(from_ctx, proc.context)

    def _wake(self, proc: Process):
        proc.state = ProcessState.READY
        self._ready.append(proc)
        if self.trace is not None:
            self.trace.record("wake", proc.pid)

    def _block(self, proc: Process, reason: str):
        proc.state = ProcessState.BLOCKED
        self.blocks += 1
        if self.trace is not None:
            self.trace.record("block", proc.pid, reason)
        if self._ready:
            self._switch_to(proc.context, self._ready.popleft())
        else:
            # Готовых нет: возвращаемся в run()
            self._current = None
            self.backend.swap(proc.context, self.backend.root)

    # ===== Процессы =====

    def spawn(self, entry: Callable[[Any], Any], arg: Any = None, name: Optional[str] = None) -> int:
        """
        Создание процесса в состоянии ready в хвосте очереди готовых.

        Raises:
            CapacityError: Лимит процессов или нехватка памяти под стек
        """
        if len(self._processes) >= self.max_processes:
            raise CapacityError(f"Превышен лимит процессов: {self.max_processes}")

        stack = self._free_stacks.pop() if self._free_stacks else self._new_stack()
        pid = self._next_pid
        self._next_pid += 1
        proc = Process(pid, entry, arg, name)
        proc.context = self.backend.make_context(stack, self._process_main, proc, name=proc.name)
        self._processes[pid] = proc
        self._ready.append(proc)
        self.spawned += 1
        if self.trace is not None:
            self.trace.record("spawn", pid)
        return pid

    def join(self, pid: int):
        """
        Дождаться завершения процесса pid.

        Raises:
            DeadlockError: join самого себя
            NotFoundError: pid никогда не существовал
        """
        me = self._require_current()
        if pid == me.pid:
            raise DeadlockError(f"Процесс {pid} не может ждать сам себя")
        target = self._processes.get(pid)
        if target is None:
            if 0 <= pid < self._next_pid:
                return
            raise NotFoundError(f"Процесс {pid} не существует")
        target.join_waiters.append(me)
        self._block(me, "join")

    def yield_now(self):
        """Уступить процессор голове очереди готовых; при пустой очереди продолжить."""
        me = self._require_current()
        if not self._ready:
            return
        me.state = ProcessState.READY
        self._ready.append(me)
        self._switch_to(me.context, self._ready.popleft())

    # ===== Семафоры =====

    def sem_p(self, s: Semaphore):
        """P: уменьшить счётчик или заблокироваться до парного V."""
        if s.count > 0:
            s.count -= 1
            return
        me = self._require_current()
        s.waiters.append(me)
        self._block(me, "P")

    def sem_v(self, s: Semaphore):
        """V: разбудить первого ожидающего или увеличить счётчик. Без переключения."""
        if s.waiters:
            self._wake(s.waiters.popleft())
        else:
            s.count += 1

    # ===== Асинхронные операции =====

    def op_send(self, q: OperationQueue, msg: Any):
        """
        Неблокирующая отправка.

        Строит запись сообщения (отправитель, номер в очереди) и отдаёт её
        ждущему получателю или кладёт в очередь.
        """
        q.sent += 1
        message = Message(self._current.pid if self._current is not None else NO_PID, q.sent, msg)
        if q.receivers:
            receiver = q.receivers.popleft()
            receiver.mailbox = message
            self._wake(receiver)
        else:
            q.messages.append(message)

    def op_receive(self, q: OperationQueue) -> Any:
        """Взять полезную нагрузку первого сообщения или заблокироваться до отправки."""
        if q.messages:
            return q.messages.popleft().payload
        me = self._require_current()
        q.receivers.append(me)
        self._block(me, "receive")
        message, me.mailbox = me.mailbox, None
        return message.payload

    # ===== Rendezvous =====

    def op_call(self, q: OperationQueue, payload: Any) -> Any:
        """Синхронный вызов: ждать, пока сервер примет вызов и ответит."""
        me = self._require_current()
        inv = Invocation(me, payload)
        if q.acceptors:
            server = q.acceptors.popleft()
            inv.acceptor = server.pid
            server.mailbox = inv
            self._wake(server)
        else:
            q.invocations.append(inv)
        self._block(me, "call")
        return inv.reply

    def op_accept(self, q: OperationQueue) -> Invocation:
        """Серверная сторона: взять первый вызов или ждать его."""
        me = self._require_current()
        if q.invocations:
            inv = q.invocations.popleft()
            inv.acceptor = me.pid
            return inv
        q.acceptors.append(me)
        self._block(me, "accept")
        inv, me.mailbox = me.mailbox, None
        return inv

    def op_reply(self, inv: Invocation, reply: Any):
        """
        Ответ на принятый вызов; сервер продолжает работу без переключения.

        Raises:
            InvalidStateError: Повторный ответ, ответ на непринятый вызов
                или ответ не из принявшего процесса
        """
        if inv.replied:
            raise InvalidStateError(f"На вызов от процесса {inv.caller} уже ответили")
        if inv.acceptor is None:
            raise InvalidStateError(f"Вызов от процесса {inv.caller} ещё никем не принят")
        if self._current is not None and inv.acceptor != self._current.pid:
            raise InvalidStateError(
                f"Отвечать должен принявший процесс {inv.acceptor}, а не {self._current.pid}"
            )
        inv.reply = reply
        inv.replied = True
        self._wake(inv._caller_proc)

    # ===== Ресурсы =====

    def create_resource(self, name: str, procs: Optional[Dict[str, Callable[[Any], Any]]] = None) -> Resource:
        """Регистрация ресурса с таблицей proc."""
        if name in self._resources:
            raise InvalidStateError(f"Ресурс {name} уже существует")
        resource = Resource(self._next_rid, name, procs)
        self._next_rid += 1
        self._resources[name] = resource
        return resource

    def serve(self, resource: Resource, op_name: str, handler: Callable[[Any], Any]) -> int:
        """
        Долгоживущий серверный процесс: accept -> reply(handler(payload)) в цикле.

        Returns:
            pid серверного процесса
        """
        queue = OperationQueue(f"{resource.name}.{op_name}")
        resource.server_ops[op_name] = queue
        resource.handlers[op_name] = handler

        def server(_arg):
            accept, reply = self.op_accept, self.op_reply
            while True:
                inv = accept(queue)
                reply(inv, handler(inv.payload))

        return self.spawn(server, name=f"{resource.name}.{op_name}.server")

    def call_proc_new_process(self, r: Resource, proc_name: str, arg: Any) -> Any:
        """
        Межресурсный вызов с созданием процесса под тело proc.

        Raises:
            NotFoundError: proc_name нет в ресурсе
            ProcessFailedError: Тело proc завершилось исключением
        """
        body = r.procs.get(proc_name)
        if body is None:
            raise NotFoundError(f"В ресурсе {r.name} нет proc {proc_name}")
        pid = self.spawn(body, arg, name=f"{r.name}.{proc_name}")
        child = self._processes[pid]
        self.join(pid)
        if child.error is not None:
            raise ProcessFailedError(f"proc {r.name}.{proc_name} упал: {child.error}") from child.error
        return child.result

    def call_proc_served(self, r: Resource, op_name: str, arg: Any) -> Any:
        """
        Межресурсный вызов обслуживаемой операции, без создания процессов.

        Если сервер простаивает в accept, тело операции исполняется прямо
        на контексте вызывающего: ни переключений, ни новых процессов.
        Занятый сервер обслуживает вызов обычным rendezvous.

        Raises:
            NotFoundError: Операция не обслуживается
        """
        queue = r.server_ops.get(op_name)
        if queue is None:
            raise NotFoundError(f"Ресурс {r.name} не обслуживает операцию {op_name}")
        if queue.acceptors:
            self._require_current()
            return r.handlers[op_name](arg)
        return self.op_call(queue, arg)

    # ===== Метрики =====

    def _report_metrics(self):
        if not METRICS_AVAILABLE:
            return
        totals = {
            "switches": self.backend.switch_count,
            "spawned": self.spawned,
            "reaped": self.reaped,
            "blocks": self.blocks,
        }
        deltas = {key: totals[key] - self._reported[key] for key in totals}
        self._reported = totals
        get_runtime_metrics().record_run(self.kind.value, live=self.census(), **deltas)
