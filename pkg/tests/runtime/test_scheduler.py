"""
Тесты для планировщика и примитивов рантайма.
"""

import logging
from unittest.mock import Mock

import pytest

from src.ctxswitch import BackendKind
from src.runtime import (
    CapacityError,
    DeadlockError,
    InvalidStateError,
    Message,
    NotFoundError,
    OperationQueue,
    ProcessFailedError,
    ProcessState,
    Runtime,
    Semaphore
)
from src.runtime import scheduler as scheduler_module

KINDS = [BackendKind.FAST, BackendKind.PORTABLE]


@pytest.fixture(params=KINDS, ids=lambda kind: kind.value)
def rt(request):
    """Runtime на каждом backend."""
    return Runtime(request.param)


# ===== Процессы =====

def test_spawn_order_fifo(rt):
    """Процессы A, B, C без блокировок стартуют в порядке создания."""
    order = []
    for name in "ABC":
        rt.spawn(lambda arg: order.append(arg), name)

    rt.run()

    assert order == ["A", "B", "C"]
    assert rt.census() == 0


def test_spawn_and_join(rt):
    """Дочерний процесс исполняется ровно один раз и становится dead."""
    runs = []

    def main(_arg):
        child = rt.spawn(lambda _a: runs.append(1))
        assert rt.state_of(child) == ProcessState.READY
        rt.join(child)
        return child

    child = rt.run(main)

    assert runs == [1]
    assert rt.state_of(child) == ProcessState.DEAD
    assert rt.reaped == 2


def test_join_child_that_yields(rt):
    """Родитель продолжает только после смерти дочернего процесса."""
    log = []

    def child(_arg):
        for step in range(2):
            log.append(f"child {step}")
            rt.yield_now()
        log.append("child end")

    def main(_arg):
        rt.join(rt.spawn(child))
        log.append("parent resumed")

    rt.run(main)

    assert log == ["child 0", "child 1", "child end", "parent resumed"]


def test_join_dead_returns_immediately(rt):
    """join завершённого процесса не блокирует."""
    def main(_arg):
        child = rt.spawn(lambda _a: None)
        rt.join(child)
        blocks = rt.blocks
        rt.join(child)
        return rt.blocks - blocks

    assert rt.run(main) == 0


def test_join_self_deadlock(rt):
    """join самого себя: DeadlockError сразу."""
    def main(_arg):
        rt.join(rt.current_pid)

    with pytest.raises(ProcessFailedError) as exc_info:
        rt.run(main)

    assert isinstance(exc_info.value.__cause__, DeadlockError)


def test_join_unknown_pid(rt):
    """Никогда не существовавший pid."""
    errors = []

    def main(_arg):
        try:
            rt.join(99)
        except NotFoundError as e:
            errors.append(e)

    rt.run(main)

    assert len(errors) == 1
    assert isinstance(errors[0], KeyError)
    with pytest.raises(NotFoundError):
        rt.state_of(99)


def test_yield_sole_process_continues(rt):
    """Единственный процесс после yield продолжает без переключения."""
    def main(_arg):
        switches = rt.backend.switch_count
        rt.yield_now()
        return rt.backend.switch_count - switches

    assert rt.run(main) == 0


def test_yield_alternation(rt):
    """Два процесса, уступающие друг другу, строго чередуются."""
    log = []

    def worker(name):
        for _ in range(5):
            log.append(name)
            rt.yield_now()

    rt.spawn(worker, "a")
    rt.spawn(worker, "b")
    rt.run()

    assert log == ["a", "b"] * 5


def test_yield_queue_mechanics(rt):
    """yield из A при очереди [B, C]: работает B, очередь [C, A]."""
    seen = {}

    def a(_arg):
        rt.yield_now()

    def b(_arg):
        seen["current"] = rt.current_pid
        seen["ready"] = rt.ready_pids

    pid_a = rt.spawn(a)
    pid_b = rt.spawn(b)
    pid_c = rt.spawn(lambda _a: None)
    rt.run()

    assert seen == {"current": pid_b, "ready": [pid_c, pid_a]}


def test_capacity_limit():
    """Превышение лимита живых процессов."""
    rt = Runtime(BackendKind.FAST, max_processes=2)
    rt.spawn(lambda _a: None)
    rt.spawn(lambda _a: None)

    with pytest.raises(CapacityError):
        rt.spawn(lambda _a: None)


def test_stacks_are_recycled():
    """Стеки завершённых процессов уходят в список свободных и переиспользуются."""
    rt = Runtime(BackendKind.FAST)

    def main(_arg):
        for _ in range(20):
            rt.join(rt.spawn(lambda _a: None))

    rt.run(main)

    assert rt.spawned == 21
    assert rt.reaped == 21
    assert len(rt._free_stacks) <= 2


def test_main_failure_propagates(rt, caplog):
    """Исключение главного процесса становится ProcessFailedError и пишется в лог."""
    def main(_arg):
        raise RuntimeError("boom")

    with caplog.at_level(logging.ERROR):
        with pytest.raises(ProcessFailedError):
            rt.run(main)

    assert any("boom" in record.message for record in caplog.records)


def test_main_blocked_deadlock(rt):
    """Главный процесс заблокирован, готовых нет."""
    s = Semaphore(0)

    with pytest.raises(DeadlockError):
        rt.run(lambda _a: rt.sem_p(s))


def test_operation_outside_process(rt):
    """Блокирующая операция вне процесса рантайма запрещена."""
    with pytest.raises(InvalidStateError):
        rt.sem_p(Semaphore(0))


# ===== Семафоры =====

def test_sem_p_nonblocking(rt):
    """count=1: P возвращается сразу, без переключения."""
    s = Semaphore(1)

    def main(_arg):
        switches = rt.backend.switch_count
        rt.sem_p(s)
        return rt.backend.switch_count - switches

    assert rt.run(main) == 0
    assert s.count == 0


def test_sem_fifo_waiters(rt):
    """Ожидающие будятся в порядке блокировки."""
    s = Semaphore(0)
    log = []
    seen = {}

    def waiter(name):
        rt.sem_p(s)
        log.append(name)

    def signaller(_arg):
        seen["waiters"] = s.waiter_pids
        rt.sem_v(s)
        assert s.count == 0
        rt.sem_v(s)

    first = rt.spawn(waiter, "first")
    second = rt.spawn(waiter, "second")
    rt.spawn(signaller)
    rt.run()

    assert seen["waiters"] == [first, second]
    assert log == ["first", "second"]
    assert s.count == 0


def test_sem_v_without_waiters(rt):
    """V без ожидающих увеличивает счётчик."""
    s = Semaphore(0)

    rt.run(lambda _a: rt.sem_v(s))

    assert s.count == 1


def test_sem_v_does_not_switch(rt):
    """V будит ожидающего в очередь готовых, но не передаёт ему управление."""
    s = Semaphore(0)
    log = []

    def waiter(_arg):
        rt.sem_p(s)
        log.append("waiter")

    def signaller(_arg):
        rt.sem_v(s)
        log.append("signaller")

    pid = rt.spawn(waiter)
    rt.spawn(signaller)
    rt.run()

    assert log == ["signaller", "waiter"]
    assert rt.state_of(pid) == ProcessState.DEAD


def test_negative_semaphore():
    """Отрицательное начальное значение запрещено."""
    with pytest.raises(ValueError):
        Semaphore(-1)


# ===== Асинхронные операции =====

def test_send_to_empty_queue(rt):
    """Отправка без получателей кладёт сообщение в очередь."""
    q = OperationQueue()

    rt.run(lambda _a: rt.op_send(q, "msg"))

    assert q.pending_payloads == ["msg"]


def test_send_to_blocked_receiver(rt):
    """Ждущий получатель получает сообщение напрямую."""
    q = OperationQueue()
    got = []
    seen = {}

    def receiver(_arg):
        got.append(rt.op_receive(q))

    def sender(_arg):
        seen["receivers"] = q.receiver_pids
        rt.op_send(q, "direct")
        seen["messages"] = q.pending_payloads
        seen["ready"] = rt.ready_pids

    pid = rt.spawn(receiver)
    rt.spawn(sender)
    rt.run()

    assert seen == {"receivers": [pid], "messages": [], "ready": [pid]}
    assert got == ["direct"]


def test_receive_fifo(rt):
    """Приём берёт первое сообщение."""
    q = OperationQueue()

    def main(_arg):
        rt.op_send(q, "a")
        rt.op_send(q, "b")
        return rt.op_receive(q)

    assert rt.run(main) == "a"
    assert q.pending_payloads == ["b"]


def test_send_builds_message_record(rt):
    """Отправка строит запись с отправителем и номером в очереди."""
    q = OperationQueue()

    def sender(_arg):
        rt.op_send(q, "first")
        rt.op_send(q, "second")

    pid = rt.spawn(sender)
    rt.run()

    records = [(m.sender, m.seq, m.payload) for m in q.messages]
    assert records == [(pid, 1, "first"), (pid, 2, "second")]
    assert all(isinstance(m, Message) for m in q.messages)


def test_reply_to_unaccepted_invocation(rt):
    """Ответ на вызов, который никто не принял: InvalidStateError, вызов остаётся в очереди."""
    q = OperationQueue()
    log = []

    def meddler(_arg):
        inv = q.invocations[0]
        try:
            rt.op_reply(inv, 99)
        except InvalidStateError:
            log.append(("rejected", len(q.invocations)))

    def server(_arg):
        inv = rt.op_accept(q)
        rt.op_reply(inv, inv.payload + 1)

    def client(_arg):
        log.append(("result", rt.op_call(q, 1)))

    rt.spawn(client)
    rt.spawn(meddler)
    rt.spawn(server)
    rt.run()

    assert log == [("rejected", 1), ("result", 2)]


# ===== Rendezvous =====

def _echo_server(rt, q, count):
    def server(_arg):
        for _ in range(count):
            inv = rt.op_accept(q)
            rt.op_reply(inv, inv.payload)
    return server


def test_call_echo(rt):
    """Эхо-сервер возвращает аргумент вызова."""
    q = OperationQueue()
    rt.spawn(_echo_server(rt, q, 1))

    assert rt.run(lambda _a: rt.op_call(q, 42)) == 42


def test_calls_replied_in_order(rt):
    """Два вызывающих, сервер принимает дважды: ответы в порядке вызовов."""
    q = OperationQueue()
    replies = []

    def caller(value):
        replies.append(rt.op_call(q, value))

    rt.spawn(caller, "x")
    rt.spawn(caller, "y")
    rt.spawn(_echo_server(rt, q, 2))
    rt.run()

    assert replies == ["x", "y"]


def test_accept_pending_without_switch(rt):
    """Ожидающий вызов принимается без переключения."""
    q = OperationQueue()
    seen = {}

    def server(_arg):
        switches = rt.backend.switch_count
        inv = rt.op_accept(q)
        seen["switches"] = rt.backend.switch_count - switches
        rt.op_reply(inv, None)

    rt.spawn(lambda _a: rt.op_call(q, 1))
    rt.spawn(server)
    rt.run()

    assert seen["switches"] == 0


def test_double_reply(rt):
    """Повторный ответ на вызов: InvalidStateError."""
    q = OperationQueue()
    errors = []

    def server(_arg):
        inv = rt.op_accept(q)
        rt.op_reply(inv, 1)
        try:
            rt.op_reply(inv, 2)
        except InvalidStateError as e:
            errors.append(e)

    rt.spawn(server)
    assert rt.run(lambda _a: rt.op_call(q, 0)) == 1
    assert len(errors) == 1


def test_reply_does_not_preempt(rt):
    """После reply сервер продолжает работу до блокировки."""
    q = OperationQueue()
    log = []

    def server(_arg):
        inv = rt.op_accept(q)
        rt.op_reply(inv, "ok")
        log.append("server after reply")

    def client(_arg):
        rt.op_call(q, None)
        log.append("client resumed")

    rt.spawn(server)
    rt.spawn(client)
    rt.run()

    assert log == ["server after reply", "client resumed"]


# ===== Ресурсы =====

def test_call_proc_new_process(rt):
    """Вызов proc с новым процессом: результат и ровно один прожитый процесс."""
    resource = rt.create_resource("arith", {"inc": lambda x: x + 1})
    seen = {}

    def main(_arg):
        spawned, census = rt.spawned, rt.census()
        seen["result"] = rt.call_proc_new_process(resource, "inc", 1)
        seen["spawned"] = rt.spawned - spawned
        seen["census"] = rt.census() - census

    rt.run(main)

    assert seen == {"result": 2, "spawned": 1, "census": 0}


def test_call_proc_unknown(rt):
    """Неизвестный proc: NotFoundError."""
    resource = rt.create_resource("empty")
    errors = []

    def main(_arg):
        for call in (rt.call_proc_new_process, rt.call_proc_served):
            try:
                call(resource, "missing", None)
            except NotFoundError as e:
                errors.append(e)

    rt.run(main)

    assert len(errors) == 2


def test_call_proc_failure(rt):
    """Исключение в теле proc доходит до вызывающего как ProcessFailedError."""
    def broken(_arg):
        raise ValueError("bad proc")

    resource = rt.create_resource("broken", {"run": broken})
    errors = []

    def main(_arg):
        try:
            rt.call_proc_new_process(resource, "run", None)
        except ProcessFailedError as e:
            errors.append(e)

    rt.run(main)

    assert len(errors) == 1
    assert "bad proc" in str(errors[0])


def test_call_proc_served(rt):
    """Обслуживаемый вызов не создаёт процессов."""
    resource = rt.create_resource("arith")
    rt.serve(resource, "inc", lambda x: x + 1)
    seen = {}

    def main(_arg):
        census, spawned = rt.census(), rt.spawned
        seen["first"] = rt.call_proc_served(resource, "inc", 1)
        for i in range(100):
            rt.call_proc_served(resource, "inc", i)
        seen["census"] = rt.census() - census
        seen["spawned"] = rt.spawned - spawned

    rt.run(main)

    assert seen == {"first": 2, "census": 0, "spawned": 0}


def test_call_proc_served_idle_server_without_switch(rt):
    """Сервер ждёт в accept: вызов исполняется на стеке вызывающего без переключений."""
    resource = rt.create_resource("arith")
    rt.serve(resource, "inc", lambda x: x + 1)

    def main(_arg):
        rt.yield_now()
        switches = rt.backend.switch_count
        results = [rt.call_proc_served(resource, "inc", i) for i in range(10)]
        return results, rt.backend.switch_count - switches

    results, switches = rt.run(main)

    assert results == list(range(1, 11))
    assert switches == 0


def test_call_proc_served_busy_server_uses_rendezvous(rt):
    """Сервер ещё не дошёл до accept: вызов идёт через rendezvous."""
    resource = rt.create_resource("arith")
    seen = {}

    def main(_arg):
        server = rt.serve(resource, "inc", lambda x: x + 1)
        queue = resource.server_ops["inc"]
        seen["server_ready"] = server in rt.ready_pids
        seen["acceptors"] = len(queue.acceptors)
        switches = rt.backend.switch_count
        seen["result"] = rt.call_proc_served(resource, "inc", 41)
        seen["switched"] = rt.backend.switch_count > switches

    rt.run(main)

    assert seen == {"server_ready": True, "acceptors": 0, "result": 42, "switched": True}


def test_system_exit_in_process(rt):
    """SystemExit в теле процесса останавливает планирование и поднимается из run()."""
    log = []

    def quitter(_arg):
        raise SystemExit(3)

    pid = rt.spawn(quitter)
    rt.spawn(lambda _a: log.append("second"))

    with pytest.raises(SystemExit):
        rt.run()

    assert rt.state_of(pid) == ProcessState.DEAD
    assert log == []

    rt.run()
    assert log == ["second"]


def test_duplicate_resource(rt):
    """Имена ресурсов уникальны."""
    rt.create_resource("r")

    with pytest.raises(InvalidStateError):
        rt.create_resource("r")


# ===== Журнал и метрики =====

def test_event_trace():
    """Журнал событий простой пары P/V."""
    rt = Runtime(BackendKind.FAST, trace=True)
    s = Semaphore(0)
    rt.spawn(lambda _a: rt.sem_p(s))
    rt.spawn(lambda _a: rt.sem_v(s))
    rt.run()

    assert rt.trace.events == [
        ("spawn", 0, None),
        ("spawn", 1, None),
        ("dispatch", 0, None),
        ("block", 0, "P"),
        ("dispatch", 1, None),
        ("wake", 0, None),
        ("death", 1, None),
        ("dispatch", 0, None),
        ("death", 0, None),
        ("halt", -1, ()),
    ]


def test_halt_lists_blocked():
    """halt перечисляет процессы, оставшиеся заблокированными."""
    rt = Runtime(BackendKind.FAST, trace=True)
    s = Semaphore(0)
    rt.spawn(lambda _a: rt.sem_p(s))
    rt.spawn(lambda _a: None)
    rt.run()

    assert rt.trace.events[-1] == ("halt", -1, (0,))
    assert rt.state_of(0) == ProcessState.BLOCKED


def test_metrics_reported(monkeypatch):
    """После run в метрики уходят приращения счётчиков."""
    metrics = Mock()
    monkeypatch.setattr(scheduler_module, "METRICS_AVAILABLE", True)
    monkeypatch.setattr(scheduler_module, "get_runtime_metrics", lambda: metrics, raising=False)

    rt = Runtime(BackendKind.FAST)
    rt.run(lambda _a: rt.join(rt.spawn(lambda _b: None)))

    metrics.record_run.assert_called_once()
    args, kwargs = metrics.record_run.call_args
    assert args == ("fast",)
    assert kwargs["spawned"] == 2
    assert kwargs["reaped"] == 2
    assert kwargs["blocks"] == 1
    assert kwargs["live"] == 0
    assert kwargs["switches"] > 0
