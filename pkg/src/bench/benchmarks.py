"""
Тела бенчмарков таблицы производительности.

Каждое тело создаёт свежий Runtime, поднимает нужных партнёров,
а затем главный процесс засекает цикл из iterations операций целиком.
Часы читаются только дважды на замер.
"""

import time
from typing import Callable, Dict

from src.ctxswitch import BackendKind
from src.runtime import OperationQueue, Runtime, Semaphore

Body = Callable[[BackendKind, int], float]

clock = time.perf_counter


def _noop(_arg=None):
    return None


def _timed(kind: BackendKind, setup: Callable[[Runtime], Callable[[int], None]], iterations: int) -> float:
    """
    Запуск тела внутри процесса рантайма.

    setup вызывается в главном процессе до начала замера и возвращает
    функцию цикла; партнёры получают один yield, чтобы дойти до своей
    точки блокировки.
    """
    rt = Runtime(kind)

    def main(_arg):
        loop = setup(rt)
        rt.yield_now()
        start = clock()
        loop(iterations)
        return clock() - start

    return rt.run(main)


# ===== Строки без переключений =====

def bench_loop_overhead(kind: BackendKind, iterations: int) -> float:
    def setup(rt):
        def loop(n):
            for _ in range(n):
                pass
        return loop
    return _timed(kind, setup, iterations)


def bench_local_call(kind: BackendKind, iterations: int) -> float:
    def setup(rt):
        def loop(n):
            f = _noop
            for _ in range(n):
                f()
        return loop
    return _timed(kind, setup, iterations)


def bench_semaphore_p(kind: BackendKind, iterations: int) -> float:
    def setup(rt):
        s = Semaphore(iterations)

        def loop(n):
            p = rt.sem_p
            for _ in range(n):
                p(s)
        return loop
    return _timed(kind, setup, iterations)


def bench_semaphore_v(kind: BackendKind, iterations: int) -> float:
    def setup(rt):
        s = Semaphore(0)

        def loop(n):
            v = rt.sem_v
            for _ in range(n):
                v(s)
        return loop
    return _timed(kind, setup, iterations)


def bench_semaphore_pair(kind: BackendKind, iterations: int) -> float:
    def setup(rt):
        s = Semaphore(0)

        def loop(n):
            p, v = rt.sem_p, rt.sem_v
            for _ in range(n):
                v(s)
                p(s)
        return loop
    return _timed(kind, setup, iterations)


def bench_async_send_receive(kind: BackendKind, iterations: int) -> float:
    def setup(rt):
        q = OperationQueue("async")

        def loop(n):
            send, receive = rt.op_send, rt.op_receive
            for i in range(n):
                send(q, i)
                receive(q)
        return loop
    return _timed(kind, setup, iterations)


# ===== Строки с переключениями =====

def bench_interresource_served(kind: BackendKind, iterations: int) -> float:
    def setup(rt):
        resource = rt.create_resource("bench")
        rt.serve(resource, "noop", _noop)

        def loop(n):
            call = rt.call_proc_served
            for i in range(n):
                call(resource, "noop", i)
        return loop
    return _timed(kind, setup, iterations)


def bench_interresource_new_process(kind: BackendKind, iterations: int) -> float:
    def setup(rt):
        resource = rt.create_resource("bench", {"noop": _noop})

        def loop(n):
            call = rt.call_proc_new_process
            for i in range(n):
                call(resource, "noop", i)
        return loop
    return _timed(kind, setup, iterations)


def bench_process_create_destroy(kind: BackendKind, iterations: int) -> float:
    def setup(rt):
        def loop(n):
            spawn, join = rt.spawn, rt.join
            for _ in range(n):
                join(spawn(_noop))
        return loop
    return _timed(kind, setup, iterations)


def bench_semaphore_switch(kind: BackendKind, iterations: int) -> float:
    """Два процесса перекидываются парой семафоров; итерация = круг P/V туда и обратно."""
    def setup(rt):
        ping, pong = Semaphore(0), Semaphore(0)

        def partner(_arg):
            p, v = rt.sem_p, rt.sem_v
            while True:
                p(ping)
                v(pong)

        rt.spawn(partner)

        def loop(n):
            p, v = rt.sem_p, rt.sem_v
            for _ in range(n):
                v(ping)
                p(pong)
        return loop
    return _timed(kind, setup, iterations)


def bench_message_switch(kind: BackendKind, iterations: int) -> float:
    def setup(rt):
        requests, answers = OperationQueue("requests"), OperationQueue("answers")

        def partner(_arg):
            send, receive = rt.op_send, rt.op_receive
            while True:
                send(answers, receive(requests))

        rt.spawn(partner)

        def loop(n):
            send, receive = rt.op_send, rt.op_receive
            for i in range(n):
                send(requests, i)
                receive(answers)
        return loop
    return _timed(kind, setup, iterations)


def bench_rendezvous(kind: BackendKind, iterations: int) -> float:
    def setup(rt):
        q = OperationQueue("rendezvous")

        def server(_arg):
            accept, reply = rt.op_accept, rt.op_reply
            while True:
                inv = accept(q)
                reply(inv, inv.payload)

        rt.spawn(server)

        def loop(n):
            call = rt.op_call
            for i in range(n):
                call(q, i)
        return loop
    return _timed(kind, setup, iterations)


BENCHMARKS: Dict[str, Body] = {
    "loop control overhead": bench_loop_overhead,
    "local call, optimised": bench_local_call,
    "interresource call, no new process": bench_interresource_served,
    "interresource call, new process": bench_interresource_new_process,
    "process create/destroy": bench_process_create_destroy,
    "semaphore P only": bench_semaphore_p,
    "semaphore V only": bench_semaphore_v,
    "semaphore pair": bench_semaphore_pair,
    "semaphore requiring context switch": bench_semaphore_switch,
    "asynchronous send/receive": bench_async_send_receive,
    "message passing requiring context switch": bench_message_switch,
    "rendezvous": bench_rendezvous,
}
