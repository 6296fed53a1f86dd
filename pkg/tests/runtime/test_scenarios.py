"""
Тесты сценариев: сравнение журналов рантайма с эталонным симулятором.
"""

import random

import pytest

from src.ctxswitch import BackendKind
from src.runtime import (
    SCENARIOS,
    Scenario,
    Simulator,
    random_scenario,
    run_named_scenario,
    run_scenario,
    simulate
)

KINDS = [BackendKind.FAST, BackendKind.PORTABLE]

HAND_SCENARIOS = [
    Scenario([[("yield",)] * 3, [("yield",)] * 3, [("yield",)] * 3], [0, 1, 2], name="round_robin"),
    Scenario([[("P", 0)], [("V", 0)]], [0, 1], name="p_then_v"),
    Scenario([[("V", 0)], [("P", 0)]], [0, 1], name="v_then_p"),
    Scenario([[("P", 0), ("V", 1)], [("P", 0), ("V", 1)], [("V", 0), ("V", 0), ("P", 1), ("P", 1)]],
             [0, 1, 2], name="fifo_waiters"),
    Scenario([[("send", 0, 1), ("send", 0, 2)], [("recv", 0), ("recv", 0)]], [0, 1], name="send_first"),
    Scenario([[("recv", 0), ("recv", 0)], [("send", 0, 1), ("yield",), ("send", 0, 2)]],
             [0, 1], name="recv_first"),
    Scenario([[("call", 0, 10)], [("accept", 0), ("reply", 1)]], [0, 1], name="call_first"),
    Scenario([[("accept", 0), ("reply", 5)], [("call", 0, 10)]], [0, 1], name="accept_first"),
    Scenario([[("call", 0, 1)], [("call", 0, 2)], [("accept", 0), ("reply", 1), ("accept", 0), ("reply", 1)]],
             [0, 1, 2], name="two_callers"),
    Scenario([[("spawn", 1), ("join",)], [("yield",), ("send", 1, 7)]], [0], name="spawn_join"),
    Scenario([[("spawn", 1), ("yield",), ("join",)], [("V", 0)]], [0], name="join_dead"),
    Scenario([[("P", 0)], [("recv", 1)]], [0, 1], name="deadlock"),
    Scenario([[("P", 0), ("send", 0, 3)], [("P", 0), ("recv", 0)]], [0, 1], semaphores=(1, 0),
             name="mutex"),
    Scenario([[("call", 1, 4), ("recv", 0)], [("accept", 1), ("send", 0, 9), ("reply", 2)]],
             [0, 1], name="call_then_message"),
]


def _ids(scenario):
    return scenario.name


@pytest.mark.parametrize("kind", KINDS, ids=lambda kind: kind.value)
@pytest.mark.parametrize("scenario", HAND_SCENARIOS, ids=_ids)
def test_hand_scenarios_match_simulator(scenario, kind):
    """Журнал рантайма совпадает с эталонным исполнением."""
    result = run_scenario(scenario, kind)

    assert result.events == simulate(scenario)


def test_round_robin_events():
    """Журнал трёх уступающих процессов: dispatch по кругу."""
    events = simulate(HAND_SCENARIOS[0])
    dispatched = [pid for kind, pid, _ in events if kind == "dispatch"]

    assert dispatched == [0, 1, 2] * 4
    assert events[-1] == ("halt", -1, ())


def test_deadlock_halt_lists_blocked():
    """Взаимная блокировка заканчивается halt со списком заблокированных."""
    result = run_scenario(HAND_SCENARIOS[11])

    assert result.events[-1] == ("halt", -1, (0, 1))


def test_call_result_value():
    """Результат вызова равен payload + delta."""
    result = run_scenario(HAND_SCENARIOS[6])

    assert ("result", 0, 11) in result.events
    assert ("accept", 1, 10) in result.events


def test_simulator_remaining_messages():
    """Неполученные сообщения остаются в очереди симулятора."""
    scenario = Scenario([[("send", 0, 1), ("send", 1, 2)], [("recv", 1)]], [0, 1])
    simulator = Simulator(scenario)
    simulator.run()

    assert simulator.remaining_messages == 1
    assert run_scenario(scenario).remaining == 1


def _check_invariants(rt, sems, queues):
    for sem in sems:
        assert sem.count == 0 or not sem.waiters
    for queue in queues:
        assert not (queue.messages and queue.receivers)
        assert not (queue.invocations and queue.acceptors)


@pytest.mark.parametrize("kind", KINDS, ids=lambda kind: kind.value)
def test_random_scenarios(kind):
    """1000 случайных сценариев: совпадение с симулятором и инварианты на каждом шаге."""
    rng = random.Random(1994)

    for _ in range(1000):
        scenario = random_scenario(rng)
        result = run_scenario(scenario, kind, on_step=_check_invariants)

        assert result.events == simulate(scenario), scenario
        assert result.sends == result.receives + result.remaining, scenario
        assert result.accepts == result.replies, scenario
        results = [event for event in result.events if event[0] == "result"]
        assert len(results) == result.replies, scenario


def test_random_scenario_shape():
    """Генератор: 2-3 начальных процесса, accept всегда с reply, spawn всегда с join."""
    rng = random.Random(7)

    for _ in range(200):
        scenario = random_scenario(rng)
        assert len(scenario.initial) in (2, 3)
        for program in scenario.programs:
            for index, instr in enumerate(program):
                if instr[0] == "accept":
                    assert program[index + 1][0] == "reply"
                if instr[0] == "spawn":
                    assert program[index + 1] == ("join",)
                    assert len(scenario.initial) <= instr[1] < len(scenario.programs)


def test_determinism_across_backends_and_runs():
    """Одинаковые журналы на обоих backend и при повторных прогонах."""
    rng = random.Random(42)
    scenarios = [random_scenario(rng) for _ in range(50)]

    for scenario in scenarios:
        first = run_scenario(scenario, BackendKind.FAST).events
        assert run_scenario(scenario, BackendKind.FAST).events == first
        assert run_scenario(scenario, BackendKind.PORTABLE).events == first


@pytest.mark.parametrize("kind", KINDS, ids=lambda kind: kind.value)
def test_named_scheduler_order(kind):
    """Три процесса по три шага чередуются по кругу."""
    assert run_named_scenario("scheduler_order", kind) == ["A0 B0 C0 A1 B1 C1 A2 B2 C2"]


def test_named_semaphore_trace():
    """Ограниченный буфер на одну ячейку: производство и потребление чередуются."""
    lines = run_named_scenario("semaphore_trace", BackendKind.PORTABLE)

    expected = []
    for item in range(4):
        expected += [f"produce {item}", f"consume {item}"]
    assert lines == expected + ["final empty=1 full=0"]


def test_named_message_fifo():
    """Сообщения приходят в порядке отправки."""
    words = ["alpha", "beta", "gamma", "delta", "epsilon"]

    lines = run_named_scenario("message_fifo")

    assert lines == [f"send {w}" for w in words] + [f"recv {w}" for w in words] + ["left 0"]


def test_named_rendezvous_echo():
    """Сервер принимает вызовы в порядке поступления."""
    assert run_named_scenario("rendezvous_echo") == [
        "accept ping from 1",
        "accept pong from 2",
        "accept done from 3",
        "reply PING",
        "reply PONG",
        "reply DONE",
    ]


def test_named_create_join():
    """Вызовы ресурса и join завершённого процесса."""
    assert run_named_scenario("create_join") == [
        "new-process inc(1) = 2",
        "served double(21) = 42",
        "census delta 0",
        "child state dead",
    ]


def test_named_scenarios_registry():
    """Реестр содержит все сценарии корпуса; неизвестное имя: KeyError."""
    assert set(SCENARIOS) == {
        "scheduler_order", "semaphore_trace", "message_fifo",
        "rendezvous_echo", "create_join", "cstest",
    }
    with pytest.raises(KeyError):
        run_named_scenario("missing")
