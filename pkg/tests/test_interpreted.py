from __future__ import annotations

import pytest

from mrcsim import REJECT, BehaviorError, Bound, ResourceLimits, run
from mrcsim.automata import TispMachine
from mrcsim.interpreted import interpreted_program

SYMBOLS = ("0", "1", "2", "3", "4", "5", "6", "7", "8", "9", "#", ",", "|", ";", "+", "_")


def machine(delta, initial="s", time=1000):
    return TispMachine(("s", "w", "acc", "rej"), initial, "acc", "rej", SYMBOLS, "_", delta, time, 200)


def identity_machine():
    # halts at once, leaving the argument as the result
    return machine({}, initial="acc")


def rewriting_machine():
    """Mappers pass through; reducers turn every 0 into a 1."""
    delta = {("s", "1"): ("acc", "1", "R"), ("s", "0"): ("w", "0", "R")}
    for a in SYMBOLS:
        if a == "_":
            delta[("w", a)] = ("acc", a, "L")
        else:
            delta[("w", a)] = ("w", "1" if a == "0" else a, "R")
    return machine(delta)


def test_identity_machine_is_identity_round():
    program = interpreted_program(identity_machine(), rounds=1)
    result = run(program, "0110")
    assert sorted(result.output) == sorted((b"%d" % i, s.encode()) for i, s in enumerate("0110", 1))


def test_reducer_rewrites_values():
    program = interpreted_program(rewriting_machine(), rounds=1)
    result = run(program, "0100")
    assert sorted(v for _, v in result.output) == [b"1"] * 4
    assert sorted(k for k, _ in result.output) == [b"1", b"2", b"3", b"4"]


def test_reject_state_rejects():
    delta = {("s", "1"): ("acc", "1", "R"), ("s", "0"): ("rej", "0", "R")}
    result = run(interpreted_program(machine(delta), rounds=2), "01")
    assert result.verdict == REJECT
    assert result.report.rounds_executed == 1


def test_step_budget_is_a_behavior_error():
    limits = ResourceLimits(time=Bound(1, 0))
    program = interpreted_program(rewriting_machine(), rounds=1, limits=limits)
    with pytest.raises(BehaviorError):
        run(program, "01")


def test_steps_are_metered():
    report = run(interpreted_program(rewriting_machine(), rounds=1), "0101").report
    # each mapper halts after one step; each reducer scans "0#1#4#i|v" and one blank
    assert report.rounds[0].mapper_steps == 4
    assert report.rounds[0].reducer_steps == 4 * 10
