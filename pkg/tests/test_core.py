from __future__ import annotations

import random
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mrcsim import (
    ACCEPT,
    REJECT,
    VIOLATION,
    BehaviorError,
    Bound,
    Context,
    MrcProgram,
    Pair,
    ProgramError,
    ResourceLimits,
    RoundBehavior,
    RoundState,
    decode_input,
    encode_input,
    run,
    run_round,
    shuffle_and_sort,
)
from mrcsim.core import BuiltinBehavior, identity_mapper, identity_reducer, shuffle_charge
from mrcsim.corpus import fanout_program, no_ones_program

bits = st.text(alphabet="01", max_size=200)
pairs = st.lists(st.tuples(st.binary(max_size=4), st.binary(max_size=4)).map(lambda t: Pair(*t)), max_size=60)


def identity_program(rounds=1, **kw):
    return MrcProgram(rounds=rounds, behavior=BuiltinBehavior(identity_mapper, identity_reducer), **kw)


# ---------------------------------------------------------------- encoding


def test_encode_small():
    enc = encode_input("101")
    assert enc.n == 3
    assert enc.pairs == (Pair(b"1", b"1"), Pair(b"2", b"0"), Pair(b"3", b"1"))


def test_encode_empty():
    assert encode_input("").pairs == ()
    assert decode_input(encode_input(b"")) == b""


@given(bits)
def test_encode_round_trip(x):
    assert decode_input(encode_input(x)) == x.encode()


def test_decode_rejects_gaps():
    enc = encode_input("10")
    with pytest.raises(ValueError):
        decode_input(type(enc)((enc.pairs[0],), 2))


# ---------------------------------------------------------------- shuffle


@given(pairs)
def test_shuffle_conserves_pairs(ps):
    groups = shuffle_and_sort(ps)
    regrouped = [Pair(k, v) for k, vs in groups for v in vs]
    assert Counter(regrouped) == Counter(ps)
    keys = [k for k, _ in groups]
    assert keys == sorted(set(keys))


@given(pairs)
def test_shuffle_keeps_arrival_order_within_key(ps):
    for key, values in shuffle_and_sort(ps):
        assert values == [v for k, v in ps if k == key]


def test_shuffle_charge():
    assert shuffle_charge(0) == 0
    assert shuffle_charge(1) == 1
    assert shuffle_charge(8) == 8 * 4


# ---------------------------------------------------------------- running


def test_identity_round_preserves_input():
    enc = encode_input("0110")
    state, metrics = run_round(RoundState(enc.pairs), identity_program(), enc.n)
    assert sorted(state.pairs) == sorted(enc.pairs)
    assert state.round_index == 1
    assert metrics.total_pairs == 4
    assert metrics.map_invocations == 4
    assert metrics.reduce_invocations == 4
    assert metrics.flag is None


def test_identity_program_rejects_under_accept_state():
    result = run(identity_program(rounds=3), "01")
    assert result.verdict == REJECT
    assert result.report.rounds_executed == 3


class AcceptAtOnce(RoundBehavior):
    def map(self, pair, ctx):
        return [pair]

    def reduce(self, key, values, ctx):
        ctx.accept()
        return []


def test_immediate_accept_stops_early():
    result = run(MrcProgram(rounds=5, behavior=AcceptAtOnce()), "1")
    assert result.verdict == ACCEPT
    assert result.report.rounds_executed == 1


class SplitVerdict(RoundBehavior):
    def map(self, pair, ctx):
        return [pair]

    def reduce(self, key, values, ctx):
        if key == b"1":
            ctx.accept()
        else:
            ctx.reject()
        return []


def test_reject_dominates_accept():
    assert run(MrcProgram(rounds=1, behavior=SplitVerdict()), "00").verdict == REJECT


def test_context_reject_is_sticky():
    ctx = Context(1, 1)
    ctx.reject()
    ctx.accept()
    assert ctx.flag == REJECT


class MapperHalts(RoundBehavior):
    def map(self, pair, ctx):
        ctx.accept()
        return []


def test_mapper_may_not_halt():
    with pytest.raises(BehaviorError):
        run(MrcProgram(rounds=1, behavior=MapperHalts()), "1")


def test_empty_final_round_convention():
    program = no_ones_program()
    assert run(program, "000").verdict == ACCEPT
    assert run(program, "010").verdict == REJECT
    assert run(program, "").verdict == ACCEPT


def test_empty_input_hook():
    program = MrcProgram(rounds=2, behavior=AcceptAtOnce(), empty_input=lambda: (True, 2))
    result = run(program, "")
    assert result.verdict == ACCEPT
    assert result.report.empty_input_rule
    assert result.report.rounds_executed == 2


def test_empty_input_without_hook_runs_rounds():
    result = run(identity_program(rounds=2), "")
    assert result.verdict == REJECT
    assert result.report.rounds_executed == 2


# ---------------------------------------------------------------- validation and limits


def test_round_count_must_be_positive():
    with pytest.raises(ProgramError):
        MrcProgram(rounds=0, behavior=AcceptAtOnce())
    with pytest.raises(ProgramError):
        run(MrcProgram(rounds=lambda n: 0, behavior=AcceptAtOnce()), "1")


def test_round_count_must_fit_processor_space():
    program = MrcProgram(rounds=lambda n: 2 ** 10_000, behavior=AcceptAtOnce())
    with pytest.raises(ProgramError):
        run(program, "1")


def test_unknown_acceptance_convention():
    with pytest.raises(ProgramError):
        MrcProgram(rounds=1, behavior=AcceptAtOnce(), acceptance="maybe")


def test_limits_default_values():
    limits = ResourceLimits()
    assert limits.c == Fraction(1, 2)
    assert limits.space_bytes(16) == 4 * 4 * limits.record_bytes
    # evaluated at max(n, 1)
    assert limits.space_bytes(0) == limits.space_bytes(1)
    assert not limits.enforce


def test_bound_at():
    assert Bound(3, Fraction(1, 2)).at(16) == 12


def test_fanout_violation_record_only():
    limits = ResourceLimits(c=Fraction(1, 2), space_constant=1, keys_constant=1)
    result = run(fanout_program(limits), "0" * 16)
    assert result.verdict == ACCEPT
    assert any(v.bound == "keys-per-invocation" for v in result.report.violations)


def test_fanout_violation_enforced():
    limits = ResourceLimits(c=Fraction(1, 2), space_constant=1, keys_constant=1, enforce=True)
    result = run(fanout_program(limits), "0" * 16)
    assert result.verdict == VIOLATION
    (violation,) = [v for v in result.report.violations if v.bound == "keys-per-invocation"]
    assert violation.measured == 16
    assert violation.round == 1
    assert violation.processor == 1
    assert result.report.rounds_executed == 1


def test_round_limit_violation_enforced():
    limits = ResourceLimits(rounds=Bound(1, 0), enforce=True)
    result = run(identity_program(rounds=2, limits=limits), "1")
    assert result.verdict == VIOLATION
    assert result.report.violations[0].bound == "rounds"


# ---------------------------------------------------------------- metering


class Hungry(RoundBehavior):
    def map(self, pair, ctx):
        ctx.tick(7)
        ctx.use(5)
        ctx.use(3)
        return [Pair(b"k", pair.value * 2)]

    def reduce(self, key, values, ctx):
        ctx.tick(len(values))
        ctx.use(11)
        return [b"".join(values)]


def test_metering_is_exact():
    report = run(MrcProgram(rounds=1, behavior=Hungry()), "101").report
    (m,) = report.rounds
    assert m.mapper_steps == 21
    assert m.reducer_steps == 3
    assert m.max_working_space_bytes == 11
    assert m.max_reducer_working_bytes == 11
    assert m.max_group_size == 3
    assert m.distinct_keys_per_mapper_invocation == 1
    # input key "k" plus three two-byte values
    assert m.max_reducer_input_bytes == 1 + 6
    # mapper charge: in (1 + 1) + peak 5 + out (1 + 2)
    assert m.max_space_charge_bytes == max(2 + 5 + 3, 7 + 11 + 1 + 6)
    assert m.shuffle_charge == shuffle_charge(3)
    assert report.simulated_sequential_time == 21 + 3 + shuffle_charge(3)


@given(bits)
@settings(max_examples=30)
def test_sequential_time_is_sum_of_rounds(x):
    report = run(identity_program(rounds=2), x).report
    assert report.simulated_sequential_time == sum(m.sequential_time for m in report.rounds)


# ---------------------------------------------------------------- determinism


@given(bits, st.integers(0, 2**32))
@settings(max_examples=40)
def test_schedule_does_not_change_results(x, seed):
    program = MrcProgram(rounds=1, behavior=Hungry())
    base = run(program, x)
    again = run(program, x, schedule=random.Random(seed))
    assert again.report.to_dict() == base.report.to_dict()
    assert again.output == base.output


def test_keep_states_records_every_round():
    result = run(identity_program(rounds=3), "01", keep_states=True)
    assert [s.round_index for s in result.states] == [0, 1, 2, 3]


def test_result_unpacks_as_verdict_and_report():
    verdict, report = run(identity_program(), "1")
    assert verdict == REJECT
    assert report.n == 1
