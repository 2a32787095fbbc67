from __future__ import annotations

import random
from functools import reduce

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mrcsim.automata import (
    ACCEPT,
    DIVERGED,
    LEFT_END,
    REJECT,
    RIGHT_END,
    SPACE_EXCEEDED,
    TIME_EXCEEDED,
    Dfa,
    MachineError,
    MachineFault,
    Tm,
    compile_away_stays,
    dfa_transition_table,
    run_dfa,
    run_tisp,
    run_tm,
    tm_boundary_function,
)
from mrcsim.corpus import (
    accept_tm,
    contains_one_tm,
    flip_tisp,
    parity_dfa,
    random_bits,
    random_dfa,
    random_tm,
    right_forever_tm,
    tm_family,
)

# ---------------------------------------------------------------- DFAs


def test_parity_toggles_compose_to_identity():
    assert run_dfa(parity_dfa(), "11", "q0") == "q0"


def test_empty_string_stays_put():
    dfa = random_dfa(random.Random(1), 8)
    for q in dfa.states:
        assert run_dfa(dfa, "", q) == q


def test_run_dfa_matches_fold():
    rng = random.Random(7)
    dfa = random_dfa(rng, 8)
    x = random_bits(rng, 1000)
    expected = reduce(lambda q, a: dfa.transitions[(q, a)], x, dfa.start)
    assert run_dfa(dfa, x) == expected


def test_symbol_outside_alphabet():
    with pytest.raises(MachineError):
        run_dfa(parity_dfa(), "012")


def test_transition_tables():
    dfa = parity_dfa()
    assert dfa_transition_table(dfa, "11") == {"q0": "q0", "q1": "q1"}
    assert dfa_transition_table(dfa, "10") == {"q0": "q1", "q1": "q0"}
    assert dfa_transition_table(dfa, "") == {"q0": "q0", "q1": "q1"}


@given(st.integers(0, 2**32), st.text(alphabet="01", max_size=40))
@settings(max_examples=50)
def test_transition_table_is_run_from_every_state(seed, block):
    dfa = random_dfa(random.Random(seed), 6)
    table = dfa_transition_table(dfa, block)
    assert len(table) <= len(dfa.states) ** 2
    assert table == {q: run_dfa(dfa, block, q) for q in dfa.states}


@given(st.integers(0, 2**32), st.text(alphabet="01", max_size=30), st.text(alphabet="01", max_size=30))
@settings(max_examples=50)
def test_transition_tables_compose(seed, u, v):
    dfa = random_dfa(random.Random(seed), 6)
    tu, tv = dfa_transition_table(dfa, u), dfa_transition_table(dfa, v)
    assert dfa_transition_table(dfa, u + v) == {q: tv[tu[q]] for q in dfa.states}


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(start="zz"),
        dict(accepting=("zz",)),
        dict(transitions={("q0", "0"): "q0"}),
    ],
)
def test_dfa_validation(kwargs):
    base = dict(
        states=("q0", "q1"),
        alphabet=("0", "1"),
        transitions=parity_dfa().transitions,
        start="q0",
        accepting=("q0",),
    )
    base.update(kwargs)
    with pytest.raises(MachineError):
        Dfa(**base)


# ---------------------------------------------------------------- work-tape TMs


def test_accepting_initial_state():
    for x in ("", "0", "0110"):
        assert run_tm(accept_tm(), x) == ACCEPT


def test_right_forever_diverges():
    assert run_tm(right_forever_tm(), "0101") == DIVERGED


def test_contains_one_against_scan():
    rng = random.Random(3)
    tm = contains_one_tm()
    for _ in range(100):
        x = random_bits(rng, rng.randint(0, 40))
        assert run_tm(tm, x) == (ACCEPT if "1" in x else REJECT)


def test_work_head_fault():
    delta = {("s", LEFT_END, "_"): ("s", "_", "L", "R")}
    tm = Tm(("s", "acc", "rej"), "s", "acc", "rej", ("_",), "_", delta, 1)
    with pytest.raises(MachineFault):
        run_tm(tm, "0")


def test_family_has_sixty_four_machines():
    family = list(tm_family())
    assert len(family) == 64
    assert all(len(tm.states) <= 3 and tm.work_space_bound <= 2 for tm in family)


def test_config_count():
    tm = contains_one_tm()
    assert tm.config_count == 1 * 1 * 3


@given(st.integers(0, 2**32), st.text(alphabet="01", max_size=12))
@settings(max_examples=60, deadline=None)
def test_compiling_away_stays_preserves_language(seed, x):
    tm = random_tm(random.Random(seed))

    def outcome(machine):
        try:
            return run_tm(machine, x)
        except MachineFault:
            return "fault"

    assert outcome(compile_away_stays(tm)) == outcome(tm)


# ---------------------------------------------------------------- boundary functions


def _brute_force_exit(tm, cells, cfg, side):
    """Step-by-step run over ``cells``, with a plain step budget as the cycle test."""
    tape = list(cfg.tape)
    q, head = cfg.state, cfg.head
    pos = 0 if side == "L" else len(cells) - 1
    budget = 4 * tm.config_count * len(cells) + 4
    for _ in range(budget):
        if q == tm.accept:
            return ACCEPT
        if q == tm.reject:
            return REJECT
        move = tm.delta.get((q, cells[pos], tape[head]))
        if move is None:
            return REJECT
        q, tape[head], wm, im = move
        head += {"L": -1, "R": 1, "S": 0}[wm]
        if not 0 <= head < tm.work_space_bound:
            return "fault"
        step = {"L": -1, "R": 1, "S": 0}[im]
        if pos + step < 0 or pos + step >= len(cells):
            if (step < 0 and cells[pos] == LEFT_END) or (step > 0 and cells[pos] == RIGHT_END):
                return "fault"
            return ("L" if pos + step < 0 else "R", q, tuple(tape), head)
        pos += step
    return DIVERGED


@pytest.mark.parametrize("role", ["leftmost", "interior", "rightmost", "whole"])
@pytest.mark.parametrize("block", ["", "0", "01", "1101"])
def test_boundary_function_against_brute_force(role, block):
    if role == "interior" and not block:
        return
    for tm in list(tm_family())[::5]:
        cells = block
        if role in ("leftmost", "whole"):
            cells = LEFT_END + cells
        if role in ("rightmost", "whole"):
            cells = cells + RIGHT_END
        table = tm_boundary_function(tm, block, role)
        machine = compile_away_stays(tm)
        for (cfg, side), got in table.items():
            expected = _brute_force_exit(machine, cells, cfg, side)
            if isinstance(got, tuple):
                out_cfg, out_side = got
                got = (out_side, out_cfg.state, out_cfg.tape, out_cfg.head)
            assert got == expected, (cfg, side)


def test_boundary_table_is_total():
    tm = contains_one_tm()
    table = tm_boundary_function(tm, "010", "interior")
    # keyed by configurations of the stay-free machine
    assert len(table) == 2 * compile_away_stays(tm).config_count


# ---------------------------------------------------------------- TISP machines


def test_flip_machine():
    result = run_tisp(flip_tisp(), "0110")
    assert result.outcome == ACCEPT
    assert result.tape == "1001"
    # four flips, one step onto the blank
    assert result.steps == 5


def test_tisp_time_budget():
    assert run_tisp(flip_tisp(time=3), "0110").outcome == TIME_EXCEEDED


def test_tisp_space_budget():
    assert run_tisp(flip_tisp(space=4), "0110").outcome == SPACE_EXCEEDED
    assert run_tisp(flip_tisp(space=2), "0110").outcome == SPACE_EXCEEDED


def test_tisp_rejects_blank_in_input():
    with pytest.raises(MachineError):
        run_tisp(flip_tisp(), "0_1")
