from __future__ import annotations

import math
import random
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mrcsim import ACCEPT, REJECT, ProgramError, encode_input, run
from mrcsim.automata import LEFT_END, RIGHT_END, Tm, run_tisp
from mrcsim.corpus import (
    UNARY_ORACLES,
    accept_tm,
    contains_one_tm,
    ends_with_01_dfa,
    flip_tisp,
    is_palindrome,
    parity_dfa,
    program_corpus,
    random_bits,
    random_dfa,
    tm_family,
)
from mrcsim.translators import (
    BlockPlan,
    InfeasibleSpace,
    MalformedPadding,
    build_unary_nonuniform,
    compile_dfa_to_mrc,
    compile_sublog_tm_to_mrc,
    compile_tisp_to_mrc,
    direct_counts,
    encode_words,
    format_counts,
    make_padded_decider,
    pad_string,
    simulate_mrc_sequential,
    unpad_string,
    unpadded_length,
    wordcount_program,
)
from mrcsim.translators.tisp import TOKEN, segment_size

# ---------------------------------------------------------------- block plans


@given(st.integers(0, 5000), st.sampled_from([Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)]))
def test_block_plan_tiles_positions(n, eps):
    plan = BlockPlan(n, eps)
    covered = [i for j in range(1, plan.K + 1) for i in plan.span(j)]
    assert covered == list(range(1, n + 1))
    assert all(plan.block_of(i) == j for j in range(1, plan.K + 1) for i in plan.span(j))


@pytest.mark.parametrize("eps", [0, 1, Fraction(3, 2)])
def test_epsilon_must_be_a_proper_fraction(eps):
    with pytest.raises(ProgramError):
        compile_dfa_to_mrc(parity_dfa(), eps)


# ---------------------------------------------------------------- DFA


def test_parity_example():
    program = compile_dfa_to_mrc(parity_dfa())
    result = run(program, "0110")
    assert result.verdict == ACCEPT
    assert result.report.rounds_executed == 2
    # b = 2 gives two blocks
    assert result.report.rounds[1].max_group_size == 2


def test_empty_input_follows_start_state():
    rng = random.Random(11)
    for _ in range(20):
        dfa = random_dfa(rng)
        expected = ACCEPT if dfa.start in dfa.accepting else REJECT
        assert run(compile_dfa_to_mrc(dfa), "").verdict == expected


@given(st.integers(0, 2**32), st.text(alphabet="01", max_size=300), st.sampled_from(["1/4", "1/2", "3/4", "2/3"]))
@settings(max_examples=80, deadline=None)
def test_dfa_program_matches_dfa(seed, x, eps):
    dfa = random_dfa(random.Random(seed))
    result = run(compile_dfa_to_mrc(dfa, Fraction(eps)), x)
    assert result.verdict == (ACCEPT if dfa.accepts(x) else REJECT)
    assert result.report.rounds_executed == 2


def test_reversed_composition_is_caught():
    dfa = ends_with_01_dfa()
    bad = compile_dfa_to_mrc(dfa, mutation="reverse-composition")
    rng = random.Random(5)
    disagreements = 0
    for _ in range(50):
        x = random_bits(rng, rng.randint(4, 64))
        disagreements += run(bad, x).verdict != (ACCEPT if dfa.accepts(x) else REJECT)
    assert disagreements > 0


def test_unknown_mutation():
    with pytest.raises(ProgramError):
        compile_dfa_to_mrc(parity_dfa(), mutation="shuffle")


# ---------------------------------------------------------------- sublog TM


def test_contains_one_examples():
    program = compile_sublog_tm_to_mrc(contains_one_tm())
    assert run(program, "00000000").verdict == REJECT
    assert run(program, "00000100").verdict == ACCEPT


def test_immediate_accept_in_round_two():
    result = run(compile_sublog_tm_to_mrc(accept_tm()), "0101")
    assert result.verdict == ACCEPT
    assert result.report.rounds_executed == 2


def _wide_tm(s: int) -> Tm:
    delta = {("s", a, w): ("s", w, "S", "R") for a in ("0", "1", LEFT_END) for w in ("0", "1")}
    delta.update({("s", RIGHT_END, w): ("acc", w, "S", "S") for w in ("0", "1")})
    return Tm(("s", "acc", "rej"), "s", "acc", "rej", ("0", "1"), "0", delta, s)


def test_infeasible_space():
    with pytest.raises(InfeasibleSpace, match="infeasible-space"):
        compile_sublog_tm_to_mrc(_wide_tm(8), n=16)
    compile_sublog_tm_to_mrc(contains_one_tm(), n=16)


@given(st.integers(0, 63), st.text(alphabet="01", max_size=40), st.sampled_from(["1/3", "1/2", "3/4"]))
@settings(max_examples=80, deadline=None)
def test_tm_program_matches_family_member(index, x, eps):
    from test_acceptance import _compiled_outcome, _tm_outcome

    tm = list(tm_family())[index]
    assert _compiled_outcome(compile_sublog_tm_to_mrc(tm, Fraction(eps)), x) == _tm_outcome(tm, x)


# ---------------------------------------------------------------- TISP


def _accept_at_once():
    from mrcsim.automata import TispMachine

    return TispMachine(("a", "r"), "a", "a", "r", ("0", "1", "_"), "_", {}, 10, 10)


def test_immediate_accept_machine():
    machine = _accept_at_once()
    assert run_tisp(machine, "01").steps == 0
    result = run(compile_tisp_to_mrc(machine), "01")
    assert result.verdict == ACCEPT
    assert result.report.rounds_executed == 1


def test_flip_rounds_equal_steps():
    machine = flip_tisp()
    oracle = run_tisp(machine, "1010")
    result = run(compile_tisp_to_mrc(machine), "1010")
    assert result.verdict == ACCEPT
    assert result.report.rounds_executed == oracle.steps == 5


def test_token_crosses_segment_once():
    # n = 3: segments of 2 cells; the head walks cells 0..3
    result = run(compile_tisp_to_mrc(flip_tisp()), "101", keep_states=True)
    assert segment_size(3) == 2
    homes = []
    for state in result.states[1:]:
        homes += [int(k) for k, v in state.pairs if v.startswith(TOKEN)]
    changes = sum(a != b for a, b in zip(homes, homes[1:]))
    assert homes[0] == 1 and homes[-1] == 2
    assert changes == 1


def test_tisp_time_budget_rejects():
    result = run(compile_tisp_to_mrc(flip_tisp(time=3)), "0110")
    assert result.verdict == REJECT
    assert result.report.rounds_executed == 3


def test_tisp_input_longer_than_space():
    result = run(compile_tisp_to_mrc(flip_tisp(space=2)), "0110")
    assert result.verdict == REJECT
    assert result.report.rounds_executed == 1


def test_tisp_empty_input():
    result = run(compile_tisp_to_mrc(flip_tisp()), "")
    assert result.verdict == ACCEPT
    assert result.report.rounds_executed == 1


# ---------------------------------------------------------------- sequential accounting


def test_sequential_matches_engine_on_corpus():
    rng = random.Random(17)
    for entry in program_corpus():
        for _ in range(10):
            enc = entry.encode(entry.sample(rng, 64))
            direct = run(entry.program, enc)
            seq = simulate_mrc_sequential(entry.program, enc, check=False)
            assert seq.verdict == direct.verdict, entry.name
            assert seq.output == direct.output, entry.name
            assert seq.accounting.total == direct.report.simulated_sequential_time, entry.name


def test_wordcount_sequential_output():
    enc = encode_words(b"the fox the")
    assert simulate_mrc_sequential(wordcount_program(), enc).output == run(wordcount_program(), enc).output


def test_empty_input_accounting():
    _, acct = simulate_mrc_sequential(compile_dfa_to_mrc(parity_dfa()), "")
    assert acct.total == 0
    assert acct.mapper_steps == acct.reducer_steps == acct.shuffle_charge == 0
    assert acct.setup_steps == 1


def test_dfa_shuffle_charge_at_1024():
    n = 1024
    _, acct = simulate_mrc_sequential(compile_dfa_to_mrc(parity_dfa()), random_bits(random.Random(2), n))
    assert acct.shuffle_charge <= 4 * n * n * math.log2(n)
    assert acct.total <= acct.envelope


# ---------------------------------------------------------------- padding


def test_pad_examples():
    assert pad_string("11") == "110000"
    assert pad_string("") == ""
    assert unpad_string("110000") == "11"


@given(st.text(alphabet="01", max_size=64))
def test_pad_round_trip(x):
    assert unpad_string(pad_string(x)) == x


def test_unpad_errors():
    assert unpadded_length(7) is None
    with pytest.raises(MalformedPadding):
        unpad_string("0" * 7)
    with pytest.raises(MalformedPadding):
        unpad_string("110100")


def test_padded_palindrome():
    program = make_padded_decider(is_palindrome)
    assert run(program, "aba" + "0" * 9).verdict == ACCEPT
    assert run(program, "ab" + "0" * 4).verdict == REJECT
    assert run(program, "0" * 7).verdict == REJECT
    assert run(program, "11" + "0010").verdict == REJECT


# ---------------------------------------------------------------- unary


def test_unary_examples():
    even = build_unary_nonuniform(UNARY_ORACLES["even"])
    result = run(even, "1111")
    assert (result.verdict, result.report.rounds_executed) == (ACCEPT, 7)
    never = run(build_unary_nonuniform(UNARY_ORACLES["never"]), "111")
    assert (never.verdict, never.report.rounds_executed) == (REJECT, 6)
    assert run(even, "").verdict == ACCEPT
    assert run(build_unary_nonuniform(UNARY_ORACLES["odd"]), "").verdict == REJECT


def test_unary_rejects_non_unary_in_round_one():
    result = run(build_unary_nonuniform(UNARY_ORACLES["always"]), "1101")
    assert (result.verdict, result.report.rounds_executed) == (REJECT, 1)


@pytest.mark.parametrize("name", sorted(UNARY_ORACLES))
def test_unary_oracles(name):
    oracle = UNARY_ORACLES[name]
    program = build_unary_nonuniform(oracle)
    for n in range(0, 30):
        assert run(program, "1" * n).verdict == (ACCEPT if oracle(n) else REJECT)


# ---------------------------------------------------------------- word count

words = st.lists(st.sampled_from(["the", "fox", "a", "dog", "x"]), max_size=40)


@given(words, st.sampled_from([" ", "  ", "\n", "\t"]))
@settings(max_examples=60)
def test_wordcount_matches_counter(ws, sep):
    text = sep.join(ws).encode()
    result = run(wordcount_program(), encode_words(text))
    expected = sorted(Counter(w.encode() for w in ws).items())
    assert format_counts(result.output) == expected
    assert direct_counts(text) == expected


def test_wordcount_example():
    result = run(wordcount_program(), encode_words(b"the quick fox the"))
    assert format_counts(result.output) == [(b"fox", 1), (b"quick", 1), (b"the", 2)]


def test_wordcount_encoding():
    enc = encode_words(b"a bb")
    # n counts the bytes of the pairs: (1, a) and (2, bb)
    assert enc.n == 5
    assert [p.value for p in enc.pairs] == [b"a", b"bb"]
    assert encode_input(b"").n == encode_words(b"").n == 0
