"""Named machines, random machine generators and the test program corpus."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterator, List, Sequence

from .automata import LEFT_END, RIGHT_END, Dfa, TispMachine, Tm
from .bsp import BspMachine, OnesParity, PingPong, bsp_to_mrc
from .core import Context, InputEncoding, MrcProgram, Pair, ResourceLimits, RoundBehavior, encode_input
from .translators import (
    build_unary_nonuniform,
    compile_dfa_to_mrc,
    compile_sublog_tm_to_mrc,
    compile_tisp_to_mrc,
    encode_words,
    make_padded_decider,
    pad_string,
    wordcount_program,
)

BITS = ("0", "1")


# ---------------------------------------------------------------- DFAs


def parity_dfa() -> Dfa:
    """Even number of 1s."""
    return Dfa(
        states=("q0", "q1"),
        alphabet=BITS,
        transitions={("q0", "0"): "q0", ("q0", "1"): "q1", ("q1", "0"): "q1", ("q1", "1"): "q0"},
        start="q0",
        accepting=("q0",),
    )


def ends_with_01_dfa() -> Dfa:
    """Non-commutative transition monoid: block order matters."""
    t = {
        ("a", "0"): "b", ("a", "1"): "a",
        ("b", "0"): "b", ("b", "1"): "c",
        ("c", "0"): "b", ("c", "1"): "a",
    }
    return Dfa(states=("a", "b", "c"), alphabet=BITS, transitions=t, start="a", accepting=("c",))


def random_dfa(rng: random.Random, max_states: int = 10) -> Dfa:
    k = rng.randint(1, max_states)
    states = tuple(f"s{i}" for i in range(k))
    transitions = {(q, a): rng.choice(states) for q in states for a in BITS}
    accepting = tuple(q for q in states if rng.random() < 0.5)
    return Dfa(states, BITS, transitions, rng.choice(states), accepting)


def random_bits(rng: random.Random, n: int) -> str:
    return "".join(rng.choice(BITS) for _ in range(n))


# ---------------------------------------------------------------- work-tape TMs


def contains_one_tm() -> Tm:
    """Scans right; accepts at the first 1, rejects at the right end-marker."""
    delta = {
        ("s", LEFT_END, "_"): ("s", "_", "S", "R"),
        ("s", "0", "_"): ("s", "_", "S", "R"),
        ("s", "1", "_"): ("acc", "_", "S", "S"),
        ("s", RIGHT_END, "_"): ("rej", "_", "S", "S"),
    }
    return Tm(("s", "acc", "rej"), "s", "acc", "rej", ("_",), "_", delta, 1)


def accept_tm() -> Tm:
    return Tm(("acc", "rej"), "acc", "acc", "rej", ("_",), "_", {}, 1)


def right_forever_tm() -> Tm:
    """Walks right, bounces off the right end-marker and back, forever."""
    delta = {
        ("s", LEFT_END, "_"): ("s", "_", "S", "R"),
        ("s", "0", "_"): ("s", "_", "S", "R"),
        ("s", "1", "_"): ("s", "_", "S", "R"),
        ("s", RIGHT_END, "_"): ("t", "_", "S", "L"),
        ("t", "0", "_"): ("t", "_", "S", "L"),
        ("t", "1", "_"): ("t", "_", "S", "L"),
        ("t", LEFT_END, "_"): ("s", "_", "S", "R"),
    }
    return Tm(("s", "t", "acc", "rej"), "s", "acc", "rej", ("_",), "_", delta, 1)


def _family_action(action: str, a: str, w: str):
    flip = "1" if w == "0" else "0"
    if action == "pass":
        return ("s", w, "S", "R")
    if action == "write":
        return ("s", a, "S", "R")
    if action == "flip":
        return ("s", flip, "R" if w == "0" else "L", "R")
    if action == "back":
        return ("s", "1", "S", "L") if w == "0" else ("s", w, "S", "R")
    raise ValueError(action)


FAMILY_ACTIONS = ("pass", "write", "flip", "back")
FAMILY_END_RULES = ("judge", "bounce")


def tm_family() -> Iterator[Tm]:
    """A fixed enumerable family: states {s, acc, rej}, work alphabet {0, 1},
    s in {1, 2}; one action per input bit and one right-end rule.

    64 machines.  Some fault (work head leaves its tape) and some diverge.
    """
    for s, end_rule, on0, on1 in itertools.product((1, 2), FAMILY_END_RULES, FAMILY_ACTIONS, FAMILY_ACTIONS):
        delta = {}
        for w in BITS:
            delta[("s", LEFT_END, w)] = ("s", w, "S", "R")
            delta[("s", "0", w)] = _family_action(on0, "0", w)
            delta[("s", "1", w)] = _family_action(on1, "1", w)
            if w == "1":
                delta[("s", RIGHT_END, w)] = ("acc", w, "S", "S")
            elif end_rule == "judge":
                delta[("s", RIGHT_END, w)] = ("rej", w, "S", "S")
            else:
                delta[("s", RIGHT_END, w)] = ("s", "1", "S", "L")
        yield Tm(("s", "acc", "rej"), "s", "acc", "rej", BITS, "0", delta, s)


def random_tm(rng: random.Random, work_space: int = 2, working_states: int = 2) -> Tm:
    """Random total machine; every move, including stays, is possible."""
    working = tuple(f"q{i}" for i in range(working_states))
    states = working + ("acc", "rej")
    gamma = ("_", "a")
    delta = {}
    for q in working:
        for sym in BITS + (LEFT_END, RIGHT_END):
            for w in gamma:
                q2 = rng.choice(states)
                wm = rng.choice("LRS")
                im = rng.choice("LRS")
                if sym == LEFT_END and im == "L":
                    im = "R"
                if sym == RIGHT_END and im == "R":
                    im = "L"
                delta[(q, sym, w)] = (q2, rng.choice(gamma), wm, im)
    return Tm(states, "q0", "acc", "rej", gamma, "_", delta, work_space)


# ---------------------------------------------------------------- TISP machines


def flip_tisp(space: int = 64, time: int = 200) -> TispMachine:
    """Flips every bit, then accepts on the first blank."""
    delta = {("s", "0"): ("s", "1", "R"), ("s", "1"): ("s", "0", "R"), ("s", "_"): ("a", "_", "L")}
    return TispMachine(("s", "a", "r"), "s", "a", "r", ("0", "1", "_"), "_", delta, time, space)


def random_tisp(rng: random.Random, states: int = 3, time: int = 60, space: int = 32) -> TispMachine:
    """Random machine whose initial state is not halting."""
    working = tuple(f"q{i}" for i in range(states))
    all_states = working + ("acc", "rej")
    alphabet = ("0", "1", "_")
    delta = {}
    for q in working:
        for a in alphabet:
            if rng.random() < 0.1:
                continue
            delta[(q, a)] = (rng.choice(all_states + working), rng.choice(alphabet), rng.choice("LRRR"))
    return TispMachine(all_states, "q0", "acc", "rej", alphabet, "_", delta, time, space)


# ---------------------------------------------------------------- deciders and oracles


def is_palindrome(x: str) -> bool:
    return x == x[::-1]


def has_even_ones(x: str) -> bool:
    return x.count("1") % 2 == 0


def no_double_one(x: str) -> bool:
    return "11" not in x


BASE_DECIDERS: Dict[str, Callable[[str], bool]] = {
    "palindrome": is_palindrome,
    "even-ones": has_even_ones,
    "no-11": no_double_one,
}


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))


UNARY_ORACLES: Dict[str, Callable[[int], bool]] = {
    "even": lambda n: n % 2 == 0,
    "odd": lambda n: n % 2 == 1,
    "prime": _is_prime,
    "square": lambda n: int(n**0.5) ** 2 == n,
    "always": lambda n: True,
    "never": lambda n: False,
}


# ---------------------------------------------------------------- small programs


class FanOut(RoundBehavior):
    """Pair 1 emits n distinct keys; the reducer for key 1 accepts."""

    def map(self, pair: Pair, ctx: Context):
        ctx.tick()
        if pair.key != b"1":
            return []
        ctx.tick(ctx.n)
        return [Pair(b"%d" % i, b"") for i in range(1, ctx.n + 1)]

    def reduce(self, key: bytes, values, ctx: Context):
        ctx.tick()
        if key == b"1":
            ctx.accept()
        return []


def fanout_program(limits: ResourceLimits = ResourceLimits()) -> MrcProgram:
    return MrcProgram(rounds=1, behavior=FanOut(), limits=limits, empty_input=lambda: (False, 1), name="fanout")


class NoOnes(RoundBehavior):
    """Keeps only the 1s; with the empty-final-round convention this accepts 0*."""

    def map(self, pair: Pair, ctx: Context):
        ctx.tick()
        return [pair] if pair.value == b"1" else []

    def reduce(self, key: bytes, values, ctx: Context):
        ctx.tick(len(values))
        return list(values)


def no_ones_program() -> MrcProgram:
    return MrcProgram(rounds=1, behavior=NoOnes(), acceptance="empty-final-round", name="no-ones")


# ---------------------------------------------------------------- corpus


@dataclass
class CorpusEntry:
    """A program plus a generator of inputs (bit strings or other bytes)."""

    name: str
    program: MrcProgram
    sample: Callable[[random.Random, int], bytes]
    encode: Callable[[bytes], InputEncoding] = encode_input


def _bits_sampler(rng: random.Random, max_n: int) -> bytes:
    return random_bits(rng, rng.randint(0, max_n)).encode()


def _unary_sampler(rng: random.Random, max_n: int) -> bytes:
    n = rng.randint(0, max_n)
    if rng.random() < 0.1 and n:
        k = rng.randrange(n)
        return ("1" * k + "0" + "1" * (n - k - 1)).encode()
    return b"1" * n


def _padded_sampler(rng: random.Random, max_n: int) -> bytes:
    n = 0
    while (n + 1) + (n + 1) ** 2 <= max(2, max_n):
        n += 1
    x = random_bits(rng, rng.randint(0, n)).encode()
    if rng.random() < 0.1:
        return x + b"0"
    return pad_string(x)


def _words_sampler(rng: random.Random, max_n: int) -> bytes:
    words = [rng.choice(["the", "fox", "a", "dog", "ran"]) for _ in range(rng.randint(0, max(0, max_n // 4)))]
    return " ".join(words).encode()


def program_corpus() -> List[CorpusEntry]:
    """Programs used by the envelope, cross-simulation and determinism checks.

    Every entry uses the accept-state convention.
    """
    rng = random.Random(2024)
    return [
        CorpusEntry("dfa-parity", compile_dfa_to_mrc(parity_dfa()), _bits_sampler),
        CorpusEntry("dfa-ends-01", compile_dfa_to_mrc(ends_with_01_dfa(), Fraction(1, 4)), _bits_sampler),
        CorpusEntry("dfa-random", compile_dfa_to_mrc(random_dfa(rng), Fraction(3, 4)), _bits_sampler),
        CorpusEntry("tm-contains-one", compile_sublog_tm_to_mrc(contains_one_tm()), _bits_sampler),
        CorpusEntry("tm-family-7", compile_sublog_tm_to_mrc(list(tm_family())[7]), _bits_sampler),
        CorpusEntry("tisp-flip", compile_tisp_to_mrc(flip_tisp()), _bits_sampler),
        CorpusEntry("wordcount", wordcount_program(), _words_sampler, encode_words),
        CorpusEntry("padded-palindrome", make_padded_decider(is_palindrome), _padded_sampler),
        CorpusEntry("unary-even", build_unary_nonuniform(UNARY_ORACLES["even"]), _unary_sampler),
        CorpusEntry("bsp-parity", bsp_to_mrc(BspMachine(3, OnesParity(), 2)), _bits_sampler),
        CorpusEntry("bsp-ping-pong", bsp_to_mrc(BspMachine(2, PingPong(), 4)), _bits_sampler),
    ]
