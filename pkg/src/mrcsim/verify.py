"""Seeded randomized comparison of a compiled program against an oracle."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

from .automata import ACCEPT as M_ACCEPT
from .automata import Dfa, TispMachine, Tm, run_tisp, run_tm
from .bsp import BspMachine, bsp_to_mrc, mrc_to_bsp, run_bsp
from .core import ACCEPT, REJECT, InputEncoding, MrcProgram, encode_input, run
from .corpus import BITS, _padded_sampler, _unary_sampler, _words_sampler
from .specs import Doc, SpecError, build
from .translators import (
    compile_dfa_to_mrc,
    compile_sublog_tm_to_mrc,
    compile_tisp_to_mrc,
    encode_words,
    simulate_mrc_sequential,
)

ORACLES = ("dfa", "tm", "tisp", "mrc-engine", "bsp-engine")


@dataclass
class Counterexample:
    trial: int
    input: bytes
    expected: str
    got: str


@dataclass
class VerifyResult:
    oracle: str
    trials: int
    agreed: int = 0
    counterexample: Optional[Counterexample] = None
    warnings: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.counterexample is None


Sampler = Callable[[random.Random, int], bytes]


def _alphabet_sampler(alphabet) -> Sampler:
    symbols = sorted(alphabet)

    def sample(rng: random.Random, max_n: int) -> bytes:
        return "".join(rng.choice(symbols) for _ in range(rng.randint(0, max_n))).encode("latin-1")

    return sample


def _sampler_for(doc: Doc) -> Tuple[Sampler, Callable[[bytes], InputEncoding]]:
    kind = doc["kind"]
    if kind == "dfa":
        return _alphabet_sampler(build(doc).alphabet), encode_input
    if kind == "tm":
        return _alphabet_sampler(doc["input_alphabet"]), encode_input
    if kind == "tisp":
        return _alphabet_sampler(set(doc["alphabet"]) - {doc["blank"]}), encode_input
    if kind == "bsp":
        if doc["behavior"] == "mrc2bsp":
            return _sampler_for(doc["program"])
        return _alphabet_sampler(BITS), encode_input
    builtin = doc["builtin"]
    if builtin == "dfa2mrc":
        return _sampler_for(doc["dfa"])
    if builtin == "tm2mrc":
        return _sampler_for(doc["tm"])
    if builtin == "tisp2mrc":
        return _sampler_for(doc["tisp"])
    if builtin == "wordcount":
        return _words_sampler, encode_words
    if builtin == "padded":
        return _padded_sampler, encode_input
    if builtin == "unary":
        return _unary_sampler, encode_input
    return _alphabet_sampler(BITS), encode_input


def _machine_of(doc: Doc, kind: str, builtin: str, field_name: str):
    if doc["kind"] == kind:
        return build(doc)
    if doc["kind"] == "mrc-pipeline" and doc["builtin"] == builtin:
        return build(doc[field_name])
    raise SpecError(f"oracle {kind} needs a {kind} spec or a {builtin} pipeline")


def _program_of(doc: Doc, limit_overrides: Optional[Doc]) -> MrcProgram:
    """The program under test: the pipeline itself, or the machine compiled."""
    kind = doc["kind"]
    if kind == "mrc-pipeline":
        return build(doc, limit_overrides)
    if kind == "dfa":
        return compile_dfa_to_mrc(build(doc))
    if kind == "tm":
        return compile_sublog_tm_to_mrc(build(doc))
    if kind == "tisp":
        return compile_tisp_to_mrc(build(doc))
    raise SpecError("expected a machine or mrc-pipeline spec")


def make_check(doc: Doc, oracle: str, p: int = 4, limit_overrides: Optional[Doc] = None):
    """Return ``check(encoding, raw) -> (expected, got)`` for one trial."""
    if oracle == "dfa":
        dfa: Dfa = _machine_of(doc, "dfa", "dfa2mrc", "dfa")
        program = _program_of(doc, limit_overrides)

        def check(enc, raw):
            expected = ACCEPT if dfa.accepts(raw) else REJECT
            return expected, run(program, enc).verdict

    elif oracle == "tm":
        tm: Tm = _machine_of(doc, "tm", "tm2mrc", "tm")
        program = _program_of(doc, limit_overrides)

        def check(enc, raw):
            expected = ACCEPT if run_tm(tm, raw) == M_ACCEPT else REJECT
            return expected, run(program, enc).verdict

    elif oracle == "tisp":
        machine: TispMachine = _machine_of(doc, "tisp", "tisp2mrc", "tisp")
        program = _program_of(doc, limit_overrides)

        def check(enc, raw):
            oracle_run = run_tisp(machine, raw)
            got = run(program, enc)
            expected = ACCEPT if oracle_run.outcome == M_ACCEPT else REJECT
            # step fidelity: one simulated step per round
            if oracle_run.outcome in (ACCEPT, REJECT) and raw:
                return (
                    f"{expected} in {max(1, oracle_run.steps)} rounds",
                    f"{got.verdict} in {got.report.rounds_executed} rounds",
                )
            return expected, got.verdict

    elif oracle == "mrc-engine":
        program = _program_of(doc, limit_overrides)

        def check(enc, raw):
            direct = run(program, enc)
            seq = simulate_mrc_sequential(program, enc, check=False)
            return (
                f"{direct.verdict} {list(direct.output)}",
                f"{seq.verdict} {list(seq.output)}",
            )

    elif oracle == "bsp-engine":
        if doc["kind"] == "bsp":
            machine_b: BspMachine = build(doc, limit_overrides)
            translated = bsp_to_mrc(machine_b)

            def check(enc, raw):
                direct = run_bsp(machine_b, raw)
                via = run(translated, enc)
                return (
                    f"{direct.verdict} in {direct.report.rounds_executed} rounds",
                    f"{via.verdict} in {via.report.rounds_executed} rounds",
                )

        else:
            program = _program_of(doc, limit_overrides)
            machine_b = mrc_to_bsp(program, p)
            factor = 2 if program.acceptance == "accept-state" else None

            def check(enc, raw):
                direct = run(program, enc)
                via = run_bsp(machine_b, enc)
                if factor is None:
                    return direct.verdict, via.verdict
                return (
                    f"{direct.verdict} in {factor * direct.report.rounds_executed} rounds",
                    f"{via.verdict} in {via.report.rounds_executed} rounds",
                )

    else:
        raise SpecError(f"unknown oracle {oracle!r} (expected one of {', '.join(ORACLES)})")
    return check


def verify(
    doc: Doc,
    oracle: str,
    trials: int,
    max_n: int,
    seed: int,
    *,
    p: int = 4,
    limit_overrides: Optional[Doc] = None,
) -> VerifyResult:
    """Compare the artifact against ``oracle`` on ``trials`` seeded inputs.

    Stops at the first disagreement.
    """
    if trials < 0 or max_n < 0:
        raise SpecError("trials and max n must be non-negative")
    check = make_check(doc, oracle, p, limit_overrides)
    sample, encode = _sampler_for(doc)
    result = VerifyResult(oracle, trials)
    if trials == 0:
        result.warnings.append("0 trials requested: the check is vacuous")
        return result
    rng = random.Random(seed)
    for trial in range(trials):
        raw = sample(rng, max_n)
        expected, got = check(encode(raw), raw)
        if expected != got:
            result.counterexample = Counterexample(trial, raw, expected, got)
            return result
        result.agreed += 1
    return result
