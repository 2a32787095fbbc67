"""Command-line interface: ``mrcsim run | compile | verify | wordcount``.

Exit codes: 0 accept, 1 reject, 2 resource violation, 3 invalid spec or
input, 4 internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import shlex
import sys
import time
from fractions import Fraction
from typing import List, Optional

from . import __version__
from .automata import MachineError, MachineFault, run_tisp, run_tm
from .bsp import run_bsp
from .core import ACCEPT, VIOLATION, BehaviorError, MrcError, MrcProgram, ProgramError, encode_input, run
from .specs import (
    SCHEMA,
    SpecError,
    build,
    dumps,
    loads,
    normalize,
    parse_limits_flag,
    strip_schema,
)
from .translators import (
    InfeasibleSpace,
    MalformedPadding,
    compile_sublog_tm_to_mrc,
    encode_words,
    format_counts,
    simulate_mrc_sequential,
    wordcount_program,
)
from .verify import ORACLES, verify

EXIT_ACCEPT, EXIT_REJECT, EXIT_VIOLATION, EXIT_INVALID, EXIT_INTERNAL = range(5)
COMPILE_KINDS = ("dfa2mrc", "tm2mrc", "tisp2mrc", "mrc2bsp", "bsp2mrc", "pad-decider")


class InputError(MrcError):
    pass


def _read(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _bits(raw: bytes) -> bytes:
    """Input file contents minus one optional trailing newline."""
    if raw.endswith(b"\r\n"):
        return raw[:-2]
    if raw.endswith(b"\n"):
        return raw[:-1]
    return raw


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


def _pairs_json(pairs) -> List[List[str]]:
    return [[k.decode("latin-1"), v.decode("latin-1")] for k, v in pairs]


# ---------------------------------------------------------------- run


def _run_document(doc, data: bytes, overrides, seed, sequential: bool):
    """Returns (verdict, engine, limits dict or None, report dict)."""
    obj = build(doc, overrides)
    kind = doc["kind"]
    if kind == "dfa":
        state = obj.accepts(data)
        return (ACCEPT if state else "reject"), "dfa", None, {"n": len(data), "accepted": state}
    if kind == "tm":
        outcome = run_tm(obj, data)
        return (ACCEPT if outcome == ACCEPT else "reject"), "tm", None, {"n": len(data), "outcome": outcome}
    if kind == "tisp":
        result = run_tisp(obj, data)
        verdict = ACCEPT if result.outcome == ACCEPT else "reject"
        report = {"n": len(data), "outcome": result.outcome, "steps": result.steps, "cells": result.cells}
        return verdict, "tisp", None, report
    if kind == "bsp":
        result = run_bsp(obj, data, schedule=seed)
        report = result.report.to_dict()
        report["output"] = [[i, m.dest, m.payload.decode("latin-1")] for i, m in result.output]
        return result.verdict, "bsp", obj.limits.to_dict(), report
    program: MrcProgram = obj
    encoding = encode_words(data) if doc["builtin"] == "wordcount" else encode_input(data)
    result = run(program, encoding, schedule=seed)
    report = result.report.to_dict()
    report["output"] = _pairs_json(result.output)
    if sequential:
        seq = simulate_mrc_sequential(program, encoding, check=False)
        acct = seq.accounting
        report["sequential"] = {
            "verdict": seq.verdict,
            "rounds": [vars(r) for r in acct.rounds],
            "setup_steps": acct.setup_steps,
            "mapper_steps": acct.mapper_steps,
            "reducer_steps": acct.reducer_steps,
            "shuffle_charge": acct.shuffle_charge,
            "total": acct.total,
            "envelope": acct.envelope,
            "beta": acct.beta,
            "limits_respected": acct.limits_respected,
        }
    return result.verdict, "mrc", program.limits.to_dict(), report


def cmd_run(args) -> int:
    spec_bytes = _read(args.spec)
    doc = loads(spec_bytes)
    raw = _read(args.input)
    data = raw if doc["kind"] == "mrc-pipeline" and doc["builtin"] == "wordcount" else _bits(raw)
    overrides = parse_limits_flag(args.limits) if args.limits else None
    started = time.perf_counter()
    verdict, engine, limits, report = _run_document(doc, data, overrides, args.seed, args.sequential)
    duration = time.perf_counter() - started
    document = {
        "schema": SCHEMA,
        "artifact_version": __version__,
        "engine": engine,
        "spec_digest": _digest(spec_bytes),
        "input_digest": _digest(raw),
        "limits": limits,
        "verdict": verdict,
        "report": report,
        "duration_seconds": round(duration, 6),
    }
    if args.report:
        _write(args.report, json.dumps(document, sort_keys=True, indent=2) + "\n")
    print(verdict)
    if verdict == VIOLATION:
        for v in report.get("violations", [])[-1:]:
            print(
                f"resource violation: round {v['round']}, {v['phase']} processor {v['processor']}, "
                f"bound {v['bound']}: measured {v['measured']} > limit {v['limit']}",
                file=sys.stderr,
            )
        return EXIT_VIOLATION
    return EXIT_ACCEPT if verdict == ACCEPT else EXIT_REJECT


# ---------------------------------------------------------------- compile


def _pipeline(builtin: str, **params) -> dict:
    return normalize({"schema": SCHEMA, "kind": "mrc-pipeline", "builtin": builtin, **params})


def cmd_compile(args) -> int:
    doc = loads(_read(args.spec))
    kind = args.kind
    epsilon = args.epsilon

    def expect(*kinds):
        if doc["kind"] not in kinds:
            raise SpecError(f"{kind} needs a {' or '.join(kinds)} spec, got {doc['kind']}")

    if kind == "dfa2mrc":
        expect("dfa")
        out = _pipeline("dfa2mrc", dfa=strip_schema(doc), epsilon=epsilon)
    elif kind == "tm2mrc":
        expect("tm")
        out = _pipeline("tm2mrc", tm=strip_schema(doc), epsilon=epsilon)
        if args.n is not None:
            overrides = parse_limits_flag(args.limits) if args.limits else {}
            program = build(out, overrides)
            compile_sublog_tm_to_mrc(build(doc), Fraction(epsilon), n=args.n, limits=program.limits)
    elif kind == "tisp2mrc":
        expect("tisp")
        out = _pipeline("tisp2mrc", tisp=strip_schema(doc))
    elif kind == "mrc2bsp":
        expect("mrc-pipeline")
        out = normalize({"schema": SCHEMA, "kind": "bsp", "p": args.p, "behavior": "mrc2bsp", "program": strip_schema(doc)})
    elif kind == "bsp2mrc":
        expect("bsp")
        out = _pipeline("bsp2mrc", bsp=strip_schema(doc))
    else:
        expect("dfa")
        out = _pipeline("padded", base_dfa=strip_schema(doc))
    build(out)
    _write(args.out, dumps(out))
    return 0


# ---------------------------------------------------------------- verify


def cmd_verify(args) -> int:
    doc = loads(_read(args.spec))
    overrides = parse_limits_flag(args.limits) if args.limits else None
    result = verify(doc, args.oracle, args.trials, args.max_n, args.seed, p=args.p, limit_overrides=overrides)
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if result.ok:
        print(f"ok: {result.agreed}/{result.trials} trials agree with the {args.oracle} oracle (seed {args.seed})")
        return 0
    cx = result.counterexample
    shown = cx.input.decode("latin-1")
    print(f"FAIL: trial {cx.trial} disagrees with the {args.oracle} oracle")
    print(f"  input:    {shown!r} (n={len(cx.input)})")
    print(f"  expected: {cx.expected}")
    print(f"  got:      {cx.got}")
    repro = [
        "mrcsim", "verify", "--spec", args.spec, "--oracle", args.oracle,
        "--trials", str(args.trials), "--max-n", str(args.max_n), "--seed", str(args.seed), "--p", str(args.p),
    ]
    if args.limits:
        repro += ["--limits", args.limits]
    print("  reproduce: " + " ".join(shlex.quote(part) for part in repro))
    print(f"  run alone: printf %s {shlex.quote(shown)} > cx.txt && mrcsim run --spec {shlex.quote(args.spec)} --input cx.txt")
    return 1


# ---------------------------------------------------------------- wordcount


def cmd_wordcount(args) -> int:
    text = _read(args.input)
    result = run(wordcount_program(), encode_words(text))
    out = sys.stdout.buffer
    for token, count in format_counts(result.output):
        out.write(token + b"\t" + str(count).encode() + b"\n")
    out.flush()
    return 0


# ---------------------------------------------------------------- entry point


def _rational_arg(text: str) -> str:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None
    return f"{value.numerator}/{value.denominator}" if value.denominator != 1 else str(value.numerator)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mrcsim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute a spec on an input file and report")
    p.add_argument("--spec", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--limits", help="e.g. c=1/2,const=1,enforce")
    p.add_argument("--report", help="write the JSON report here ('-' for stdout)")
    p.add_argument("--seed", type=int, help="permute the intra-round schedule (results do not change)")
    p.add_argument("--sequential", action="store_true", help="add the sequential time accounting")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compile", help="compile a machine spec into a pipeline or BSP spec")
    p.add_argument("--kind", required=True, choices=COMPILE_KINDS)
    p.add_argument("--spec", required=True)
    p.add_argument("--epsilon", type=_rational_arg, default="1/2")
    p.add_argument("--n", type=int, help="check that the tm2mrc collector fits at this input length")
    p.add_argument("--limits", help="limits used by the --n feasibility check")
    p.add_argument("--p", type=int, default=4, help="processor count for mrc2bsp")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("verify", help="randomized comparison against an oracle")
    p.add_argument("--spec", required=True)
    p.add_argument("--oracle", required=True, choices=ORACLES)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--max-n", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=int, default=4, help="processor count for the bsp-engine oracle")
    p.add_argument("--limits")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("wordcount", help="two-round word frequency count")
    p.add_argument("input")
    p.set_defaults(func=cmd_wordcount)
    return parser


INVALID = (SpecError, InputError, MachineError, MachineFault, BehaviorError, ProgramError, MalformedPadding)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which would read as a violation
        return EXIT_INVALID if exc.code else 0
    try:
        return args.func(args)
    except INVALID as exc:
        label = "infeasible-space" if isinstance(exc, InfeasibleSpace) else type(exc).__name__
        message = str(exc)
        prefix = "" if message.startswith(label) else f"{label}: "
        print(f"mrcsim: {prefix}{message}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001 - every path must map to a code
        print(f"mrcsim: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
