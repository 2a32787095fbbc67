"""JSON machine documents: validation, normalisation and building.

Every document is a JSON object with ``"schema": "mrcsim/1"`` and a
``kind`` in {dfa, tm, tisp, mrc-pipeline, bsp}.  Unknown fields are
rejected and rationals are ``"num/den"`` strings.  :func:`normalize`
returns the canonical form (sorted transition lists, canonical rationals,
defaults filled in), so ``normalize(loads(dumps(normalize(d))))`` is
``normalize(d)``.
"""

from __future__ import annotations

import dataclasses
import json
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Union

from . import bsp as bsp_module
from .automata import Dfa, MachineError, TispMachine, Tm
from .bsp import BspMachine, mrc_to_bsp
from .core import Bound, MrcError, MrcProgram, ProgramError, ResourceLimits
from .corpus import BASE_DECIDERS, UNARY_ORACLES, fanout_program, no_ones_program
from .interpreted import InterpretedBehavior, interpreted_program
from .numeric import as_fraction, format_fraction
from .regex import RegexError, regex_to_dfa
from .translators import (
    build_unary_nonuniform,
    compile_dfa_to_mrc,
    compile_sublog_tm_to_mrc,
    compile_tisp_to_mrc,
    make_padded_decider,
    wordcount_program,
)

SCHEMA = "mrcsim/1"
KINDS = ("dfa", "tm", "tisp", "mrc-pipeline", "bsp")
BUILTINS = (
    "dfa2mrc",
    "tm2mrc",
    "tisp2mrc",
    "wordcount",
    "padded",
    "unary",
    "bsp2mrc",
    "fanout",
    "no-ones",
    "interpreted",
)
BSP_BEHAVIORS = ("accept-first", "echo", "ping-pong", "ones-parity", "mrc2bsp")

Doc = Dict[str, Any]


class SpecError(MrcError):
    """The document is malformed or describes an invalid machine."""


# ---------------------------------------------------------------- field helpers


def _check_fields(doc: Any, where: str, required: Iterable[str], optional: Iterable[str] = ()) -> None:
    if not isinstance(doc, dict):
        raise SpecError(f"{where}: expected an object")
    required, optional = set(required), set(optional)
    unknown = set(doc) - required - optional
    if unknown:
        raise SpecError(f"{where}: unknown field(s) {', '.join(sorted(unknown))}")
    missing = required - set(doc)
    if missing:
        raise SpecError(f"{where}: missing field(s) {', '.join(sorted(missing))}")


def _str(value: Any, where: str) -> str:
    if not isinstance(value, str):
        raise SpecError(f"{where}: expected a string")
    return value


def _str_list(value: Any, where: str) -> List[str]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise SpecError(f"{where}: expected a list of strings")
    return list(value)


def _int(value: Any, where: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise SpecError(f"{where}: expected an integer >= {minimum}")
    return value


def _rational(value: Any, where: str) -> str:
    if not isinstance(value, str):
        raise SpecError(f'{where}: rationals are written as "num/den" strings')
    try:
        return format_fraction(as_fraction(value))
    except (TypeError, ValueError) as exc:
        raise SpecError(f"{where}: {exc}") from None


def _rows(value: Any, where: str, width: int, key_width: int) -> List[List[str]]:
    """Transition rows of ``width`` strings; the first ``key_width`` form the key."""
    if not isinstance(value, list):
        raise SpecError(f"{where}: expected a list of rows")
    rows = []
    for k, row in enumerate(value):
        if not isinstance(row, list) or len(row) != width or not all(isinstance(c, str) for c in row):
            raise SpecError(f"{where}[{k}]: expected {width} strings")
        rows.append(list(row))
    keys = [tuple(r[:key_width]) for r in rows]
    if len(set(keys)) != len(keys):
        raise SpecError(f"{where}: duplicate transition")
    return sorted(rows)


def _machine(build, where: str):
    try:
        return build()
    except MachineError as exc:
        raise SpecError(f"{where}: {exc}") from None


# ---------------------------------------------------------------- limits


LIMIT_FIELDS = ("c", "space_constant", "time", "keys_constant", "rounds", "record_bytes", "enforce")


def _bound_doc(value: Any, where: str) -> Doc:
    _check_fields(value, where, ("constant", "exponent"))
    return {"constant": _rational(value["constant"], where + ".constant"),
            "exponent": _rational(value["exponent"], where + ".exponent")}


def normalize_limits(doc: Any, where: str = "limits") -> Doc:
    _check_fields(doc, where, (), LIMIT_FIELDS)
    out: Doc = {}
    for name in ("c", "space_constant", "keys_constant"):
        if name in doc:
            out[name] = _rational(doc[name], f"{where}.{name}")
    for name in ("time", "rounds"):
        if name in doc:
            out[name] = _bound_doc(doc[name], f"{where}.{name}")
    if "record_bytes" in doc:
        out["record_bytes"] = _int(doc["record_bytes"], f"{where}.record_bytes", 1)
    if "enforce" in doc:
        if not isinstance(doc["enforce"], bool):
            raise SpecError(f"{where}.enforce: expected true or false")
        out["enforce"] = doc["enforce"]
    # validate the combination on the defaults
    apply_limits(ResourceLimits(), out)
    return out


def apply_limits(limits: ResourceLimits, overrides: Doc) -> ResourceLimits:
    """``limits`` with the fields of a (normalised) limits document replaced."""
    changes: Dict[str, Any] = {}
    try:
        for name, value in overrides.items():
            if name in ("time", "rounds"):
                changes[name] = Bound(value["constant"], value["exponent"])
            elif name in ("c", "space_constant", "keys_constant"):
                changes[name] = as_fraction(value)
            else:
                changes[name] = value
        return dataclasses.replace(limits, **changes)
    except (ProgramError, ValueError) as exc:
        raise SpecError(f"limits: {exc}") from None


def parse_limits_flag(text: str) -> Doc:
    """``c=1/2,const=1,space=4,keys=4,time=4:1,rounds=4:0,record=16,enforce``.

    ``const`` sets both the space and key constants; bounds are
    ``constant:exponent``.
    """
    out: Doc = {}
    for item in filter(None, (part.strip() for part in text.split(","))):
        name, sep, value = item.partition("=")
        name = name.strip()
        if name == "enforce":
            out["enforce"] = (not sep) or value.strip().lower() in ("1", "true", "yes", "on")
            continue
        if not sep:
            raise SpecError(f"--limits: {name!r} needs a value")
        value = value.strip()
        if name == "c":
            out["c"] = value
        elif name == "const":
            out["space_constant"] = out["keys_constant"] = value
        elif name == "space":
            out["space_constant"] = value
        elif name == "keys":
            out["keys_constant"] = value
        elif name in ("time", "rounds"):
            constant, sep2, exponent = value.partition(":")
            out[name] = {"constant": constant, "exponent": exponent if sep2 else "0"}
        elif name == "record":
            try:
                out["record_bytes"] = int(value)
            except ValueError:
                raise SpecError(f"--limits: record must be an integer, got {value!r}") from None
        else:
            raise SpecError(f"--limits: unknown setting {name!r}")
    return normalize_limits(out, "--limits")


# ---------------------------------------------------------------- machines


def _normalize_dfa(doc: Doc, where: str) -> Doc:
    if "regex" in doc:
        _check_fields(doc, where, ("kind", "regex"), ("schema",))
        pattern = _str(doc["regex"], where + ".regex")
        try:
            regex_to_dfa(pattern)
        except RegexError as exc:
            raise SpecError(f"{where}.regex: {exc}") from None
        return {"kind": "dfa", "regex": pattern}
    _check_fields(doc, where, ("kind", "states", "transitions", "start", "accepting"), ("schema", "alphabet"))
    out = {
        "kind": "dfa",
        "states": _str_list(doc["states"], where + ".states"),
        "alphabet": _str_list(doc.get("alphabet", ["0", "1"]), where + ".alphabet"),
        "transitions": _rows(doc["transitions"], where + ".transitions", 3, 2),
        "start": _str(doc["start"], where + ".start"),
        "accepting": sorted(_str_list(doc["accepting"], where + ".accepting")),
    }
    _machine(lambda: _build_dfa(out), where)
    return out


def _build_dfa(doc: Doc) -> Dfa:
    if "regex" in doc:
        return regex_to_dfa(doc["regex"])
    return Dfa(
        states=doc["states"],
        alphabet=doc["alphabet"],
        transitions={(q, a): q2 for q, a, q2 in doc["transitions"]},
        start=doc["start"],
        accepting=doc["accepting"],
    )


def _normalize_tm(doc: Doc, where: str) -> Doc:
    _check_fields(
        doc,
        where,
        ("kind", "states", "initial", "accept", "reject", "work_alphabet", "blank", "work_space_bound", "delta"),
        ("schema", "input_alphabet"),
    )
    out = {
        "kind": "tm",
        "states": _str_list(doc["states"], where + ".states"),
        "initial": _str(doc["initial"], where + ".initial"),
        "accept": _str(doc["accept"], where + ".accept"),
        "reject": _str(doc["reject"], where + ".reject"),
        "input_alphabet": _str_list(doc.get("input_alphabet", ["0", "1"]), where + ".input_alphabet"),
        "work_alphabet": _str_list(doc["work_alphabet"], where + ".work_alphabet"),
        "blank": _str(doc["blank"], where + ".blank"),
        "work_space_bound": _int(doc["work_space_bound"], where + ".work_space_bound", 1),
        "delta": _rows(doc["delta"], where + ".delta", 7, 3),
    }
    _machine(lambda: _build_tm(out), where)
    return out


def _build_tm(doc: Doc) -> Tm:
    return Tm(
        states=doc["states"],
        initial=doc["initial"],
        accept=doc["accept"],
        reject=doc["reject"],
        work_alphabet=doc["work_alphabet"],
        blank=doc["blank"],
        delta={(q, a, w): (q2, w2, wm, im) for q, a, w, q2, w2, wm, im in doc["delta"]},
        work_space_bound=doc["work_space_bound"],
        input_alphabet=doc["input_alphabet"],
    )


def _normalize_tisp(doc: Doc, where: str) -> Doc:
    _check_fields(
        doc,
        where,
        ("kind", "states", "initial", "accept", "reject", "alphabet", "blank", "time_budget", "space_budget", "delta"),
        ("schema",),
    )
    out = {
        "kind": "tisp",
        "states": _str_list(doc["states"], where + ".states"),
        "initial": _str(doc["initial"], where + ".initial"),
        "accept": _str(doc["accept"], where + ".accept"),
        "reject": _str(doc["reject"], where + ".reject"),
        "alphabet": _str_list(doc["alphabet"], where + ".alphabet"),
        "blank": _str(doc["blank"], where + ".blank"),
        "time_budget": _int(doc["time_budget"], where + ".time_budget"),
        "space_budget": _int(doc["space_budget"], where + ".space_budget", 1),
        "delta": _rows(doc["delta"], where + ".delta", 5, 2),
    }
    _machine(lambda: _build_tisp(out), where)
    return out


def _build_tisp(doc: Doc) -> TispMachine:
    return TispMachine(
        states=doc["states"],
        initial=doc["initial"],
        accept=doc["accept"],
        reject=doc["reject"],
        alphabet=doc["alphabet"],
        blank=doc["blank"],
        delta={(q, a): (q2, b, m) for q, a, q2, b, m in doc["delta"]},
        time_budget=doc["time_budget"],
        space_budget=doc["space_budget"],
    )


def _nested(doc: Any, where: str, kind: str) -> Doc:
    if not isinstance(doc, dict) or doc.get("kind") != kind:
        raise SpecError(f"{where}: expected a {kind} document")
    return _normalize(doc, where, top=False)


# ---------------------------------------------------------------- programs


_PIPELINE_PARAMS = {
    "dfa2mrc": (("dfa",), ("epsilon", "mutation")),
    "tm2mrc": (("tm",), ("epsilon",)),
    "tisp2mrc": (("tisp",), ()),
    "wordcount": ((), ()),
    "padded": ((), ("base", "base_dfa")),
    "unary": (("oracle",), ()),
    "bsp2mrc": (("bsp",), ()),
    "fanout": ((), ()),
    "no-ones": ((), ()),
    "interpreted": (("machine", "rounds"), ("acceptance",)),
}


def _normalize_pipeline(doc: Doc, where: str) -> Doc:
    if not isinstance(doc, dict) or "builtin" not in doc:
        raise SpecError(f"{where}: missing field(s) builtin")
    builtin = doc["builtin"]
    if builtin not in _PIPELINE_PARAMS:
        raise SpecError(f"{where}.builtin: unknown builtin {builtin!r} (expected one of {', '.join(BUILTINS)})")
    required, optional = _PIPELINE_PARAMS[builtin]
    _check_fields(doc, where, ("kind", "builtin") + tuple(required), ("schema", "limits") + tuple(optional))
    out: Doc = {"kind": "mrc-pipeline", "builtin": builtin}
    if "limits" in doc:
        out["limits"] = normalize_limits(doc["limits"], where + ".limits")
    if builtin == "dfa2mrc":
        out["dfa"] = _nested(doc["dfa"], where + ".dfa", "dfa")
        out["epsilon"] = _rational(doc.get("epsilon", "1/2"), where + ".epsilon")
        if "mutation" in doc:
            if doc["mutation"] != "reverse-composition":
                raise SpecError(f"{where}.mutation: unknown mutation {doc['mutation']!r}")
            out["mutation"] = doc["mutation"]
    elif builtin == "tm2mrc":
        out["tm"] = _nested(doc["tm"], where + ".tm", "tm")
        out["epsilon"] = _rational(doc.get("epsilon", "1/2"), where + ".epsilon")
    elif builtin == "tisp2mrc":
        out["tisp"] = _nested(doc["tisp"], where + ".tisp", "tisp")
    elif builtin == "padded":
        if ("base" in doc) == ("base_dfa" in doc):
            raise SpecError(f"{where}: give exactly one of base, base_dfa")
        if "base" in doc:
            if doc["base"] not in BASE_DECIDERS:
                raise SpecError(f"{where}.base: unknown decider {doc['base']!r} (expected one of {', '.join(BASE_DECIDERS)})")
            out["base"] = doc["base"]
        else:
            out["base_dfa"] = _nested(doc["base_dfa"], where + ".base_dfa", "dfa")
    elif builtin == "unary":
        if doc["oracle"] not in UNARY_ORACLES:
            raise SpecError(f"{where}.oracle: unknown oracle {doc['oracle']!r} (expected one of {', '.join(UNARY_ORACLES)})")
        out["oracle"] = doc["oracle"]
    elif builtin == "bsp2mrc":
        out["bsp"] = _nested(doc["bsp"], where + ".bsp", "bsp")
    elif builtin == "interpreted":
        out["machine"] = _nested(doc["machine"], where + ".machine", "tisp")
        out["rounds"] = _int(doc["rounds"], where + ".rounds", 1)
        acceptance = doc.get("acceptance", "accept-state")
        if acceptance not in ("accept-state", "empty-final-round"):
            raise SpecError(f"{where}.acceptance: unknown convention {acceptance!r}")
        out["acceptance"] = acceptance
    return out


def _normalize_bsp(doc: Doc, where: str) -> Doc:
    if not isinstance(doc, dict):
        raise SpecError(f"{where}: expected an object")
    behavior = doc.get("behavior")
    if behavior not in BSP_BEHAVIORS:
        raise SpecError(f"{where}.behavior: unknown behavior {behavior!r} (expected one of {', '.join(BSP_BEHAVIORS)})")
    if behavior == "mrc2bsp":
        _check_fields(doc, where, ("kind", "p", "behavior", "program"), ("schema", "limits"))
    else:
        _check_fields(doc, where, ("kind", "p", "behavior", "rounds"), ("schema", "limits"))
    out: Doc = {"kind": "bsp", "p": _int(doc["p"], where + ".p", 1), "behavior": behavior}
    if behavior == "mrc2bsp":
        out["program"] = _nested(doc["program"], where + ".program", "mrc-pipeline")
    else:
        out["rounds"] = _int(doc["rounds"], where + ".rounds", 1)
    if "limits" in doc:
        out["limits"] = normalize_limits(doc["limits"], where + ".limits")
    return out


_NORMALIZERS = {
    "dfa": _normalize_dfa,
    "tm": _normalize_tm,
    "tisp": _normalize_tisp,
    "mrc-pipeline": _normalize_pipeline,
    "bsp": _normalize_bsp,
}


def _normalize(doc: Any, where: str, top: bool) -> Doc:
    if not isinstance(doc, dict):
        raise SpecError(f"{where}: expected a JSON object")
    if top and doc.get("schema") != SCHEMA:
        raise SpecError(f'{where}: "schema" must be "{SCHEMA}"')
    if not top and "schema" in doc and doc["schema"] != SCHEMA:
        raise SpecError(f'{where}: "schema" must be "{SCHEMA}"')
    kind = doc.get("kind")
    if kind not in _NORMALIZERS:
        raise SpecError(f"{where}.kind: expected one of {', '.join(KINDS)}, got {kind!r}")
    out = _NORMALIZERS[kind](doc, where)
    if top:
        out["schema"] = SCHEMA
    return out


def normalize(doc: Any) -> Doc:
    """Validate a top-level document and return its canonical form."""
    return _normalize(doc, "spec", top=True)


def loads(text: Union[str, bytes]) -> Doc:
    try:
        raw = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SpecError(f"spec is not valid JSON: {exc}") from None
    return normalize(raw)


def dumps(doc: Doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------- building


def build(doc: Doc, limit_overrides: Optional[Doc] = None):
    """Object described by a normalised document.

    Returns a Dfa, Tm, TispMachine, MrcProgram or BspMachine.  Pipeline and
    BSP limits come from the builtin's defaults, then the document's
    ``limits``, then ``limit_overrides``.
    """
    kind = doc["kind"]
    if kind == "dfa":
        return _build_dfa(doc)
    if kind == "tm":
        return _build_tm(doc)
    if kind == "tisp":
        return _build_tisp(doc)
    overrides = dict(doc.get("limits", {}))
    overrides.update(limit_overrides or {})
    try:
        if kind == "mrc-pipeline":
            return _build_pipeline(doc, overrides)
        return _build_bsp(doc, overrides)
    except MachineError as exc:
        raise SpecError(str(exc)) from None


def _build_pipeline(doc: Doc, overrides: Doc) -> MrcProgram:
    builtin = doc["builtin"]
    if builtin == "dfa2mrc":
        program = compile_dfa_to_mrc(_build_dfa(doc["dfa"]), Fraction(doc["epsilon"]), mutation=doc.get("mutation"))
    elif builtin == "tm2mrc":
        program = compile_sublog_tm_to_mrc(_build_tm(doc["tm"]), Fraction(doc["epsilon"]))
    elif builtin == "tisp2mrc":
        program = compile_tisp_to_mrc(_build_tisp(doc["tisp"]))
    elif builtin == "wordcount":
        program = wordcount_program()
    elif builtin == "padded":
        if "base" in doc:
            program = make_padded_decider(BASE_DECIDERS[doc["base"]], name=f"padded({doc['base']})")
        else:
            program = make_padded_decider(_build_dfa(doc["base_dfa"]).accepts, name="padded(dfa)")
    elif builtin == "unary":
        program = build_unary_nonuniform(UNARY_ORACLES[doc["oracle"]], name=f"unary({doc['oracle']})")
    elif builtin == "bsp2mrc":
        program = bsp_module.bsp_to_mrc(_build_bsp(doc["bsp"], dict(doc["bsp"].get("limits", {}))))
    elif builtin == "fanout":
        program = fanout_program()
    elif builtin == "no-ones":
        program = no_ones_program()
    else:
        program = interpreted_program(_build_tisp(doc["machine"]), doc["rounds"], acceptance=doc["acceptance"])
    if overrides:
        program = dataclasses.replace(program, limits=apply_limits(program.limits, overrides))
        if isinstance(program.behavior, InterpretedBehavior):
            program.behavior.limits = program.limits
    return program


def _build_bsp(doc: Doc, overrides: Doc) -> BspMachine:
    behavior = doc["behavior"]
    if behavior == "mrc2bsp":
        machine = mrc_to_bsp(_build_pipeline(doc["program"], dict(doc["program"].get("limits", {}))), doc["p"])
    else:
        cls = bsp_module.SAMPLE_BEHAVIORS[behavior]
        machine = BspMachine(p=doc["p"], behavior=cls(), rounds=doc["rounds"], name=behavior)
    if overrides:
        machine = dataclasses.replace(machine, limits=apply_limits(machine.limits, overrides))
    return machine


# ---------------------------------------------------------------- machine -> document


def dfa_doc(dfa: Dfa) -> Doc:
    return normalize(
        {
            "schema": SCHEMA,
            "kind": "dfa",
            "states": list(dfa.states),
            "alphabet": list(dfa.alphabet),
            "transitions": [[q, a, q2] for (q, a), q2 in dfa.transitions.items()],
            "start": dfa.start,
            "accepting": sorted(dfa.accepting),
        }
    )


def tm_doc(tm: Tm) -> Doc:
    return normalize(
        {
            "schema": SCHEMA,
            "kind": "tm",
            "states": list(tm.states),
            "initial": tm.initial,
            "accept": tm.accept,
            "reject": tm.reject,
            "input_alphabet": list(tm.input_alphabet),
            "work_alphabet": list(tm.work_alphabet),
            "blank": tm.blank,
            "work_space_bound": tm.work_space_bound,
            "delta": [[q, a, w, *move] for (q, a, w), move in tm.delta.items()],
        }
    )


def tisp_doc(m: TispMachine) -> Doc:
    return normalize(
        {
            "schema": SCHEMA,
            "kind": "tisp",
            "states": list(m.states),
            "initial": m.initial,
            "accept": m.accept,
            "reject": m.reject,
            "alphabet": list(m.alphabet),
            "blank": m.blank,
            "time_budget": m.time_budget,
            "space_budget": m.space_budget,
            "delta": [[q, a, *move] for (q, a), move in m.delta.items()],
        }
    )


def strip_schema(doc: Doc) -> Doc:
    """Copy of a top-level document suitable for nesting."""
    return {k: v for k, v in doc.items() if k != "schema"}
