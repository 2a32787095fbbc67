from __future__ import annotations

import json
import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mrcsim import MrcProgram, ResourceLimits
from mrcsim.automata import Dfa, TispMachine, Tm
from mrcsim.bsp import BspMachine
from mrcsim.corpus import contains_one_tm, flip_tisp, random_dfa, random_tisp, random_tm
from mrcsim.specs import (
    SCHEMA,
    SpecError,
    apply_limits,
    build,
    dfa_doc,
    dumps,
    loads,
    normalize,
    parse_limits_flag,
    strip_schema,
    tisp_doc,
    tm_doc,
)

SPECS = sorted((Path(__file__).resolve().parent.parent / "specs").glob("*.json"))


@pytest.mark.parametrize("path", SPECS, ids=[p.stem for p in SPECS])
def test_example_specs_round_trip(path):
    doc = loads(path.read_text())
    assert normalize(loads(dumps(doc))) == doc
    assert isinstance(build(doc), (Dfa, Tm, TispMachine, MrcProgram, BspMachine))


def _shuffled(doc, rng):
    out = json.loads(json.dumps(doc))
    for field in ("transitions", "delta"):
        if field in out:
            rng.shuffle(out[field])
    return out


@given(st.integers(0, 2**32))
@settings(max_examples=40, deadline=None)
def test_machine_docs_round_trip(seed):
    rng = random.Random(seed)
    for doc in (dfa_doc(random_dfa(rng)), tm_doc(random_tm(rng)), tisp_doc(random_tisp(rng))):
        assert normalize(loads(dumps(doc))) == doc
        assert normalize(_shuffled(doc, rng)) == doc


@given(st.integers(0, 2**32), st.text(alphabet="01", max_size=30))
@settings(max_examples=30, deadline=None)
def test_built_dfa_behaves_like_original(seed, x):
    dfa = random_dfa(random.Random(seed))
    assert build(dfa_doc(dfa)).accepts(x) == dfa.accepts(x)


def test_built_machines_equal_originals():
    assert build(tm_doc(contains_one_tm())) == contains_one_tm()
    assert build(tisp_doc(flip_tisp())) == flip_tisp()


def _dfa():
    return json.loads(dumps(dfa_doc(random_dfa(random.Random(0)))))


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.update(schema="mrcsim/0"),
        lambda d: d.pop("schema"),
        lambda d: d.update(kind="nfa"),
        lambda d: d.update(colour="blue"),
        lambda d: d.pop("start"),
        lambda d: d.update(start="nowhere"),
        lambda d: d["transitions"].append(d["transitions"][0]),
        lambda d: d["transitions"][0].pop(),
    ],
    ids=["schema", "no-schema", "kind", "unknown-field", "missing-field", "bad-start", "duplicate", "short-row"],
)
def test_invalid_documents(mutate):
    doc = _dfa()
    mutate(doc)
    with pytest.raises(SpecError):
        normalize(doc)


def test_invalid_json():
    with pytest.raises(SpecError):
        loads("{")


def test_rationals_are_strings_and_canonical():
    base = {"schema": SCHEMA, "kind": "mrc-pipeline", "builtin": "dfa2mrc", "dfa": strip_schema(_dfa())}
    assert normalize({**base, "epsilon": "2/4"})["epsilon"] == "1/2"
    with pytest.raises(SpecError):
        normalize({**base, "epsilon": 0.5})
    with pytest.raises(SpecError):
        normalize({**base, "epsilon": "1/0"})


def test_pipeline_validation():
    base = {"schema": SCHEMA, "kind": "mrc-pipeline"}
    for bad in (
        {"builtin": "nope"},
        {"builtin": "unary", "oracle": "perfect"},
        {"builtin": "padded"},
        {"builtin": "padded", "base": "palindrome", "base_dfa": strip_schema(_dfa())},
        {"builtin": "wordcount", "limits": {"c": "3/2"}},
        {"builtin": "wordcount", "limits": {"speed": "1"}},
        {"builtin": "dfa2mrc", "dfa": {"kind": "tm"}},
    ):
        with pytest.raises(SpecError):
            normalize({**base, **bad})


def test_bsp_documents():
    doc = normalize({"schema": SCHEMA, "kind": "bsp", "p": 2, "behavior": "ping-pong", "rounds": 4})
    machine = build(doc)
    assert (machine.p, machine.rounds) == (2, 4)
    with pytest.raises(SpecError):
        normalize({**doc, "behavior": "gossip"})
    with pytest.raises(SpecError):
        normalize({**doc, "p": 0})


def test_regex_documents():
    doc = normalize({"schema": SCHEMA, "kind": "dfa", "regex": "(0|1)*01"})
    assert build(doc).accepts("1101")
    with pytest.raises(SpecError):
        normalize({"schema": SCHEMA, "kind": "dfa", "regex": "(01"})


def test_limits_flag():
    doc = parse_limits_flag("c=1/2,const=1,time=3:1,record=8,enforce")
    limits = apply_limits(ResourceLimits(), doc)
    assert limits.space_constant == limits.keys_constant == 1
    assert limits.time.constant == 3 and limits.time.exponent == 1
    assert limits.record_bytes == 8
    assert limits.enforce
    for bad in ("speed=1", "c", "c=2", "record=x", "time=0:1"):
        with pytest.raises(SpecError):
            parse_limits_flag(bad)


def test_overrides_apply_to_pipelines():
    doc = normalize({"schema": SCHEMA, "kind": "mrc-pipeline", "builtin": "fanout", "limits": {"keys_constant": "1"}})
    assert build(doc).limits.keys_constant == 1
    assert build(doc, {"keys_constant": "2"}).limits.keys_constant == 2
