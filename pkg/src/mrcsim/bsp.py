"""Uniform deterministic BSP engine and the MRC <-> BSP cross-simulations.

Processors keep no memory between rounds: anything a processor wants to
remember it sends to itself.  Messages sent in round r are delivered at the
start of round r+1, ordered by (sender, emission index); messages sent in the
last round are never delivered and form the machine's output.
"""

from __future__ import annotations

import copy
import dataclasses
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

from .codec import pack, unpack
from .core import (
    ACCEPT,
    REJECT,
    VIOLATION,
    BehaviorError,
    Context,
    InputEncoding,
    MrcProgram,
    Pair,
    ProgramError,
    ResourceLimits,
    ResourceViolation,
    RoundBehavior,
    Violation,
    _resolve_schedule,
    run as run_mrc,
)
from .numeric import fnv1a_64, format_fraction

Text = Union[str, bytes]


@dataclass(frozen=True)
class Message:
    dest: int
    payload: bytes


class BspContext(Context):
    """``encoded`` is set when the input was a pair encoding rather than a string."""

    __slots__ = ("p", "index", "encoded")

    def __init__(self, round_index: int, n: int, p: int, index: int, encoded: bool = False):
        super().__init__(round_index, n)
        self.p = p
        self.index = index
        self.encoded = encoded


Behavior = Callable[[int, List[bytes], BspContext], Iterable[Message]]


@dataclass
class BspMachine:
    """p copies of one machine; ``behavior(i, inputs, ctx)`` runs processor i.

    In round 1 ``inputs`` is ``[piece]``; afterwards it is the payloads
    delivered to i.
    """

    p: int
    behavior: Behavior
    rounds: Union[int, Callable[[int], int]]
    limits: ResourceLimits = field(default_factory=ResourceLimits)
    name: str = "bsp"

    def __post_init__(self):
        if self.p < 1:
            raise ProgramError("a BSP machine needs at least one processor")

    def rounds_for(self, n: int) -> int:
        r = self.rounds(n) if callable(self.rounds) else self.rounds
        if not isinstance(r, int) or r < 1:
            raise ProgramError(f"round count must be a positive integer, got {r!r}")
        return r


def pieces(x: bytes, p: int) -> List[bytes]:
    """Equal-sized split; the first ``len(x) % p`` pieces get one extra symbol."""
    q, extra = divmod(len(x), p)
    out, start = [], 0
    for i in range(p):
        size = q + (1 if i < extra else 0)
        out.append(x[start : start + size])
        start += size
    return out


def pair_pieces(encoding: InputEncoding, p: int) -> List[bytes]:
    """Same split over the pairs; each piece is the netstring-packed pairs."""
    q, extra = divmod(len(encoding.pairs), p)
    out, start = [], 0
    for i in range(p):
        size = q + (1 if i < extra else 0)
        share = encoding.pairs[start : start + size]
        out.append(pack(*(f for pair in share for f in pair)))
        start += size
    return out


def piece_start(n: int, p: int, i: int) -> int:
    """0-based offset of processor i's piece (i is 1-based)."""
    q, extra = divmod(n, p)
    return (i - 1) * q + min(i - 1, extra)


def owner_of_position(n: int, p: int, pos: int) -> int:
    """Processor holding 1-based input position ``pos``."""
    q, extra = divmod(n, p)
    big = extra * (q + 1)
    if pos <= big:
        return (pos - 1) // (q + 1) + 1
    return extra + (pos - big - 1) // q + 1


def owner(key: bytes, p: int) -> int:
    """1 + FNV-1a-64(key) mod p."""
    return 1 + fnv1a_64(key) % p


@dataclass
class BspRoundMetrics:
    round: int
    messages: int = 0
    message_bytes: int = 0
    max_in_bytes: int = 0
    max_out_bytes: int = 0
    max_working_space_bytes: int = 0
    max_space_charge_bytes: int = 0
    max_steps_per_processor: int = 0
    total_steps: int = 0
    flag: Optional[str] = None


@dataclass
class BspReport:
    n: int
    p: int
    rounds_executed: int = 0
    rounds: List[BspRoundMetrics] = field(default_factory=list)
    total_steps: int = 0
    verdict: str = REJECT
    violations: List[Violation] = field(default_factory=list)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class BspResult:
    verdict: str
    report: BspReport
    output: Tuple[Tuple[int, Message], ...] = ()

    def __iter__(self):
        return iter((self.verdict, self.report))

    @property
    def accepted(self) -> bool:
        return self.verdict == ACCEPT


def _check(limits, report, v: Violation):
    report.violations.append(v)
    if limits.enforce:
        raise ResourceViolation(v)


def run_bsp(
    machine: BspMachine,
    x: Union[Text, InputEncoding],
    *,
    schedule=None,
    executor=None,
    scrub: bool = False,
) -> BspResult:
    """Run ``machine`` on input ``x`` until a processor halts or R rounds pass.

    ``x`` may also be a pair encoding, split pair-wise instead of
    symbol-wise.  ``scrub`` hands every invocation a fresh copy of the
    behavior object, so a behavior that kept state in itself would be caught
    by the tests.
    """
    p = machine.p
    encoded = isinstance(x, InputEncoding)
    if encoded:
        n, initial = x.n, pair_pieces(x, p)
    else:
        data = x.encode("latin-1") if isinstance(x, str) else bytes(x)
        n, initial = len(data), pieces(data, p)
    limits = machine.limits
    R = machine.rounds_for(n)
    rng = _resolve_schedule(schedule)
    report = BspReport(n=n, p=p)
    space, steps_cap = limits.space_bytes(n), limits.steps(n)
    inboxes: List[List[bytes]] = [[piece] for piece in initial]
    last: Tuple[Tuple[int, Message], ...] = ()

    def finish(verdict):
        report.verdict = verdict
        return BspResult(verdict, report, last)

    try:
        cap = limits.keys_per_invocation(n)
        if p > cap:
            _check(limits, report, Violation(0, "validate", 0, "processors", p, format_fraction(cap)))
        for r in range(1, R + 1):
            metrics = BspRoundMetrics(round=r)

            def invoke(i: int):
                behavior = copy.deepcopy(machine.behavior) if scrub else machine.behavior
                ctx = BspContext(r, n, p, i + 1, encoded)
                sent = list(behavior(i + 1, list(inboxes[i]), ctx))
                for m in sent:
                    if not 1 <= m.dest <= p:
                        raise BehaviorError(f"processor {i + 1} addressed missing processor {m.dest}")
                return i, sent, ctx

            order = list(range(p))
            if rng is not None:
                rng.shuffle(order)
            results: List = [None] * p
            runner = executor.map(invoke, order) if executor is not None else map(invoke, order)
            for i, sent, ctx in runner:
                results[i] = (sent, ctx)

            outgoing: List[List[bytes]] = [[] for _ in range(p)]
            flags = set()
            sent_all = []
            for i, (sent, ctx) in enumerate(results):
                in_bytes = sum(len(y) for y in inboxes[i])
                out_bytes = sum(len(m.payload) for m in sent)
                steps = max(1, ctx.steps)
                charge = in_bytes + ctx.peak + out_bytes
                if charge > space:
                    _check(limits, report, Violation(r, "compute", i + 1, "space", charge, format_fraction(space)))
                if steps > steps_cap:
                    _check(limits, report, Violation(r, "compute", i + 1, "time", steps, format_fraction(steps_cap)))
                metrics.max_in_bytes = max(metrics.max_in_bytes, in_bytes)
                metrics.max_out_bytes = max(metrics.max_out_bytes, out_bytes)
                metrics.max_working_space_bytes = max(metrics.max_working_space_bytes, ctx.peak)
                metrics.max_space_charge_bytes = max(metrics.max_space_charge_bytes, charge)
                metrics.max_steps_per_processor = max(metrics.max_steps_per_processor, steps)
                metrics.total_steps += steps
                metrics.messages += len(sent)
                metrics.message_bytes += out_bytes
                if ctx.flag is not None:
                    flags.add(ctx.flag)
                for m in sent:
                    outgoing[m.dest - 1].append(m.payload)
                    sent_all.append((i + 1, m))
            metrics.flag = REJECT if REJECT in flags else (ACCEPT if flags else None)
            report.rounds.append(metrics)
            report.rounds_executed = r
            report.total_steps += metrics.total_steps
            last = tuple(sent_all)
            inboxes = outgoing
            if metrics.flag is not None:
                return finish(metrics.flag)
    except ResourceViolation as exc:
        report.rounds_executed = max(report.rounds_executed, exc.violation.round)
        return finish(VIOLATION)
    return finish(REJECT)


# ---------------------------------------------------------------- MRC -> BSP


def _tag_sort_key(tag: Tuple[bytes, bytes, bytes]):
    src_key, src_pos, emit = tag
    return (src_key, int(src_pos), int(emit))


class MrcOnBsp:
    """Each MRC round becomes a map superstep followed by a reduce superstep.

    Map superstep: a processor maps the pairs it holds and sends each output
    to ``owner(key)``, tagged with the producing pair's canonical position so
    reducers see values in the MRC engine's order.  Reduce superstep: the
    owner groups by key, runs the reducers and sends the results to itself.
    """

    RESIDENT = b"P"
    NONEMPTY = b"N"

    def __init__(self, program: MrcProgram, p: int):
        self.program = program
        self.p = p

    def __call__(self, i: int, inputs: List[bytes], ctx: BspContext) -> List[Message]:
        n, t = ctx.n, ctx.round
        program = self.program
        R = program.rounds_for(n)
        if n == 0 and program.empty_input is not None:
            accepted, executed = program.empty_input()
            if i == 1 and t == 2 * executed:
                ctx.accept() if accepted else ctx.reject()
            return []
        if t == 2 * R + 1:
            if i == 1 and not inputs:
                ctx.accept()
            return []
        r = (t + 1) // 2
        if t % 2 == 1:
            return self.map_phase(i, inputs, ctx, r)
        return self.reduce_phase(i, inputs, ctx, r, last=(r == R))

    def map_phase(self, i, inputs, ctx, r):
        if r == 1 and ctx.encoded:
            fields = unpack(inputs[0]) if inputs else ()
            # pieces are contiguous, so (processor, local index) is input order
            held = [
                (b"%020d" % i, b"%d" % k, Pair(fields[2 * k], fields[2 * k + 1]))
                for k in range(len(fields) // 2)
            ]
        elif r == 1:
            start = piece_start(ctx.n, self.p, i)
            piece = inputs[0] if inputs else b""
            held = [
                (b"", b"%d" % (start + k + 1), Pair(b"%d" % (start + k + 1), piece[k : k + 1]))
                for k in range(len(piece))
            ]
        else:
            held = []
            for payload in inputs:
                key, pos, value = unpack(payload[1:])
                held.append((key, pos, Pair(key, value)))
        out = []
        for src_key, src_pos, pair in held:
            sub = Context(r, ctx.n)
            emitted = list(self.program.behavior.map(pair, sub))
            if sub.flag is not None:
                raise BehaviorError("mappers have no halting states")
            ctx.tick(max(1, sub.steps))
            ctx.use(sub.peak)
            for e, (k, v) in enumerate(emitted):
                out.append(Message(owner(k, self.p), pack(k, v, src_key, src_pos, b"%d" % e)))
        return out

    def reduce_phase(self, i, inputs, ctx, r, last):
        received = []
        for payload in inputs:
            k, v, src_key, src_pos, e = unpack(payload)
            received.append((k, (src_key, src_pos, e), v))
        received.sort(key=lambda rec: (rec[0], _tag_sort_key(rec[1])))
        out = []
        produced = False
        start = 0
        while start < len(received):
            key = received[start][0]
            stop = start
            while stop < len(received) and received[stop][0] == key:
                stop += 1
            sub = Context(r, ctx.n)
            values = [rec[2] for rec in received[start:stop]]
            results = list(self.program.behavior.reduce(key, values, sub))
            ctx.tick(max(1, sub.steps))
            # reducers run one after another: peak, not summed, working space
            ctx.use(sub.peak)
            if sub.flag == REJECT:
                ctx.reject()
            elif sub.flag == ACCEPT and self.program.acceptance == "accept-state":
                ctx.accept()
            for e, v in enumerate(results):
                out.append(Message(i, self.RESIDENT + pack(key, b"%d" % e, bytes(v))))
            produced = produced or bool(results)
            start = stop
        if last and self.program.acceptance == "empty-final-round":
            return [Message(1, self.NONEMPTY)] if produced else []
        return out


def mrc_to_bsp(program: MrcProgram, p: int) -> BspMachine:
    """BSP machine with two supersteps per MRC round (one more for the
    empty-final-round convention, whose emptiness check needs a gather)."""
    if p < 1:
        raise ProgramError("p must be at least 1")
    extra = 1 if program.acceptance == "empty-final-round" else 0
    return BspMachine(
        p=p,
        behavior=MrcOnBsp(program, p),
        rounds=lambda n: 2 * program.rounds_for(n) + extra,
        limits=program.limits,
        name=f"mrc2bsp({program.name})",
    )


def bsp_output_pairs(result: BspResult) -> List[Pair]:
    """Final MRC pairs held by a translated machine, in canonical order."""
    pairs = []
    for _, m in result.output:
        if m.payload.startswith(MrcOnBsp.RESIDENT):
            key, e, value = unpack(m.payload[1:])
            pairs.append((key, int(e), Pair(key, value)))
    pairs.sort(key=lambda rec: (rec[0], rec[1]))
    return [rec[2] for rec in pairs]


# ---------------------------------------------------------------- BSP -> MRC

HEARTBEAT = b"H"
INPUT = b"I"
MAIL = b"M"


class BspOnMrc(RoundBehavior):
    """Processor index becomes the key; one MRC round per BSP superstep.

    Every reducer re-emits a heartbeat for its own key so that processors
    with no incoming messages still run next round, as they do in BSP.
    """

    def __init__(self, machine: BspMachine):
        self.machine = machine

    def map(self, pair: Pair, ctx: Context):
        ctx.tick()
        p = self.machine.p
        if ctx.round == 1:
            i = int(pair.key)
            out = [Pair(b"%d" % owner_of_position(ctx.n, p, i), INPUT + pack(pair.key, pair.value))]
            if i == 1:
                ctx.tick(p)
                out.extend(Pair(b"%d" % q, HEARTBEAT) for q in range(1, p + 1))
            return out
        tag = pair.value[:1]
        if tag == HEARTBEAT:
            return [pair]
        dest, sender, e, payload = unpack(pair.value[1:])
        return [Pair(dest, MAIL + pack(sender, e, payload))]

    def reduce(self, key: bytes, values: Sequence[bytes], ctx: Context):
        i = int(key)
        if ctx.round == 1:
            cells = []
            for v in values:
                if v[:1] == INPUT:
                    pos, sym = unpack(v[1:])
                    cells.append((int(pos), sym))
            cells.sort()
            inputs = [b"".join(sym for _, sym in cells)]
        else:
            mail = []
            for v in values:
                if v[:1] == MAIL:
                    sender, e, payload = unpack(v[1:])
                    mail.append((int(sender), int(e), payload))
            mail.sort(key=lambda m: (m[0], m[1]))
            inputs = [m[2] for m in mail]
        bctx = BspContext(ctx.round, ctx.n, self.machine.p, i)
        sent = list(self.machine.behavior(i, inputs, bctx))
        ctx.tick(max(1, bctx.steps))
        ctx.use(bctx.peak)
        if bctx.flag == REJECT:
            ctx.reject()
        elif bctx.flag == ACCEPT:
            ctx.accept()
        out = [HEARTBEAT]
        for e, m in enumerate(sent):
            if not 1 <= m.dest <= self.machine.p:
                raise BehaviorError(f"processor {i} addressed missing processor {m.dest}")
            out.append(MAIL + pack(b"%d" % m.dest, key, b"%d" % e, m.payload))
        return out


def bsp_to_mrc(machine: BspMachine) -> MrcProgram:
    """MRC program with exactly one round per BSP superstep."""

    def empty_input():
        result = run_bsp(machine, b"")
        return result.verdict == ACCEPT, result.report.rounds_executed

    return MrcProgram(
        rounds=machine.rounds,
        behavior=BspOnMrc(machine),
        limits=machine.limits,
        empty_input=empty_input,
        name=f"bsp2mrc({machine.name})",
    )


# ---------------------------------------------------------------- sample machines


@dataclass(frozen=True)
class AcceptFirst:
    """Processor 1 accepts in round 1."""

    def __call__(self, i, inputs, ctx):
        if i == 1:
            ctx.accept()
        return []


@dataclass(frozen=True)
class Echo:
    """Every processor re-sends its input to itself; never halts."""

    def __call__(self, i, inputs, ctx):
        ctx.tick(len(inputs))
        return [Message(i, y) for y in inputs]


@dataclass(frozen=True)
class PingPong:
    """Processor 1 pings 2, 2 answers, 1 accepts when the answer arrives (round 3)."""

    def __call__(self, i, inputs, ctx):
        if ctx.p < 2:
            raise BehaviorError("ping-pong needs two processors")
        if ctx.round == 1:
            return [Message(2, b"ping")] if i == 1 else []
        if i == 2 and b"ping" in inputs:
            return [Message(1, b"pong")]
        if i == 1 and b"pong" in inputs:
            ctx.accept()
        return []


@dataclass(frozen=True)
class OnesParity:
    """Accepts iff the input has an even number of 1s; decides in round 2."""

    def __call__(self, i, inputs, ctx):
        if ctx.round == 1:
            ones = inputs[0].count(b"1") if inputs else 0
            ctx.tick(len(inputs[0]) if inputs else 1)
            return [Message(1, b"%d" % (ones % 2))]
        if i == 1:
            total = sum(int(y) for y in inputs)
            ctx.tick(len(inputs))
            if total % 2 == 0:
                ctx.accept()
            else:
                ctx.reject()
        return []


SAMPLE_BEHAVIORS = {
    "accept-first": AcceptFirst,
    "echo": Echo,
    "ping-pong": PingPong,
    "ones-parity": OnesParity,
}
