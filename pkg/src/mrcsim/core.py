"""Round-by-round MRC execution with resource metering.

A round applies the mapper to every pair of the previous round's output,
groups the emitted pairs by key (shuffle-and-sort) and applies one reducer
invocation per key group.  Every invocation is metered: steps and working
space are self-reported by the behavior through its :class:`Context`, input
and output bytes are measured by the engine.

Pairs are kept in canonical order: key bytes ascending, then the position of
the producing invocation, then emission order.  Reducers only emit under
their own key, so a round's output is canonical once reducers are run in key
order and their outputs concatenated.
"""

from __future__ import annotations

import dataclasses
import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

from .numeric import Rational, as_fraction, ceil_log2, ceil_power, format_fraction

ACCEPT = "accept"
REJECT = "reject"
VIOLATION = "resource-violation"


class MrcError(Exception):
    """Base class for engine errors."""


class ProgramError(MrcError):
    """The program (or machine) is malformed and cannot be run."""


class BehaviorError(MrcError):
    """A mapper/reducer invocation failed while running."""


@dataclass(frozen=True)
class Violation:
    round: int
    phase: str
    processor: int
    bound: str
    measured: int
    limit: str

    def describe(self) -> str:
        return (
            f"round {self.round} {self.phase} processor {self.processor}: "
            f"{self.bound} {self.measured} exceeds limit {self.limit}"
        )


class ResourceViolation(MrcError):
    def __init__(self, violation: Violation):
        super().__init__(violation.describe())
        self.violation = violation


class Pair(NamedTuple):
    key: bytes
    value: bytes

    @property
    def nbytes(self) -> int:
        return len(self.key) + len(self.value)


def _as_bytes(x: Union[bytes, str]) -> bytes:
    return x.encode("ascii") if isinstance(x, str) else bytes(x)


@dataclass(frozen=True)
class InputEncoding:
    pairs: Tuple[Pair, ...]
    n: int


def encode_input(x: Union[bytes, str]) -> InputEncoding:
    """List the symbols of ``x`` as pairs ``(i, x_i)`` with 1-based decimal keys."""
    data = _as_bytes(x)
    pairs = tuple(Pair(str(i).encode(), data[i - 1 : i]) for i in range(1, len(data) + 1))
    return InputEncoding(pairs, len(data))


def decode_input(encoding: InputEncoding) -> bytes:
    by_index = {}
    for key, value in encoding.pairs:
        i = int(key)
        if i in by_index or not 1 <= i <= encoding.n or len(value) != 1:
            raise ValueError(f"bad input pair ({key!r}, {value!r})")
        by_index[i] = value
    if len(by_index) != encoding.n:
        raise ValueError("input indices have gaps")
    return b"".join(by_index[i] for i in range(1, encoding.n + 1))


def shuffle_and_sort(pairs: Iterable[Pair]) -> List[Tuple[bytes, List[bytes]]]:
    """Group values by key; groups sorted by key, values kept in arrival order."""
    ordered = sorted(pairs, key=lambda p: p[0])
    return [(key, [p[1] for p in grp]) for key, grp in itertools.groupby(ordered, key=lambda p: p[0])]


@dataclass(frozen=True)
class Bound:
    """``constant * ceil(max(n, 1) ** exponent)``.

    Evaluating at ``max(n, 1)`` keeps constant terms alive for the empty input.
    """

    constant: Fraction = Fraction(4)
    exponent: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "constant", as_fraction(self.constant))
        object.__setattr__(self, "exponent", as_fraction(self.exponent))
        if self.constant <= 0 or self.exponent < 0:
            raise ProgramError(f"bad bound {self}")

    def at(self, n: int) -> Fraction:
        return self.constant * ceil_power(max(n, 1), self.exponent)

    def to_dict(self) -> dict:
        return {"constant": format_fraction(self.constant), "exponent": format_fraction(self.exponent)}


@dataclass(frozen=True)
class ResourceLimits:
    """Explicit constants for the asymptotic bounds of the uniform model.

    Space is measured in bytes; ``space_constant * ceil(n**c)`` counts pair
    records of ``record_bytes`` bytes each.
    """

    c: Fraction = Fraction(1, 2)
    space_constant: Fraction = Fraction(4)
    time: Bound = Bound(4, 1)
    keys_constant: Fraction = Fraction(4)
    rounds: Bound = Bound(4, 0)
    record_bytes: int = 16
    enforce: bool = False

    def __post_init__(self):
        for name in ("c", "space_constant", "keys_constant"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if not 0 < self.c < 1:
            raise ProgramError(f"space exponent must lie in (0, 1), got {self.c}")
        if self.space_constant <= 0 or self.keys_constant <= 0 or self.record_bytes < 1:
            raise ProgramError("limit constants must be positive")

    def space_bytes(self, n: int) -> Fraction:
        return self.space_constant * ceil_power(max(n, 1), self.c) * self.record_bytes

    def keys_per_invocation(self, n: int) -> Fraction:
        return self.keys_constant * ceil_power(max(n, 1), self.c)

    def keys_per_round(self, n: int) -> Fraction:
        return self.keys_constant * ceil_power(max(n, 1), self.c) ** 2

    def pairs_per_round(self, n: int) -> Fraction:
        return self.keys_constant * max(n, 1) ** 2

    def steps(self, n: int) -> Fraction:
        return self.time.at(n)

    def with_enforce(self, enforce: bool = True) -> "ResourceLimits":
        return dataclasses.replace(self, enforce=enforce)

    def to_dict(self) -> dict:
        return {
            "c": format_fraction(self.c),
            "space_constant": format_fraction(self.space_constant),
            "time": self.time.to_dict(),
            "keys_constant": format_fraction(self.keys_constant),
            "rounds": self.rounds.to_dict(),
            "record_bytes": self.record_bytes,
            "enforce": self.enforce,
        }


class Context:
    """Handed to every invocation: round, input size, and the meters.

    Behaviors call :meth:`tick` for the steps they take, :meth:`use` with the
    bytes of working storage they currently hold, and :meth:`accept` or
    :meth:`reject` to enter a halting state.
    """

    __slots__ = ("round", "n", "steps", "peak", "flag")

    def __init__(self, round_index: int, n: int):
        self.round = round_index
        self.n = n
        self.steps = 0
        self.peak = 0
        self.flag: Optional[str] = None

    def tick(self, steps: int = 1) -> None:
        self.steps += steps

    def use(self, nbytes: int) -> None:
        if nbytes > self.peak:
            self.peak = nbytes

    def accept(self) -> None:
        self._halt(ACCEPT)

    def reject(self) -> None:
        self._halt(REJECT)

    def _halt(self, verdict: str) -> None:
        # reject dominates accept
        if self.flag != REJECT:
            self.flag = verdict


class RoundBehavior:
    """The uniform machine M(m, r, n, y): ``map`` is m = 1, ``reduce`` is m = 0.

    Subclasses read the round and input size from ``ctx``.
    """

    def map(self, pair: Pair, ctx: Context) -> Iterable[Pair]:
        raise NotImplementedError

    def reduce(self, key: bytes, values: Sequence[bytes], ctx: Context) -> Iterable[bytes]:
        raise NotImplementedError


class BuiltinBehavior(RoundBehavior):
    def __init__(self, mapper: Callable[[Pair, Context], Iterable[Pair]],
                 reducer: Callable[[bytes, Sequence[bytes], Context], Iterable[bytes]]):
        self.mapper = mapper
        self.reducer = reducer

    def map(self, pair, ctx):
        return self.mapper(pair, ctx)

    def reduce(self, key, values, ctx):
        return self.reducer(key, values, ctx)


def identity_mapper(pair: Pair, ctx: Context) -> List[Pair]:
    ctx.tick()
    return [pair]


def identity_reducer(key: bytes, values: Sequence[bytes], ctx: Context) -> List[bytes]:
    ctx.tick(len(values))
    return list(values)


# called with no arguments for n = 0, where no invocation ever happens;
# returns (accepts, rounds_executed)
EmptyInputRule = Callable[[], Tuple[bool, int]]


@dataclass
class MrcProgram:
    """An R-round MRC machine.

    ``rounds`` may be a callable of n for constructions whose round count
    depends on the input length.  ``empty_input`` fixes the outcome for
    n = 0, where the machine receives no pair and nothing runs.
    """

    rounds: Union[int, Callable[[int], int]]
    behavior: RoundBehavior
    limits: ResourceLimits = field(default_factory=ResourceLimits)
    acceptance: str = "accept-state"
    empty_input: Optional[EmptyInputRule] = None
    name: str = "program"

    def __post_init__(self):
        if self.acceptance not in ("accept-state", "empty-final-round"):
            raise ProgramError(f"unknown acceptance convention {self.acceptance!r}")
        if isinstance(self.rounds, int) and self.rounds < 1:
            raise ProgramError("a program needs at least one round")

    def rounds_for(self, n: int) -> int:
        r = self.rounds(n) if callable(self.rounds) else self.rounds
        if not isinstance(r, int) or r < 1:
            raise ProgramError(f"round count must be a positive integer, got {r!r}")
        return r

    def validate(self, n: int) -> int:
        """Return R for input size n, rejecting counts the processors cannot store."""
        r = self.rounds_for(n)
        budget_bits = int(self.limits.space_bytes(n)) * 8
        if r.bit_length() > budget_bits:
            raise ProgramError(
                f"round count {r} needs {r.bit_length()} bits, more than the "
                f"{budget_bits}-bit per-processor space budget"
            )
        return r


@dataclass(frozen=True)
class RoundState:
    pairs: Tuple[Pair, ...]
    round_index: int = 0


@dataclass
class RoundMetrics:
    round: int
    map_invocations: int = 0
    reduce_invocations: int = 0
    total_pairs: int = 0
    output_pairs: int = 0
    distinct_keys_per_mapper_invocation: int = 0
    total_distinct_keys: int = 0
    max_group_size: int = 0
    max_reducer_input_bytes: int = 0
    max_pair_bytes: int = 0
    max_working_space_bytes: int = 0
    max_reducer_working_bytes: int = 0
    max_space_charge_bytes: int = 0
    max_steps_per_invocation: int = 0
    mapper_steps: int = 0
    reducer_steps: int = 0
    shuffle_charge: int = 0
    pairs_over_bound: bool = False
    flag: Optional[str] = None

    @property
    def sequential_time(self) -> int:
        return self.mapper_steps + self.reducer_steps + self.shuffle_charge


@dataclass
class ResourceReport:
    n: int
    rounds_executed: int = 0
    rounds: List[RoundMetrics] = field(default_factory=list)
    simulated_sequential_time: int = 0
    verdict: str = REJECT
    violations: List[Violation] = field(default_factory=list)
    empty_input_rule: bool = False

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class RunResult:
    verdict: str
    report: ResourceReport
    output: Tuple[Pair, ...]
    states: Optional[List[RoundState]] = None

    def __iter__(self):
        # unpacks as (verdict, report)
        return iter((self.verdict, self.report))

    @property
    def accepted(self) -> bool:
        return self.verdict == ACCEPT


def shuffle_charge(total_pairs: int) -> int:
    return total_pairs * ceil_log2(total_pairs + 1)


class _Invocation:
    __slots__ = ("index", "outputs", "steps", "peak", "in_bytes", "out_bytes", "keys", "flag")


def _order(count: int, schedule: Optional[random.Random]) -> List[int]:
    order = list(range(count))
    if schedule is not None:
        schedule.shuffle(order)
    return order


def _dispatch(fn, count, schedule, executor):
    order = _order(count, schedule)
    results: List[Optional[_Invocation]] = [None] * count
    runner = executor.map(fn, order) if executor is not None else map(fn, order)
    for inv in runner:
        results[inv.index] = inv
    return results


class _Meter:
    """Applies the limits of one round, recording or raising violations."""

    def __init__(self, limits: ResourceLimits, n: int, round_index: int, sink: List[Violation]):
        self.limits = limits
        self.n = n
        self.round = round_index
        self.sink = sink
        self.space = limits.space_bytes(n)
        self.steps = limits.steps(n)
        self.keys = limits.keys_per_invocation(n)

    def check(self, phase, processor, bound, measured, limit):
        if measured <= limit:
            return
        v = Violation(self.round, phase, processor, bound, int(measured), format_fraction(limit))
        if self.limits.enforce:
            raise ResourceViolation(v)
        self.sink.append(v)

    def invocation(self, phase: str, inv: "_Invocation") -> None:
        # processors are numbered from 1 in canonical order; 0 means the shuffle
        processor = inv.index + 1
        self.check(phase, processor, "space", inv.in_bytes + inv.peak + inv.out_bytes, self.space)
        self.check(phase, processor, "time", inv.steps, self.steps)
        if phase == "map":
            self.check(phase, processor, "keys-per-invocation", inv.keys, self.keys)


def run_round(
    state: RoundState,
    program: MrcProgram,
    n: int,
    *,
    schedule: Optional[random.Random] = None,
    executor=None,
    violations: Optional[List[Violation]] = None,
) -> Tuple[RoundState, RoundMetrics]:
    """Execute round ``state.round_index + 1``: map, shuffle-and-sort, reduce."""
    r = state.round_index + 1
    behavior = program.behavior
    sink = violations if violations is not None else []
    meter = _Meter(program.limits, n, r, sink)
    metrics = RoundMetrics(round=r)
    source = state.pairs

    def do_map(i: int) -> _Invocation:
        pair = source[i]
        ctx = Context(r, n)
        out = [Pair(bytes(k), bytes(v)) for k, v in behavior.map(pair, ctx)]
        if ctx.flag is not None:
            raise BehaviorError("mappers have no halting states")
        inv = _Invocation()
        inv.index = i
        inv.outputs = out
        inv.steps = max(1, ctx.steps)
        inv.peak = ctx.peak
        inv.in_bytes = len(pair[0]) + len(pair[1])
        inv.out_bytes = sum(len(k) + len(v) for k, v in out)
        inv.keys = len({k for k, _ in out})
        inv.flag = None
        return inv

    mapped = _dispatch(do_map, len(source), schedule, executor)
    emitted: List[Pair] = []
    for inv in mapped:
        meter.invocation("map", inv)
        emitted.extend(inv.outputs)
        metrics.mapper_steps += inv.steps
        metrics.max_steps_per_invocation = max(metrics.max_steps_per_invocation, inv.steps)
        metrics.max_working_space_bytes = max(metrics.max_working_space_bytes, inv.peak)
        metrics.max_space_charge_bytes = max(
            metrics.max_space_charge_bytes, inv.in_bytes + inv.peak + inv.out_bytes
        )
        metrics.distinct_keys_per_mapper_invocation = max(
            metrics.distinct_keys_per_mapper_invocation, inv.keys
        )
    metrics.map_invocations = len(source)
    metrics.total_pairs = len(emitted)
    metrics.shuffle_charge = shuffle_charge(len(emitted))
    if emitted:
        metrics.max_pair_bytes = max(len(k) + len(v) for k, v in emitted)

    groups = shuffle_and_sort(emitted)
    metrics.total_distinct_keys = len(groups)
    meter.check("shuffle", 0, "keys-per-round", len(groups), program.limits.keys_per_round(n))
    metrics.pairs_over_bound = len(emitted) > program.limits.pairs_per_round(n)

    def do_reduce(g: int) -> _Invocation:
        key, values = groups[g]
        ctx = Context(r, n)
        out = [bytes(v) for v in behavior.reduce(key, values, ctx)]
        inv = _Invocation()
        inv.index = g
        inv.outputs = out
        inv.steps = max(1, ctx.steps)
        inv.peak = ctx.peak
        inv.in_bytes = len(key) + sum(len(v) for v in values)
        inv.out_bytes = len(out) * len(key) + sum(len(v) for v in out)
        inv.keys = 1
        inv.flag = ctx.flag
        return inv

    reduced = _dispatch(do_reduce, len(groups), schedule, executor)
    output: List[Pair] = []
    flags = set()
    for inv, (key, values) in zip(reduced, groups):
        meter.invocation("reduce", inv)
        output.extend(Pair(key, v) for v in inv.outputs)
        if inv.flag is not None:
            flags.add(inv.flag)
        metrics.reducer_steps += inv.steps
        metrics.max_steps_per_invocation = max(metrics.max_steps_per_invocation, inv.steps)
        metrics.max_group_size = max(metrics.max_group_size, len(values))
        metrics.max_reducer_input_bytes = max(metrics.max_reducer_input_bytes, inv.in_bytes)
        metrics.max_working_space_bytes = max(metrics.max_working_space_bytes, inv.peak)
        metrics.max_reducer_working_bytes = max(metrics.max_reducer_working_bytes, inv.peak)
        metrics.max_space_charge_bytes = max(
            metrics.max_space_charge_bytes, inv.in_bytes + inv.peak + inv.out_bytes
        )
    metrics.flag = REJECT if REJECT in flags else (ACCEPT if flags else None)
    metrics.reduce_invocations = len(groups)
    metrics.output_pairs = len(output)
    return RoundState(tuple(output), r), metrics


def _resolve_schedule(schedule) -> Optional[random.Random]:
    if schedule is None or isinstance(schedule, random.Random):
        return schedule
    return random.Random(schedule)


def run(
    program: MrcProgram,
    encoding: Union[InputEncoding, bytes, str],
    *,
    schedule=None,
    executor=None,
    keep_states: bool = False,
) -> RunResult:
    """Run ``program`` on an encoded input (bit-strings are encoded on the fly).

    ``schedule`` (a seed or ``random.Random``) permutes the invocation order
    within each phase; results do not depend on it.
    """
    if not isinstance(encoding, InputEncoding):
        encoding = encode_input(encoding)
    n = encoding.n
    total_rounds = program.validate(n)
    rng = _resolve_schedule(schedule)
    report = ResourceReport(n=n)
    state = RoundState(encoding.pairs, 0)
    states = [state] if keep_states else None

    def finish(verdict: str) -> RunResult:
        report.verdict = verdict
        return RunResult(verdict, report, state.pairs, states)

    round_limit = program.limits.rounds.at(n)
    if total_rounds > round_limit:
        report.violations.append(
            Violation(0, "validate", 0, "rounds", total_rounds, format_fraction(round_limit))
        )
        if program.limits.enforce:
            return finish(VIOLATION)

    if n == 0 and program.empty_input is not None:
        accepted, executed = program.empty_input()
        report.empty_input_rule = True
        report.rounds_executed = executed
        report.rounds = [RoundMetrics(round=i) for i in range(1, executed + 1)]
        return finish(ACCEPT if accepted else REJECT)

    for _ in range(total_rounds):
        try:
            state, metrics = run_round(
                state, program, n, schedule=rng, executor=executor, violations=report.violations
            )
        except ResourceViolation as exc:
            report.violations.append(exc.violation)
            report.rounds_executed = exc.violation.round
            return finish(VIOLATION)
        report.rounds.append(metrics)
        report.rounds_executed = state.round_index
        report.simulated_sequential_time += metrics.sequential_time
        if keep_states:
            states.append(state)
        if metrics.flag is not None and program.acceptance == "accept-state":
            return finish(metrics.flag)
        if metrics.flag == REJECT:
            return finish(REJECT)
    if program.acceptance == "empty-final-round":
        return finish(ACCEPT if not state.pairs else REJECT)
    return finish(REJECT)
