"""Single-threaded simulation of an MRC program with time accounting.

Independent of :mod:`mrcsim.core`'s round loop: mappers run one after the
other, the shuffle is an explicit sort of (key, arrival) records, and
reducers run one after the other.  The per-round charge is mapper steps plus
reducer steps plus ``pairs * ceil(log2(pairs + 1))`` for the sort.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

from ..core import (
    ACCEPT,
    REJECT,
    Context,
    InputEncoding,
    MrcError,
    MrcProgram,
    Pair,
    encode_input,
)
from ..numeric import ceil_log2, ceil_power

ENVELOPE_CONSTANT = 8
SETUP_STEPS = 1


class AccountingError(MrcError):
    """Totals exceeded the envelope although every limit was respected."""


@dataclass
class RoundAccount:
    round: int
    mapper_steps: int = 0
    reducer_steps: int = 0
    shuffle_charge: int = 0

    @property
    def total(self) -> int:
        return self.mapper_steps + self.reducer_steps + self.shuffle_charge


@dataclass
class SequentialAccounting:
    n: int
    beta: str
    rounds: List[RoundAccount] = field(default_factory=list)
    setup_steps: int = SETUP_STEPS
    mapper_steps: int = 0
    reducer_steps: int = 0
    shuffle_charge: int = 0
    total: int = 0
    envelope: int = 0
    limits_respected: bool = True

    @property
    def ratio(self) -> float:
        return self.total / self.envelope if self.envelope else (0.0 if self.total == 0 else float("inf"))


def envelope(n: int, rounds: int, beta, constant: int = ENVELOPE_CONSTANT) -> int:
    """constant * R * (ceil(n^(beta+1)) + n^2 * ceil(log2 n))."""
    if n == 0:
        return 0
    return constant * rounds * (ceil_power(n, beta + 1) + n * n * ceil_log2(n))


@dataclass
class SequentialResult:
    verdict: str
    accounting: SequentialAccounting
    output: Tuple[Pair, ...]

    def __iter__(self):
        return iter((self.verdict, self.accounting))


def simulate_mrc_sequential(
    program: MrcProgram,
    encoding: Union[InputEncoding, bytes, str],
    *,
    check: bool = True,
) -> SequentialResult:
    """Run ``program`` one invocation at a time and account for every step.

    With ``check`` set, raises :class:`AccountingError` if the totals exceed
    the envelope on a run that kept to the program's time, space and key
    limits.
    """
    if not isinstance(encoding, InputEncoding):
        encoding = encode_input(encoding)
    n = encoding.n
    limits = program.limits
    beta = limits.time.exponent
    acct = SequentialAccounting(n=n, beta=str(beta))
    total_rounds = program.validate(n)
    space, steps_cap, keys_cap = limits.space_bytes(n), limits.steps(n), limits.keys_per_invocation(n)

    def respect(steps, in_bytes, peak, out_bytes, keys=1):
        if steps > steps_cap or in_bytes + peak + out_bytes > space or keys > keys_cap:
            acct.limits_respected = False

    def done(verdict: str, current: List[Pair]) -> SequentialResult:
        acct.mapper_steps = sum(r.mapper_steps for r in acct.rounds)
        acct.reducer_steps = sum(r.reducer_steps for r in acct.rounds)
        acct.shuffle_charge = sum(r.shuffle_charge for r in acct.rounds)
        acct.total = acct.mapper_steps + acct.reducer_steps + acct.shuffle_charge
        acct.envelope = envelope(n, len(acct.rounds), beta)
        if check and acct.limits_respected and acct.total > acct.envelope:
            raise AccountingError(
                f"{program.name}: total {acct.total} exceeds envelope {acct.envelope} at n={n}"
            )
        return SequentialResult(verdict, acct, tuple(current))

    if n == 0 and program.empty_input is not None:
        accepted, executed = program.empty_input()
        acct.rounds = [RoundAccount(round=r) for r in range(1, executed + 1)]
        return done(ACCEPT if accepted else REJECT, [])

    current: List[Pair] = list(encoding.pairs)
    for r in range(1, total_rounds + 1):
        account = RoundAccount(round=r)
        acct.rounds.append(account)
        records = []
        for pair in current:
            ctx = Context(r, n)
            emitted = list(program.behavior.map(pair, ctx))
            account.mapper_steps += max(1, ctx.steps)
            respect(
                max(1, ctx.steps),
                len(pair.key) + len(pair.value),
                ctx.peak,
                sum(len(k) + len(v) for k, v in emitted),
                len({k for k, _ in emitted}),
            )
            for k, v in emitted:
                records.append((bytes(k), len(records), bytes(v)))
        records.sort()
        account.shuffle_charge = len(records) * ceil_log2(len(records) + 1)
        if len({rec[0] for rec in records}) > limits.keys_per_round(n):
            acct.limits_respected = False

        current = []
        verdicts = set()
        start = 0
        while start < len(records):
            key = records[start][0]
            stop = start
            while stop < len(records) and records[stop][0] == key:
                stop += 1
            values = [rec[2] for rec in records[start:stop]]
            ctx = Context(r, n)
            out = [bytes(v) for v in program.behavior.reduce(key, values, ctx)]
            account.reducer_steps += max(1, ctx.steps)
            respect(
                max(1, ctx.steps),
                len(key) + sum(map(len, values)),
                ctx.peak,
                len(out) * len(key) + sum(map(len, out)),
            )
            if ctx.flag is not None:
                verdicts.add(ctx.flag)
            current.extend(Pair(key, v) for v in out)
            start = stop
        if REJECT in verdicts:
            return done(REJECT, current)
        if ACCEPT in verdicts and program.acceptance == "accept-state":
            return done(ACCEPT, current)
    if program.acceptance == "empty-final-round":
        return done(ACCEPT if not current else REJECT, current)
    return done(REJECT, current)
