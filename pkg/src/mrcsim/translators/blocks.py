"""Two-round block compilers: DFA and sublogarithmic-space TM to MRC.

Round 1 cuts the input into contiguous blocks; each block's reducer builds
the full table of what the machine does on that block from every starting
configuration.  Round 2 ships all tables to one collector, which chains them
from the start configuration.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .. import automata
from ..automata import Dfa, Tm
from ..codec import decode_ints, encode_ints, indexed, int_width, split_indexed
from ..core import (
    BehaviorError,
    Bound,
    Context,
    MrcProgram,
    Pair,
    ProgramError,
    ResourceLimits,
    RoundBehavior,
)
from ..numeric import Rational, as_fraction, ceil_power

COLLECTOR = b"1"


@dataclass(frozen=True)
class BlockPlan:
    """Partition of positions 1..n into K blocks of b = ceil(n**epsilon).

    For n <= 1 there is a single block of size n.
    """

    n: int
    epsilon: Fraction = Fraction(1, 2)

    def __post_init__(self):
        eps = as_fraction(self.epsilon)
        object.__setattr__(self, "epsilon", eps)
        if not 0 < eps < 1:
            raise ProgramError(f"epsilon must lie in (0, 1), got {eps}")
        if self.n < 0:
            raise ProgramError("negative input length")

    @property
    def b(self) -> int:
        return self.n if self.n <= 1 else ceil_power(self.n, self.epsilon)

    @property
    def K(self) -> int:
        if self.n <= 1:
            return 1
        return -(-self.n // self.b)

    def block_of(self, i: int) -> int:
        """1-based block holding 1-based position i."""
        return 1 if self.n <= 1 else (i - 1) // self.b + 1

    def span(self, j: int) -> range:
        if self.n <= 1:
            return range(1, self.n + 1)
        start = (j - 1) * self.b + 1
        return range(start, min(self.n, j * self.b) + 1)


def reassemble(plan: BlockPlan, j: int, values: Sequence[bytes]) -> str:
    """Order a block's (index, symbol) values and check they tile the block."""
    cells = sorted(split_indexed(v) for v in values)
    expected = plan.span(j)
    if [i for i, _ in cells] != list(expected):
        raise BehaviorError(f"block {j} received positions that do not tile it")
    return "".join(sym.decode("latin-1") for _, sym in cells)


class _BlockRouting(RoundBehavior):
    """Round-1 mapper and round-2 mapper shared by both compilers."""

    epsilon: Fraction

    def map(self, pair: Pair, ctx: Context):
        ctx.tick()
        if ctx.round == 1:
            plan = BlockPlan(ctx.n, self.epsilon)
            i = int(pair.key)
            return [Pair(str(plan.block_of(i)).encode(), indexed(i, pair.value))]
        return [Pair(COLLECTOR, pair.key + b":" + pair.value)]

    @staticmethod
    def collected(values: Sequence[bytes]) -> List[bytes]:
        tables = {}
        for v in values:
            j, _, table = v.partition(b":")
            tables[int(j)] = table
        if sorted(tables) != list(range(1, len(tables) + 1)):
            raise BehaviorError("collector is missing block tables")
        return [tables[j] for j in range(1, len(tables) + 1)]


class DfaBlocks(_BlockRouting):
    def __init__(self, dfa: Dfa, epsilon: Fraction, mutation: Optional[str] = None):
        self.dfa = dfa
        self.epsilon = epsilon
        self.width = int_width(len(dfa.states) - 1)
        self.mutation = mutation
        self.start = dfa.index(dfa.start)
        self.accepting = {dfa.index(q) for q in dfa.accepting}

    def reduce(self, key: bytes, values: Sequence[bytes], ctx: Context):
        if ctx.round == 1:
            plan = BlockPlan(ctx.n, self.epsilon)
            block = reassemble(plan, int(key), values)
            table = automata.dfa_transition_indices(self.dfa, block)
            ctx.tick(len(block) * (len(self.dfa.states) + 1))
            ctx.use(len(block) + len(table) * self.width)
            return [encode_ints(table, self.width)]
        tables = self.collected(values)
        ctx.use(sum(len(t) for t in tables))
        if self.mutation == "reverse-composition":
            tables.reverse()
        q, w = self.start, self.width
        for t in tables:
            q = int.from_bytes(t[q * w : (q + 1) * w], "big")
            ctx.tick()
        if q in self.accepting:
            ctx.accept()
        return []


def compile_dfa_to_mrc(dfa: Dfa, epsilon: Rational = Fraction(1, 2), *, mutation: Optional[str] = None) -> MrcProgram:
    """Two-round program deciding the DFA's language.

    ``mutation="reverse-composition"`` composes the tables in the wrong
    order; it exists only to check that verification catches it.
    """
    eps = as_fraction(epsilon)
    BlockPlan(0, eps)
    if mutation not in (None, "reverse-composition"):
        raise ProgramError(f"unknown mutation {mutation!r}")
    exponent = max(eps, 1 - eps)
    limits = ResourceLimits(c=exponent, time=Bound(len(dfa.states) + 2, exponent))
    empty = dfa.start in dfa.accepting
    return MrcProgram(
        rounds=2,
        behavior=DfaBlocks(dfa, eps, mutation),
        limits=limits,
        empty_input=lambda: (empty, 2),
        name="dfa2mrc",
    )


class InfeasibleSpace(ProgramError):
    """The collector cannot hold all boundary tables under the limits."""


class TmBlocks(_BlockRouting):
    def __init__(self, tm: Tm, epsilon: Fraction):
        self.source = tm
        self.tm = automata.compile_away_stays(tm)
        self.space = automata.ConfigSpace(self.tm)
        self.epsilon = epsilon
        self.halt_base = 2 * self.space.count
        self.width = int_width(self.halt_base + 3)
        # pure cache: the table is a function of (block, role) alone
        self._tables: Dict[tuple, automata.BoundaryCodes] = {}

    @property
    def table_bytes(self) -> int:
        return 2 * self.space.count * self.width

    def block_table(self, block: str, j: int, K: int, ctx: Context) -> bytes:
        if K == 1:
            role = "whole"
        else:
            role = "leftmost" if j == 1 else "rightmost" if j == K else "interior"
        result = self._tables.get((block, role))
        if result is None:
            result = automata.boundary_codes(self.tm, block, role, self.space)
            if len(self._tables) < 4096:
                self._tables[(block, role)] = result
        ctx.tick(result.steps + len(block))
        ctx.use(len(block) + self.table_bytes)
        return encode_ints(result.codes, self.width)

    def chain(self, tables: List[bytes], ctx: Context) -> str:
        """Follow block exits from the initial configuration; returns the verdict."""
        K = len(tables)
        decoded: Dict[int, List[int]] = {}
        j = 1
        entry = 2 * self.space.initial()
        for _ in range(2 * self.space.count * K):
            ctx.tick()
            codes = decoded.get(j)
            if codes is None:
                codes = decoded[j] = decode_ints(tables[j - 1], self.width)
            code = codes[entry]
            if code >= self.halt_base:
                outcome = code - self.halt_base
                if outcome == automata.OUT_FAULT:
                    raise BehaviorError("machine head left its tape")
                return automata.ACCEPT if outcome == automata.OUT_ACCEPT else automata.REJECT
            config, side = divmod(code, 2)
            if side == 1:
                j, entry = j + 1, 2 * config
            else:
                j, entry = j - 1, 2 * config + 1
        return automata.DIVERGED

    def reduce(self, key: bytes, values: Sequence[bytes], ctx: Context):
        if ctx.round == 1:
            plan = BlockPlan(ctx.n, self.epsilon)
            j = int(key)
            block = reassemble(plan, j, values)
            return [self.block_table(block, j, plan.K, ctx)]
        tables = self.collected(values)
        ctx.use(sum(len(t) for t in tables))
        if self.chain(tables, ctx) == automata.ACCEPT:
            ctx.accept()
        return []

    def empty_verdict(self) -> bool:
        ctx = Context(1, 0)
        table = self.block_table("", 1, 1, ctx)
        return self.chain([table], ctx) == automata.ACCEPT


def collector_bytes(tm: Tm, epsilon: Rational, n: int) -> int:
    """Bytes of all K boundary tables the round-2 collector must hold."""
    behavior = TmBlocks(tm, as_fraction(epsilon))
    return BlockPlan(n, epsilon).K * behavior.table_bytes


def compile_sublog_tm_to_mrc(
    tm: Tm,
    epsilon: Rational = Fraction(1, 2),
    *,
    n: Optional[int] = None,
    limits: Optional[ResourceLimits] = None,
) -> MrcProgram:
    """Two-round program deciding the TM's language (divergence rejects).

    When ``n`` is given, refuses with :class:`InfeasibleSpace` if the K tables
    overflow the collector's space budget at that input length.
    """
    eps = as_fraction(epsilon)
    behavior = TmBlocks(tm, eps)
    exponent = max(eps, 1 - eps)
    if limits is None:
        limits = ResourceLimits(c=exponent, time=Bound(5 * behavior.space.count + 2, exponent))
    if n is not None:
        need = BlockPlan(n, eps).K * behavior.table_bytes
        budget = limits.space_bytes(n)
        if need > budget:
            raise InfeasibleSpace(
                f"infeasible-space: {BlockPlan(n, eps).K} tables of {behavior.table_bytes} bytes "
                f"need {need} bytes, collector budget is {budget} bytes at n={n}"
            )
    return MrcProgram(
        rounds=2,
        behavior=behavior,
        limits=limits,
        empty_input=lambda: (behavior.empty_verdict(), 2),
        name="tm2mrc",
    )
