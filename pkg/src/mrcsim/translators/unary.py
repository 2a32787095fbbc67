"""Nonuniform n+3 round machine deciding an arbitrary unary language.

Rounds 1 and 2 count the input length into a single pair (*, n).  Round i
for i >= 3 forwards that pair unchanged unless it holds i-3, in which case it
accepts iff the oracle holds at i-3.  The oracle is consulted only at round
n+3, so each round's reducer embeds one oracle bit: the machine family is not
uniform, which is the point of the construction.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

from ..codec import indexed, split_indexed
from ..core import Bound, Context, MrcProgram, Pair, ResourceLimits, RoundBehavior
from .blocks import BlockPlan

STAR = b"*"


class UnaryCounter(RoundBehavior):
    def __init__(self, oracle: Callable[[int], bool]):
        self.oracle = oracle

    def map(self, pair: Pair, ctx: Context):
        ctx.tick()
        if ctx.round == 1:
            plan = BlockPlan(ctx.n, Fraction(1, 2))
            i = int(pair.key)
            return [Pair(b"%d" % plan.block_of(i), indexed(i, pair.value))]
        return [Pair(STAR, pair.value)]

    def reduce(self, key: bytes, values: Sequence[bytes], ctx: Context):
        ctx.tick(len(values))
        if ctx.round == 1:
            if any(split_indexed(v)[1] != b"1" for v in values):
                ctx.reject()
                return []
            return [b"%d" % len(values)]
        if ctx.round == 2:
            return [b"%d" % sum(int(v) for v in values)]
        (value,) = values
        if int(value) == ctx.round - 3 and self.oracle(ctx.round - 3):
            ctx.accept()
            return []
        return [value]


def build_unary_nonuniform(oracle: Callable[[int], bool], name: str = "unary") -> MrcProgram:
    """Program that accepts 1^n iff ``oracle(n)``, in exactly n + 3 rounds."""
    limits = ResourceLimits(time=Bound(4, Fraction(1, 2)), rounds=Bound(4, 1))
    return MrcProgram(
        rounds=lambda n: n + 3,
        behavior=UnaryCounter(oracle),
        limits=limits,
        empty_input=lambda: (bool(oracle(0)), 3),
        name=name,
    )
