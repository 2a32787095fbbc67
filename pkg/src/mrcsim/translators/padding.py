"""Padded languages x 0^{|x|^2} and their one-round decider."""

from __future__ import annotations

import math
from typing import Callable, Optional, Sequence, Union

from ..codec import indexed, split_indexed
from ..core import Bound, Context, MrcError, MrcProgram, Pair, ResourceLimits, RoundBehavior

Text = Union[str, bytes]
Decider = Callable[[str], bool]

PREFIX_KEY = b"*"
BAD_PREFIX = b"!"


class MalformedPadding(MrcError):
    pass


def padded_length(n: int) -> int:
    return n + n * n


def unpadded_length(total: int) -> Optional[int]:
    """The n with n + n**2 == total, or None."""
    if total < 0:
        return None
    n = (math.isqrt(4 * total + 1) - 1) // 2
    return n if padded_length(n) == total else None


def pad_string(x: Text) -> Text:
    zero = b"0" if isinstance(x, bytes) else "0"
    return x + zero * (len(x) ** 2)


def unpad_string(padded: Text) -> Text:
    n = unpadded_length(len(padded))
    if n is None:
        raise MalformedPadding(f"length {len(padded)} is not n + n^2 for any n")
    zero = b"0" if isinstance(padded, bytes) else "0"
    if padded[n:] != zero * (len(padded) - n):
        raise MalformedPadding("padding suffix is not all zeros")
    return padded[:n]


class PaddedDecider(RoundBehavior):
    """Mapper keeps the first n symbols for one reducer, which runs the base.

    Nonzero padding symbols are reported, a block of ceil(sqrt(N)) positions
    per key, to reducers that reject; so is a length with no valid n.
    """

    def __init__(self, base: Decider):
        self.base = base

    def map(self, pair: Pair, ctx: Context):
        ctx.tick()
        i = int(pair.key)
        n = unpadded_length(ctx.n)
        if n is None:
            return [Pair(BAD_PREFIX + b"len", b"")] if i == 1 else []
        if i <= n:
            return [Pair(PREFIX_KEY, indexed(i, pair.value))]
        if pair.value != b"0":
            block = (i - n - 1) // max(1, math.isqrt(ctx.n)) + 1
            return [Pair(BAD_PREFIX + b"%d" % block, b"%d" % i)]
        return []

    def reduce(self, key: bytes, values: Sequence[bytes], ctx: Context):
        ctx.tick(len(values))
        if key.startswith(BAD_PREFIX):
            ctx.reject()
            return []
        cells = sorted(split_indexed(v) for v in values)
        x = "".join(sym.decode("latin-1") for _, sym in cells)
        ctx.use(len(x))
        if self.base(x):
            ctx.accept()
        else:
            ctx.reject()
        return []


def make_padded_decider(base: Decider, name: str = "padded") -> MrcProgram:
    """One-round program accepting exactly pad_string(x) for x the base accepts."""
    behavior = PaddedDecider(base)
    limits = ResourceLimits(time=Bound(4, 1), rounds=Bound(1, 0))
    return MrcProgram(
        rounds=1,
        behavior=behavior,
        limits=limits,
        empty_input=lambda: (bool(base("")), 1),
        name=name,
    )
