"""The textbook two-round word-frequency protocol."""

from __future__ import annotations

from collections import Counter
from typing import List, Sequence, Tuple

from ..core import Bound, Context, InputEncoding, MrcProgram, Pair, ResourceLimits, RoundBehavior

SINK = b"1"


def encode_words(text: bytes) -> InputEncoding:
    """(index, word) pairs for the whitespace-separated tokens of ``text``.

    n is the total size of the pairs, as for any non-bit input.
    """
    pairs = tuple(Pair(b"%d" % i, w) for i, w in enumerate(text.split(), start=1))
    return InputEncoding(pairs, sum(p.nbytes for p in pairs))


class WordCount(RoundBehavior):
    def map(self, pair: Pair, ctx: Context):
        ctx.tick()
        if ctx.round == 1:
            return [Pair(pair.value, pair.key)]
        return [Pair(SINK, pair.key + b"\t" + pair.value)]

    def reduce(self, key: bytes, values: Sequence[bytes], ctx: Context):
        ctx.tick(len(values))
        if ctx.round == 1:
            return [b"%d" % len(values)]
        ctx.use(sum(len(v) for v in values))
        return sorted(values)


def wordcount_program() -> MrcProgram:
    return MrcProgram(
        rounds=2,
        behavior=WordCount(),
        limits=ResourceLimits(time=Bound(4, 1)),
        empty_input=lambda: (False, 2),
        name="wordcount",
    )


def format_counts(output: Sequence[Pair]) -> List[Tuple[bytes, int]]:
    """Decode the round-2 output lines into (token, count)."""
    counts = []
    for _, line in output:
        token, _, count = line.rpartition(b"\t")
        counts.append((token, int(count)))
    return counts


def direct_counts(text: bytes) -> List[Tuple[bytes, int]]:
    return sorted(Counter(text.split()).items())
