"""Step-per-round simulation of a single-tape TISP machine.

The machine's tape (``space_budget`` cells) is cut into segments of
ceil(sqrt(n)) cells, one segment per key.  Every round each segment reducer
re-emits its segment under its own key; a head token (state, position) is
routed by the next mapper to the segment owning the position, whose reducer
applies exactly one transition.  Segments the input never reached are
created blank when the head first enters them.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from ..automata import TispMachine, tisp_step
from ..codec import indexed, split_indexed
from ..core import BehaviorError, Bound, Context, MrcProgram, Pair, ResourceLimits, RoundBehavior
from .blocks import BlockPlan

SEGMENT = b"S"
TOKEN = b"T"
CELL = b"I"
TOO_LONG = b"X"


def segment_size(n: int) -> int:
    return max(1, BlockPlan(n, Fraction(1, 2)).b)


class TispSegments(RoundBehavior):
    def __init__(self, machine: TispMachine):
        self.m = machine
        self.state_index = {q: i for i, q in enumerate(machine.states)}

    def token(self, q: str, pos: int) -> bytes:
        return TOKEN + b"%d:%d" % (self.state_index[q], pos)

    def read_token(self, value: bytes):
        qi, _, pos = value[1:].partition(b":")
        return self.m.states[int(qi)], int(pos)

    def map(self, pair: Pair, ctx: Context):
        ctx.tick()
        b = segment_size(ctx.n)
        if ctx.round == 1:
            i = int(pair.key)
            if ctx.n > self.m.space_budget:
                return [Pair(b"1", TOO_LONG)] if i == 1 else []
            out = [Pair(b"%d" % ((i - 1) // b + 1), CELL + indexed(i, pair.value))]
            if i == 1:
                out.append(Pair(b"1", self.token(self.m.initial, 0)))
            return out
        if pair.value.startswith(TOKEN):
            _, pos = self.read_token(pair.value)
            return [Pair(b"%d" % (pos // b + 1), pair.value)]
        return [pair]

    def reduce(self, key: bytes, values: Sequence[bytes], ctx: Context):
        m = self.m
        b = segment_size(ctx.n)
        j = int(key)
        first = (j - 1) * b
        length = min(b, m.space_budget - first)
        cells = None
        token = None
        inputs = []
        for v in values:
            tag = v[:1]
            if tag == SEGMENT:
                cells = list(v[1:].decode("latin-1"))
            elif tag == TOKEN:
                token = self.read_token(v)
            elif tag == CELL:
                inputs.append(split_indexed(v[1:]))
            elif tag == TOO_LONG:
                ctx.reject()
                return []
            else:
                raise BehaviorError(f"unexpected value {v!r}")
        if cells is None:
            cells = [m.blank] * length
            for i, sym in inputs:
                cells[i - 1 - first] = sym.decode("latin-1")
        ctx.tick(1 + len(values))
        ctx.use(len(cells))
        out = []
        if token is not None:
            q, pos = token
            if q == m.accept:
                ctx.accept()
            elif q == m.reject:
                ctx.reject()
            elif ctx.round <= m.time_budget:
                q, cells[pos - first], d = tisp_step(m, q, cells[pos - first])
                pos = max(0, pos + d)
                if q == m.accept:
                    ctx.accept()
                elif q == m.reject or pos >= m.space_budget:
                    ctx.reject()
                else:
                    out.append(self.token(q, pos))
        out.insert(0, SEGMENT + "".join(cells).encode("latin-1"))
        return out

    def run_empty(self):
        """n = 0: the whole (blank) tape fits one constant-size processor."""
        m = self.m
        tape = [m.blank] * m.space_budget
        q, pos, steps = m.initial, 0, 0
        while not m.halting(q) and steps < m.time_budget:
            q, tape[pos], d = tisp_step(m, q, tape[pos])
            steps += 1
            pos = max(0, pos + d)
            if pos >= m.space_budget:
                return False, steps
        return q == m.accept, max(1, steps)


def compile_tisp_to_mrc(machine: TispMachine) -> MrcProgram:
    """One simulated step per round, ``max(1, time_budget)`` rounds.

    A run that halts after k >= 1 steps stops in round k.
    """
    behavior = TispSegments(machine)
    rounds = max(1, machine.time_budget)
    limits = ResourceLimits(time=Bound(4, Fraction(1, 2)), rounds=Bound(rounds, 0))
    return MrcProgram(
        rounds=rounds,
        behavior=behavior,
        limits=limits,
        empty_input=behavior.run_empty,
        name="tisp2mrc",
    )
