"""Round behavior given by one single-tape machine M(m, r, n, y).

The tape starts as ``m#r#n#arg``: m is 1 for a mapper and 0 for a reducer,
arg is ``k,v`` for a mapper and ``k|v1;v2;...`` for a reducer.  When the
machine halts, the region after the third ``#`` is read back:

* mapper: ``;``-separated ``k,v`` records;
* reducer: the part after the first ``|`` is a ``;``-separated value list,
  and a leading ``+`` raises the accept flag.

Halting in the reject state raises the reject flag.  Running past the
program's time bound, or writing an unreadable tape, is a behavior error.
"""

from __future__ import annotations

from typing import List, Sequence

from .automata import ACCEPT as M_ACCEPT
from .automata import REJECT as M_REJECT
from .automata import MachineError, TispMachine, run_tisp
from .core import BehaviorError, Context, MrcProgram, Pair, ResourceLimits, RoundBehavior


class InterpretedBehavior(RoundBehavior):
    def __init__(self, machine: TispMachine, limits: ResourceLimits):
        self.machine = machine
        self.limits = limits

    def _execute(self, m: int, arg: str, ctx: Context) -> str:
        tape = f"{m}#{ctx.round}#{ctx.n}#{arg}"
        budget = int(self.limits.steps(ctx.n))
        try:
            result = run_tisp(self.machine, tape, time_budget=budget)
        except MachineError as exc:
            raise BehaviorError(f"interpreted machine cannot read its tape: {exc}") from exc
        ctx.tick(result.steps)
        ctx.use(result.cells)
        if result.outcome == M_REJECT:
            ctx.reject()
        elif result.outcome != M_ACCEPT:
            raise BehaviorError(f"interpreted machine stopped with {result.outcome} after {result.steps} steps")
        parts = result.tape.split("#", 3)
        if len(parts) != 4:
            raise BehaviorError("interpreted machine destroyed its argument header")
        return parts[3]

    def map(self, pair: Pair, ctx: Context) -> List[Pair]:
        arg = pair.key.decode("latin-1") + "," + pair.value.decode("latin-1")
        out = self._execute(1, arg, ctx)
        if ctx.flag is not None or not out:
            return []
        pairs = []
        for record in out.split(";"):
            k, sep, v = record.partition(",")
            if not sep:
                raise BehaviorError(f"mapper record {record!r} has no ','")
            pairs.append(Pair(k.encode("latin-1"), v.encode("latin-1")))
        return pairs

    def reduce(self, key: bytes, values: Sequence[bytes], ctx: Context) -> List[bytes]:
        arg = key.decode("latin-1") + "|" + ";".join(v.decode("latin-1") for v in values)
        out = self._execute(0, arg, ctx)
        if ctx.flag is not None:
            return []
        _, sep, body = out.partition("|")
        if not sep:
            raise BehaviorError("reducer output lost its '|' separator")
        if body.startswith("+"):
            ctx.accept()
            body = body[1:]
        return [v.encode("latin-1") for v in body.split(";")] if body else []


def interpreted_program(
    machine: TispMachine,
    rounds: int,
    limits: ResourceLimits = ResourceLimits(),
    acceptance: str = "accept-state",
    name: str = "interpreted",
) -> MrcProgram:
    return MrcProgram(
        rounds=rounds,
        behavior=InterpretedBehavior(machine, limits),
        limits=limits,
        acceptance=acceptance,
        name=name,
    )
