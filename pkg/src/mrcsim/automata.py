"""DFA, work-tape Turing machine and single-tape TISP machine engines.

Symbols are one-character strings.  Inputs may be given as ``str`` or
``bytes`` (bytes are decoded as latin-1).

The work-tape machine reads its input from a two-way read-only tape laid out
as ``<x>``: position 0 holds the left end-marker, positions 1..n the input,
n+1 the right end-marker.  The input head starts on the left marker, the work
head on the first of the ``work_space_bound`` blank work cells.  Moving
either head off its tape is a machine fault.  A missing transition halts in
the reject state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

LEFT_END = "<"
RIGHT_END = ">"
ACCEPT = "accept"
REJECT = "reject"
DIVERGED = "diverged"

Text = Union[str, bytes]


class MachineError(ValueError):
    """Invalid machine description or input outside the alphabet."""


class MachineFault(RuntimeError):
    """A head left its tape while running."""


def _text(x: Text) -> str:
    return x.decode("latin-1") if isinstance(x, (bytes, bytearray)) else x


@dataclass(frozen=True)
class Dfa:
    states: Tuple[str, ...]
    alphabet: Tuple[str, ...]
    transitions: Mapping[Tuple[str, str], str]
    start: str
    accepting: FrozenSet[str]
    _index: Dict[str, int] = field(init=False, repr=False, compare=False)
    _step: Dict[str, Tuple[int, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "transitions", dict(self.transitions))
        if len(set(self.states)) != len(self.states) or not self.states:
            raise MachineError("DFA states must be non-empty and distinct")
        if any(len(a) != 1 for a in self.alphabet) or len(set(self.alphabet)) != len(self.alphabet):
            raise MachineError("DFA alphabet must be distinct single symbols")
        if self.start not in self.states:
            raise MachineError(f"start state {self.start!r} is not declared")
        for q in self.accepting:
            if q not in self.states:
                raise MachineError(f"accepting state {q!r} is not declared")
        index = {q: i for i, q in enumerate(self.states)}
        step = {}
        for a in self.alphabet:
            row = []
            for q in self.states:
                target = self.transitions.get((q, a))
                if target is None:
                    raise MachineError(f"transition missing for ({q!r}, {a!r})")
                if target not in index:
                    raise MachineError(f"transition target {target!r} is not declared")
                row.append(index[target])
            step[a] = tuple(row)
        extra = set(self.transitions) - {(q, a) for q in self.states for a in self.alphabet}
        if extra:
            raise MachineError(f"transitions on undeclared states/symbols: {sorted(extra)}")
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_step", step)

    def index(self, state: str) -> int:
        return self._index[state]

    def step_row(self, symbol: str) -> Tuple[int, ...]:
        try:
            return self._step[symbol]
        except KeyError:
            raise MachineError(f"symbol {symbol!r} is not in the alphabet") from None

    def accepts(self, x: Text) -> bool:
        return run_dfa(self, x) in self.accepting


def run_dfa(dfa: Dfa, x: Text, start: Optional[str] = None) -> str:
    """State reached after consuming ``x`` from ``start`` (default: the DFA's start)."""
    q = dfa.index(dfa.start if start is None else start)
    for a in _text(x):
        q = dfa.step_row(a)[q]
    return dfa.states[q]


def dfa_transition_indices(dfa: Dfa, block: Text) -> List[int]:
    """Index form of :func:`dfa_transition_table`: entry i is the image of state i."""
    table = list(range(len(dfa.states)))
    for a in _text(block):
        row = dfa.step_row(a)
        table = [row[q] for q in table]
    return table


def dfa_transition_table(dfa: Dfa, block: Text) -> Dict[str, str]:
    """Map every state to the state reached after reading ``block`` from it."""
    image = dfa_transition_indices(dfa, block)
    return {q: dfa.states[image[i]] for i, q in enumerate(dfa.states)}


MOVES = {"L": -1, "R": 1, "S": 0}


@dataclass(frozen=True)
class Tm:
    """Read-only two-way input tape plus a bounded read/write work tape.

    ``delta`` maps (state, input symbol, work symbol) to
    (next state, written work symbol, work move, input move); moves are
    ``"L"``, ``"R"`` or ``"S"``.  Input symbols include the end-markers.
    """

    states: Tuple[str, ...]
    initial: str
    accept: str
    reject: str
    work_alphabet: Tuple[str, ...]
    blank: str
    delta: Mapping[Tuple[str, str, str], Tuple[str, str, str, str]]
    work_space_bound: int
    input_alphabet: Tuple[str, ...] = ("0", "1")

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "work_alphabet", tuple(self.work_alphabet))
        object.__setattr__(self, "input_alphabet", tuple(self.input_alphabet))
        object.__setattr__(self, "delta", dict(self.delta))
        states = set(self.states)
        if len(states) != len(self.states) or not states:
            raise MachineError("TM states must be non-empty and distinct")
        for name in ("initial", "accept", "reject"):
            if getattr(self, name) not in states:
                raise MachineError(f"{name} state {getattr(self, name)!r} is not declared")
        if self.accept == self.reject:
            raise MachineError("accept and reject states must differ")
        if self.blank not in self.work_alphabet:
            raise MachineError("blank must belong to the work alphabet")
        if self.work_space_bound < 1:
            raise MachineError("work tape needs at least one cell")
        if {LEFT_END, RIGHT_END} & set(self.input_alphabet):
            raise MachineError("end-markers cannot be input symbols")
        reads = set(self.input_alphabet) | {LEFT_END, RIGHT_END}
        for (q, a, w), (q2, w2, wm, im) in self.delta.items():
            if q not in states or q2 not in states:
                raise MachineError(f"transition on undeclared state: {(q, a, w)}")
            if a not in reads or w not in self.work_alphabet or w2 not in self.work_alphabet:
                raise MachineError(f"transition on undeclared symbol: {(q, a, w)}")
            if wm not in MOVES or im not in MOVES:
                raise MachineError(f"bad move in transition {(q, a, w)}")
            if q in (self.accept, self.reject):
                raise MachineError("halting states cannot have transitions")

    @property
    def config_count(self) -> int:
        """Number of work configurations: |work alphabet|^s * s * |states|."""
        s = self.work_space_bound
        return len(self.work_alphabet) ** s * s * len(self.states)

    def has_stays(self) -> bool:
        return any(move[3] == "S" for move in self.delta.values())


def run_tm(tm: Tm, x: Text) -> str:
    """Direct simulation; ``diverged`` once a configuration must have repeated."""
    tape = LEFT_END + _text(x) + RIGHT_END
    for a in tape[1:-1]:
        if a not in tm.input_alphabet:
            raise MachineError(f"symbol {a!r} is not in the input alphabet")
    s = tm.work_space_bound
    work = [tm.blank] * s
    q, head, pos = tm.initial, 0, 0
    budget = tm.config_count * len(tape)
    delta = tm.delta
    for _ in range(budget):
        if q == tm.accept:
            return ACCEPT
        if q == tm.reject:
            return REJECT
        move = delta.get((q, tape[pos], work[head]))
        if move is None:
            return REJECT
        q, work[head], wm, im = move
        head += MOVES[wm]
        pos += MOVES[im]
        if not 0 <= head < s:
            raise MachineFault(f"work head left the tape in state {q!r}")
        if not 0 <= pos < len(tape):
            raise MachineFault(f"input head left the tape in state {q!r}")
    if q == tm.accept:
        return ACCEPT
    if q == tm.reject:
        return REJECT
    return DIVERGED


def compile_away_stays(tm: Tm) -> Tm:
    """Replace every input-head stay by a two-step detour through a helper state.

    Off the left marker the detour goes left then right; on it, right then left.
    """
    if not tm.has_stays():
        return tm
    reads = list(tm.input_alphabet) + [LEFT_END, RIGHT_END]
    delta = {}
    helpers: Dict[str, Tuple[str, str]] = {}
    for (q, a, w), (q2, w2, wm, im) in tm.delta.items():
        if im != "S":
            delta[(q, a, w)] = (q2, w2, wm, im)
            continue
        first, back = ("R", "L") if a == LEFT_END else ("L", "R")
        helper = f"{q2}~{back}"
        helpers[helper] = (q2, back)
        delta[(q, a, w)] = (helper, w2, wm, first)
    states = list(tm.states)
    for helper, (target, back) in sorted(helpers.items()):
        if helper in tm.states:
            raise MachineError(f"helper state name {helper!r} collides")
        states.append(helper)
        for a in reads:
            for w in tm.work_alphabet:
                delta[(helper, a, w)] = (target, w, "S", back)
    return Tm(
        states=tuple(states),
        initial=tm.initial,
        accept=tm.accept,
        reject=tm.reject,
        work_alphabet=tm.work_alphabet,
        blank=tm.blank,
        delta=delta,
        work_space_bound=tm.work_space_bound,
        input_alphabet=tm.input_alphabet,
    )


@dataclass(frozen=True)
class WorkConfig:
    state: str
    tape: Tuple[str, ...]
    head: int


class ConfigSpace:
    """Bijection between work configurations and 0 .. count-1."""

    def __init__(self, tm: Tm):
        self.tm = tm
        self.s = tm.work_space_bound
        self.sym_index = {w: i for i, w in enumerate(tm.work_alphabet)}
        self.state_index = {q: i for i, q in enumerate(tm.states)}
        self.tapes = len(tm.work_alphabet) ** self.s
        self.count = self.tapes * self.s * len(tm.states)
        self._decoded: Optional[List[WorkConfig]] = None

    def encode(self, q: str, tape: Sequence[str], head: int) -> int:
        code = 0
        for w in tape:
            code = code * len(self.tm.work_alphabet) + self.sym_index[w]
        return (self.state_index[q] * self.tapes + code) * self.s + head

    def decode(self, index: int) -> WorkConfig:
        if self._decoded is None:
            self._decoded = [self._decode(i) for i in range(self.count)]
        return self._decoded[index]

    def _decode(self, index: int) -> WorkConfig:
        rest, head = divmod(index, self.s)
        qi, code = divmod(rest, self.tapes)
        base = len(self.tm.work_alphabet)
        tape = []
        for _ in range(self.s):
            code, d = divmod(code, base)
            tape.append(self.tm.work_alphabet[d])
        return WorkConfig(self.tm.states[qi], tuple(reversed(tape)), head)

    def initial(self) -> int:
        return self.encode(self.tm.initial, [self.tm.blank] * self.s, 0)


# boundary-table outcome codes beyond the 2 * count exit codes
OUT_ACCEPT, OUT_REJECT, OUT_DIVERGED, OUT_FAULT = range(4)
ROLES = ("leftmost", "interior", "rightmost", "whole")


@dataclass
class BoundaryCodes:
    """Outcomes indexed by ``2 * config + side`` (side 0 = entered on the left).

    A value below ``2 * count`` encodes the exit ``2 * config + side``; larger
    values are ``2 * count + OUT_*``.
    """

    codes: List[int]
    count: int
    steps: int


def block_cells(block: Text, role: str) -> str:
    if role not in ROLES:
        raise ValueError(f"unknown block role {role!r}")
    cells = _text(block)
    if role in ("leftmost", "whole"):
        cells = LEFT_END + cells
    if role in ("rightmost", "whole"):
        cells = cells + RIGHT_END
    return cells


def boundary_codes(tm: Tm, block: Text, role: str, space: Optional[ConfigSpace] = None) -> BoundaryCodes:
    """Simulate ``tm`` (stay-free) from every configuration and entry side of a block.

    Runs are followed until the input head leaves the block, the machine
    halts, or the run closes a cycle.  A cycle is exactly the case where the
    run outlives the block's configuration budget (configurations times
    cells), so it is reported as divergence.  Shared suffixes are memoised.
    """
    if tm.has_stays():
        raise MachineError("compile away input-head stays before building boundary tables")
    cells = block_cells(block, role)
    for a in cells:
        if a not in tm.input_alphabet and a not in (LEFT_END, RIGHT_END):
            raise MachineError(f"symbol {a!r} is not in the input alphabet")
    space = space or ConfigSpace(tm)
    count = space.count
    width = len(cells)
    halt_base = 2 * count
    accept_q, reject_q = tm.accept, tm.reject
    delta = tm.delta
    memo: Dict[Tuple, int] = {}
    codes = [0] * (2 * count)
    steps = 0
    for entry in range(2 * count):
        cfg = space.decode(entry // 2)
        start = (cfg.state, cfg.tape, cfg.head, 0 if entry % 2 == 0 else width - 1)
        path: List[Tuple] = []
        seen = set()
        cur = start
        while True:
            known = memo.get(cur)
            if known is not None:
                out = known
                break
            if cur in seen:
                out = halt_base + OUT_DIVERGED
                break
            seen.add(cur)
            path.append(cur)
            q, tape, head, pos = cur
            if q == accept_q:
                out = halt_base + OUT_ACCEPT
                break
            if q == reject_q:
                out = halt_base + OUT_REJECT
                break
            move = delta.get((q, cells[pos], tape[head]))
            steps += 1
            if move is None:
                out = halt_base + OUT_REJECT
                break
            q2, w2, wm, im = move
            head2 = head + MOVES[wm]
            pos2 = pos + MOVES[im]
            if not 0 <= head2 < space.s:
                out = halt_base + OUT_FAULT
                break
            tape2 = tape[:head] + (w2,) + tape[head + 1 :]
            if pos2 < 0 or pos2 >= width:
                off_left = pos2 < 0
                if (off_left and cells[pos] == LEFT_END) or (not off_left and cells[pos] == RIGHT_END):
                    out = halt_base + OUT_FAULT
                else:
                    out = 2 * space.encode(q2, tape2, head2) + (0 if off_left else 1)
                break
            cur = (q2, tape2, head2, pos2)
        for p in path:
            memo[p] = out
        codes[entry] = out
    return BoundaryCodes(codes, count, steps)


def tm_boundary_function(tm: Tm, block: Text, block_role: str) -> Dict[Tuple[WorkConfig, str], object]:
    """Exit behaviour of ``tm`` on one block, keyed by (configuration, entry side).

    Values are ``(WorkConfig, exit side)`` or one of ``accept``, ``reject``,
    ``diverged``, ``fault``.
    """
    machine = compile_away_stays(tm)
    space = ConfigSpace(machine)
    table = boundary_codes(machine, block, block_role, space)
    names = {OUT_ACCEPT: ACCEPT, OUT_REJECT: REJECT, OUT_DIVERGED: DIVERGED, OUT_FAULT: "fault"}
    result: Dict[Tuple[WorkConfig, str], object] = {}
    for entry, code in enumerate(table.codes):
        key = (space.decode(entry // 2), "LR"[entry % 2])
        if code >= 2 * table.count:
            result[key] = names[code - 2 * table.count]
        else:
            result[key] = (space.decode(code // 2), "LR"[code % 2])
    return result


@dataclass(frozen=True)
class TispMachine:
    """Single-tape machine with simultaneous time and space budgets.

    ``delta`` maps (state, symbol) to (next state, written symbol, move) with
    move ``"L"`` or ``"R"``; moving left on cell 0 keeps the head in place.
    An undefined transition is one step into the reject state.
    """

    states: Tuple[str, ...]
    initial: str
    accept: str
    reject: str
    alphabet: Tuple[str, ...]
    blank: str
    delta: Mapping[Tuple[str, str], Tuple[str, str, str]]
    time_budget: int
    space_budget: int

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "delta", dict(self.delta))
        states = set(self.states)
        if len(states) != len(self.states) or not states:
            raise MachineError("TISP states must be non-empty and distinct")
        for name in ("initial", "accept", "reject"):
            if getattr(self, name) not in states:
                raise MachineError(f"{name} state {getattr(self, name)!r} is not declared")
        if self.accept == self.reject:
            raise MachineError("accept and reject states must differ")
        if self.blank not in self.alphabet:
            raise MachineError("blank must belong to the tape alphabet")
        if self.time_budget < 0 or self.space_budget < 1:
            raise MachineError("budgets must be non-negative (space at least one cell)")
        for (q, a), (q2, b, move) in self.delta.items():
            if q not in states or q2 not in states:
                raise MachineError(f"transition on undeclared state: {(q, a)}")
            if a not in self.alphabet or b not in self.alphabet:
                raise MachineError(f"transition on undeclared symbol: {(q, a)}")
            if move not in ("L", "R"):
                raise MachineError(f"bad move {move!r}")
            if q in (self.accept, self.reject):
                raise MachineError("halting states cannot have transitions")

    def halting(self, q: str) -> bool:
        return q == self.accept or q == self.reject


TIME_EXCEEDED = "time-exceeded"
SPACE_EXCEEDED = "space-exceeded"


@dataclass(frozen=True)
class TispResult:
    outcome: str
    steps: int
    cells: int
    tape: str = ""


def tisp_step(m: TispMachine, q: str, symbol: str) -> Tuple[str, str, int]:
    """One transition: (next state, written symbol, head delta)."""
    move = m.delta.get((q, symbol))
    if move is None:
        return m.reject, symbol, 0
    q2, b, d = move
    return q2, b, -1 if d == "L" else 1


def run_tisp(m: TispMachine, x: Text, time_budget: Optional[int] = None) -> TispResult:
    """Run ``m`` on ``x`` with budget enforcement; exact step and cell counts."""
    text = _text(x)
    for a in text:
        if a not in m.alphabet or a == m.blank:
            raise MachineError(f"symbol {a!r} is not an input symbol")
    budget = m.time_budget if time_budget is None else time_budget
    if len(text) > m.space_budget:
        return TispResult(SPACE_EXCEEDED, 0, len(text), text)
    tape = list(text)
    q, pos, steps = m.initial, 0, 0
    cells = max(len(text), 1)
    while True:
        if q == m.accept or q == m.reject:
            outcome = ACCEPT if q == m.accept else REJECT
            return TispResult(outcome, steps, cells, "".join(tape).rstrip(m.blank))
        if steps == budget:
            return TispResult(TIME_EXCEEDED, steps, cells, "".join(tape).rstrip(m.blank))
        if pos == len(tape):
            tape.append(m.blank)
        q, tape[pos], d = tisp_step(m, q, tape[pos])
        steps += 1
        pos = max(0, pos + d)
        if pos >= m.space_budget:
            return TispResult(SPACE_EXCEEDED, steps, m.space_budget, "".join(tape).rstrip(m.blank))
        cells = max(cells, pos + 1)
