"""Small regular-expression frontend over {0, 1}.

Grammar: alternation ``|``, concatenation, postfix ``*``, parentheses, and
the literals ``0`` and ``1``.  ``()`` denotes the empty string.  Compiled by
Thompson's construction followed by the subset construction; the result is
a total DFA (the empty subset is the dead state).
"""

from __future__ import annotations

from typing import Dict, FrozenSet, List, Set, Tuple

from .automata import Dfa

ALPHABET = ("0", "1")


class RegexError(ValueError):
    pass


class _Nfa:
    def __init__(self):
        self.eps: List[Set[int]] = []
        self.edges: List[Dict[str, Set[int]]] = []

    def state(self) -> int:
        self.eps.append(set())
        self.edges.append({})
        return len(self.eps) - 1

    def edge(self, a: int, sym: str, b: int) -> None:
        self.edges[a].setdefault(sym, set()).add(b)


class _Parser:
    def __init__(self, text: str, nfa: _Nfa):
        self.text = "".join(text.split())
        self.pos = 0
        self.nfa = nfa

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else None

    def parse(self) -> Tuple[int, int]:
        frag = self.alternation()
        if self.pos != len(self.text):
            raise RegexError(f"unexpected {self.text[self.pos]!r} at position {self.pos}")
        return frag

    def alternation(self):
        frags = [self.concatenation()]
        while self.peek() == "|":
            self.pos += 1
            frags.append(self.concatenation())
        if len(frags) == 1:
            return frags[0]
        start, end = self.nfa.state(), self.nfa.state()
        for s, e in frags:
            self.nfa.eps[start].add(s)
            self.nfa.eps[e].add(end)
        return start, end

    def concatenation(self):
        start = end = self.nfa.state()
        while self.peek() not in (None, "|", ")"):
            s, e = self.starred()
            self.nfa.eps[end].add(s)
            end = e
        return start, end

    def starred(self):
        s, e = self.atom()
        while self.peek() == "*":
            self.pos += 1
            start, end = self.nfa.state(), self.nfa.state()
            self.nfa.eps[start] |= {s, end}
            self.nfa.eps[e] |= {s, end}
            s, e = start, end
        return s, e

    def atom(self):
        c = self.peek()
        if c in ALPHABET:
            self.pos += 1
            s, e = self.nfa.state(), self.nfa.state()
            self.nfa.edge(s, c, e)
            return s, e
        if c == "(":
            self.pos += 1
            frag = self.alternation()
            if self.peek() != ")":
                raise RegexError(f"missing ')' at position {self.pos}")
            self.pos += 1
            return frag
        raise RegexError(f"unexpected {c!r} at position {self.pos}" if c else "unexpected end of pattern")


def _closure(nfa: _Nfa, states) -> FrozenSet[int]:
    seen = set(states)
    stack = list(states)
    while stack:
        for t in nfa.eps[stack.pop()]:
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return frozenset(seen)


def regex_to_dfa(pattern: str) -> Dfa:
    nfa = _Nfa()
    start, final = _Parser(pattern, nfa).parse()
    first = _closure(nfa, {start})
    names = {first: "d0"}
    queue = [first]
    transitions = {}
    while queue:
        subset = queue.pop(0)
        for sym in ALPHABET:
            moved = {t for s in subset for t in nfa.edges[s].get(sym, ())}
            target = _closure(nfa, moved)
            if target not in names:
                names[target] = f"d{len(names)}"
                queue.append(target)
            transitions[(names[subset], sym)] = names[target]
    return Dfa(
        states=tuple(names.values()),
        alphabet=ALPHABET,
        transitions=transitions,
        start="d0",
        accepting=tuple(name for subset, name in names.items() if final in subset),
    )
