"""Regular expressions over item tokens, compiled to EOS-padded DFAs.

Syntax: tokens of the database alphabet, juxtaposition (or whitespace) for
concatenation, ``|`` for alternation, postfix ``*``, ``+`` and ``?``, and
grouping with ``( )`` or ``{ }``. A run of characters such as ``bc`` is split
greedily into the longest alphabet tokens, so ``a*{bb|bc|dc}`` works over the
single-letter alphabet while ``GENE DISEASE`` works over word tokens.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence as Seq, Union

from .automata import Automaton, add_padding_closure

OPERATORS = set("|*+?(){}")
CLOSING = {"(": ")", "{": "}"}


class RegexError(ValueError):
    """Base class for regex compilation errors."""


class RegexSyntaxError(RegexError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at position {position}")


class UnknownTokenError(RegexError):
    def __init__(self, token: str, position: int):
        self.token = token
        self.position = position
        super().__init__(f"unknown token {token!r} at position {position}")


@dataclass(frozen=True)
class Literal:
    item: int
    token: str


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Concat:
    parts: tuple[Node, ...]


@dataclass(frozen=True)
class Alternation:
    options: tuple[Node, ...]


@dataclass(frozen=True)
class Star:
    child: Node


@dataclass(frozen=True)
class Plus:
    child: Node


@dataclass(frozen=True)
class Optional:
    child: Node


@dataclass(frozen=True)
class Group:
    child: Node


Node = Union[Literal, Empty, Concat, Alternation, Star, Plus, Optional, Group]


def _lex(src: str, alphabet: Mapping[str, int]) -> list[tuple[str, object, int]]:
    """Split ``src`` into ("op", char, pos) and ("lit", (item, token), pos)."""
    out: list[tuple[str, object, int]] = []
    longest = max((len(t) for t in alphabet), default=0)
    i = 0
    while i < len(src):
        ch = src[i]
        if ch.isspace():
            i += 1
            continue
        if ch in OPERATORS:
            out.append(("op", ch, i))
            i += 1
            continue
        j = i
        while j < len(src) and not src[j].isspace() and src[j] not in OPERATORS:
            j += 1
        run = src[i:j]
        k = 0
        while k < len(run):
            for size in range(min(longest, len(run) - k), 0, -1):
                tok = run[k : k + size]
                if tok in alphabet:
                    out.append(("lit", (alphabet[tok], tok), i + k))
                    k += size
                    break
            else:
                raise UnknownTokenError(run[k:] if k else run, i + k)
        i = j
    return out


class _Parser:
    def __init__(self, src: str, alphabet: Mapping[str, int]):
        self.src = src
        self.tokens = _lex(src, alphabet)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def at_op(self, chars: str) -> bool:
        tok = self.peek()
        return tok is not None and tok[0] == "op" and tok[1] in chars

    def parse(self) -> Node:
        if not self.tokens:
            raise RegexSyntaxError("empty expression", 0)
        node = self.alternation()
        tok = self.peek()
        if tok is not None:
            raise RegexSyntaxError(f"unbalanced {tok[1]!r}", tok[2])
        return node

    def alternation(self) -> Node:
        options = [self.concat()]
        while self.at_op("|"):
            self.pos += 1
            options.append(self.concat())
        return options[0] if len(options) == 1 else Alternation(tuple(options))

    def concat(self) -> Node:
        parts = []
        while True:
            tok = self.peek()
            if tok is None or (tok[0] == "op" and tok[1] in "|)}"):
                break
            parts.append(self.repeat())
        if not parts:
            return Empty()
        return parts[0] if len(parts) == 1 else Concat(tuple(parts))

    def repeat(self) -> Node:
        node = self.atom()
        while self.at_op("*+?"):
            op = self.peek()[1]
            self.pos += 1
            node = {"*": Star, "+": Plus, "?": Optional}[op](node)
        return node

    def atom(self) -> Node:
        kind, value, where = self.peek()
        if kind == "lit":
            self.pos += 1
            item, token = value
            return Literal(item, token)
        if value in CLOSING:
            self.pos += 1
            inner = self.alternation()
            tok = self.peek()
            if tok is None:
                raise RegexSyntaxError(f"unbalanced {value!r}", where)
            if tok[1] != CLOSING[value]:
                raise RegexSyntaxError(f"expected {CLOSING[value]!r}, found {tok[1]!r}", tok[2])
            self.pos += 1
            return Group(inner)
        raise RegexSyntaxError(f"unexpected {value!r}", where)


def parse_regex(src: str, alphabet: Mapping[str, int]) -> Node:
    """Parse ``src`` against a token -> ItemId mapping."""
    return _Parser(src, alphabet).parse()


@dataclass
class EpsilonNFA:
    """Thompson automaton; ``None`` labels are epsilon moves."""

    state_count: int
    start: int
    accept: int
    transitions: list[tuple[int, int | None, int]]

    def closure(self, states: set[int]) -> frozenset[int]:
        eps: dict[int, list[int]] = {}
        for src, label, dst in self.transitions:
            if label is None:
                eps.setdefault(src, []).append(dst)
        stack = list(states)
        seen = set(states)
        while stack:
            q = stack.pop()
            for r in eps.get(q, ()):
                if r not in seen:
                    seen.add(r)
                    stack.append(r)
        return frozenset(seen)

    def step(self, states: frozenset[int], label: int) -> frozenset[int]:
        moved = {dst for src, lab, dst in self.transitions if lab == label and src in states}
        return self.closure(moved)

    def accepts(self, word: Seq[int]) -> bool:
        current = self.closure({self.start})
        for label in word:
            current = self.step(current, label)
        return self.accept in current


def thompson(node: Node) -> EpsilonNFA:
    transitions: list[tuple[int, int | None, int]] = []
    counter = [0]

    def new() -> int:
        counter[0] += 1
        return counter[0] - 1

    def build(n: Node) -> tuple[int, int]:
        if isinstance(n, Literal):
            s, t = new(), new()
            transitions.append((s, n.item, t))
            return s, t
        if isinstance(n, Empty):
            s, t = new(), new()
            transitions.append((s, None, t))
            return s, t
        if isinstance(n, Group):
            return build(n.child)
        if isinstance(n, Concat):
            first_s, last_t = build(n.parts[0])
            for part in n.parts[1:]:
                s, t = build(part)
                transitions.append((last_t, None, s))
                last_t = t
            return first_s, last_t
        if isinstance(n, Alternation):
            s, t = new(), new()
            for option in n.options:
                os_, ot = build(option)
                transitions.append((s, None, os_))
                transitions.append((ot, None, t))
            return s, t
        if isinstance(n, (Star, Plus, Optional)):
            s, t = new(), new()
            cs, ct = build(n.child)
            transitions.append((s, None, cs))
            transitions.append((ct, None, t))
            if not isinstance(n, Plus):
                transitions.append((s, None, t))
            if not isinstance(n, Optional):
                transitions.append((ct, None, cs))
            return s, t
        raise TypeError(f"unknown regex node {n!r}")

    start, accept = build(node)
    return EpsilonNFA(counter[0], start, accept, transitions)


def determinize(nfa: EpsilonNFA) -> Automaton:
    """Subset construction; the empty (dead) subset is left out."""
    labels = sorted({lab for _, lab, _ in nfa.transitions if lab is not None})
    start = nfa.closure({nfa.start})
    index = {start: 0}
    queue = [start]
    transitions = []
    accepting = set()
    while queue:
        subset = queue.pop(0)
        src = index[subset]
        if nfa.accept in subset:
            accepting.add(src)
        for label in labels:
            target = nfa.step(subset, label)
            if not target:
                continue
            if target not in index:
                index[target] = len(index)
                queue.append(target)
            transitions.append((src, label, index[target]))
    return Automaton(len(index), 0, accepting, transitions)


def compile_regex(src: str, alphabet: Mapping[str, int]) -> Automaton:
    """Regex source -> deterministic automaton closed under trailing EOS padding."""
    return add_padding_closure(determinize(thompson(parse_regex(src, alphabet))))
