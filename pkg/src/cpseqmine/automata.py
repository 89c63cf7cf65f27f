"""Finite automata over items plus the reserved EOS padding label.

Labels are ``int``: non-negative values are ItemIds and ``EOS`` (-1) is the
end-of-sequence padding symbol. Pattern words handed to an automaton always
have a fixed length; patterns shorter than that are padded with EOS.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Callable, Iterable, Sequence as Seq

from .seqdb import GapSpec, Sequence

EOS = -1

Transition = tuple[int, int, int]


class Automaton:
    """Possibly nondeterministic automaton without epsilon moves."""

    def __init__(
        self,
        state_count: int,
        initial: int,
        accepting: Iterable[int],
        transitions: Iterable[Transition],
    ):
        self.state_count = state_count
        self.initial = initial
        self.accepting = frozenset(accepting)
        self.transitions = frozenset(transitions)
        for q in (initial, *self.accepting):
            if not 0 <= q < state_count:
                raise ValueError(f"state {q} out of range")
        self._delta: dict[tuple[int, int], set[int]] = defaultdict(set)
        for src, label, dst in self.transitions:
            if not (0 <= src < state_count and 0 <= dst < state_count):
                raise ValueError(f"transition {src}-{label}->{dst} out of range")
            self._delta[src, label].add(dst)
        self.deterministic = all(len(t) == 1 for t in self._delta.values())

    def __repr__(self) -> str:
        kind = "DFA" if self.deterministic else "NFA"
        return f"<{kind} states={self.state_count} transitions={len(self.transitions)}>"

    @property
    def labels(self) -> set[int]:
        return {label for _, label, _ in self.transitions}

    def successors(self, state: int, label: int) -> set[int]:
        return self._delta.get((state, label), set())

    def edges(self) -> list[Transition]:
        """Transitions sorted by (source, target, label) with EOS last per pair."""
        return sorted(self.transitions, key=lambda t: (t[0], t[2], t[1] == EOS, t[1]))

    def item_edges(self) -> set[Transition]:
        return {t for t in self.transitions if t[1] != EOS}

    def to_dot(self, label_name: Callable[[int], str] | None = None, name: str = "A") -> str:
        """Graphviz text, one edge per line."""
        if label_name is None:
            label_name = str
        lines = [f"digraph {name} {{", "  rankdir=LR;", f"  __start -> {self.initial};"]
        for q in sorted(self.accepting):
            lines.append(f"  {q} [shape=doublecircle];")
        for src, label, dst in self.edges():
            text = "EOS" if label == EOS else label_name(label)
            lines.append(f'  {src} -> {dst} [label="{text}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def accepts(a: Automaton, word: Seq[int]) -> bool:
    """NFA acceptance by simulating the set of reachable states."""
    current = {a.initial}
    for label in word:
        current = {nxt for q in current for nxt in a.successors(q, label)}
        if not current:
            return False
    return not current.isdisjoint(a.accepting)


def pad(pattern: Seq[int], length: int) -> tuple[int, ...]:
    if len(pattern) > length:
        raise ValueError(f"pattern of length {len(pattern)} exceeds word length {length}")
    return tuple(pattern) + (EOS,) * (length - len(pattern))


def build_subsequence_automaton(
    s: Sequence | Seq[int],
    allowed: Iterable[int] | None = None,
    gap: GapSpec | None = None,
) -> Automaton:
    """Automaton whose EOS-padded words are the subsequences of ``s``.

    State ``q`` means "the last matched item sat at position q" (1-based;
    0 = nothing matched yet). Only items in ``allowed`` get transitions
    (``None`` allows every item). With a gap, a transition q -> pos on a
    non-initial state is kept only when the number of items strictly between
    the two positions lies within the gap bounds. Every state has an EOS move
    to the final state, which loops on EOS.
    """
    items = s.items if isinstance(s, Sequence) else tuple(s)
    n = len(items)
    allowed_set = None if allowed is None else set(allowed)
    if gap is not None:
        lo = gap.m_gap
        hi = n if gap.n_gap is None else gap.n_gap
    transitions = []
    for state in range(n + 1):
        for position in range(state + 1, n + 1):
            item = items[position - 1]
            if allowed_set is not None and item not in allowed_set:
                continue
            if gap is not None and state != 0 and not lo <= position - state - 1 <= hi:
                continue
            transitions.append((state, item, position))
        transitions.append((state, EOS, n))
    return Automaton(n + 1, 0, {n}, transitions)


def add_padding_closure(a: Automaton) -> Automaton:
    """Let every accepting state continue with EOS padding only.

    A fresh accepting sink is added; each accepting state gets an EOS move
    to it and the sink loops on EOS.
    """
    sink = a.state_count
    transitions = set(a.transitions)
    transitions.update((q, EOS, sink) for q in a.accepting)
    transitions.add((sink, EOS, sink))
    return Automaton(a.state_count + 1, a.initial, a.accepting | {sink}, transitions)


__all__ = [
    "EOS",
    "Automaton",
    "accepts",
    "pad",
    "build_subsequence_automaton",
    "add_padding_closure",
]
