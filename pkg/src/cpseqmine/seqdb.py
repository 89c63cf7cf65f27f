"""Sequence databases: parsing, interning and ground-truth subsequence semantics.

Both the constraint miner (for preprocessing) and the brute-force oracle (for
verification) use the predicates in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence as Seq


class ParseError(ValueError):
    """Malformed database text."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnsupportedMultisetError(ParseError):
    """SPMF itemset holding more than one item."""


@dataclass(frozen=True)
class GapSpec:
    """Bounds on the number of items strictly between two matched neighbours.

    ``n_gap=None`` means unbounded.
    """

    m_gap: int = 0
    n_gap: int | None = None

    def __post_init__(self):
        if self.m_gap < 0:
            raise ValueError(f"gap minimum must be >= 0, got {self.m_gap}")
        if self.n_gap is not None and self.n_gap < self.m_gap:
            raise ValueError(f"gap maximum {self.n_gap} < minimum {self.m_gap}")

    def admits(self, between: int) -> bool:
        return between >= self.m_gap and (self.n_gap is None or between <= self.n_gap)


@dataclass(frozen=True)
class Sequence:
    sid: int
    items: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.items)


@dataclass
class Alphabet:
    """Bidirectional token <-> ItemId map; ids are dense from 0 in insertion order."""

    tokens: list[str] = field(default_factory=list)
    ids: dict[str, int] = field(default_factory=dict)

    def intern(self, token: str) -> int:
        item = self.ids.get(token)
        if item is None:
            item = len(self.tokens)
            self.tokens.append(token)
            self.ids[token] = item
        return item

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.ids

    def __getitem__(self, token: str) -> int:
        return self.ids[token]

    def token(self, item: int) -> str:
        return self.tokens[item]


class SequenceDatabase:
    """Immutable collection of item sequences over an interned alphabet."""

    def __init__(self, alphabet: Alphabet, sequences: Iterable[Sequence]):
        self.alphabet = alphabet
        self.sequences: tuple[Sequence, ...] = tuple(sequences)
        sids = [s.sid for s in self.sequences]
        if len(set(sids)) != len(sids):
            raise ValueError("duplicate sequence identifiers")
        n = len(alphabet)
        for s in self.sequences:
            if any(not 0 <= i < n for i in s.items):
                raise ValueError(f"sequence {s.sid} uses an item outside the alphabet")
        self.ell = max((len(s) for s in self.sequences), default=0)

    @classmethod
    def from_tokens(
        cls, rows: Iterable[Iterable[str]], alphabet: Iterable[str] = ()
    ) -> SequenceDatabase:
        """Build a database from token lists; sids are 1-based row numbers.

        ``alphabet`` pre-seeds the interning order (tokens need not occur).
        """
        alpha = Alphabet()
        for tok in alphabet:
            alpha.intern(tok)
        seqs = [
            Sequence(k, tuple(alpha.intern(t) for t in row))
            for k, row in enumerate(rows, start=1)
        ]
        return cls(alpha, seqs)

    def __len__(self) -> int:
        return len(self.sequences)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SequenceDatabase):
            return NotImplemented
        return (
            self.alphabet.tokens == other.alphabet.tokens
            and self.sequences == other.sequences
        )

    def __repr__(self) -> str:
        return f"SequenceDatabase(m={len(self)}, ell={self.ell}, items={len(self.alphabet)})"

    def decode(self, items: Iterable[int]) -> tuple[str, ...]:
        return tuple(self.alphabet.tokens[i] for i in items)

    def encode(self, tokens: Iterable[str]) -> tuple[int, ...]:
        return tuple(self.alphabet.ids[t] for t in tokens)


def parse(text: str, format: str = "plain") -> SequenceDatabase:
    """Parse database text in ``plain`` or ``spmf`` format.

    plain: one sequence per line, whitespace separated tokens.
    spmf: integer items, ``-1`` closes an itemset, ``-2`` closes the sequence.
    Blank lines are skipped; sids are assigned 1, 2, ... in reading order.
    """
    if format == "plain":
        rows = [line.split() for line in text.splitlines()]
        return SequenceDatabase.from_tokens(row for row in rows if row)
    if format == "spmf":
        return _parse_spmf(text)
    raise ValueError(f"unknown database format {format!r}")


def _parse_spmf(text: str) -> SequenceDatabase:
    alpha = Alphabet()
    seqs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        # SPMF metadata and comment lines
        if not stripped or stripped[0] in "#%@":
            continue
        items: list[int] = []
        itemset: list[str] = []
        terminated = False
        for tok in stripped.split():
            if terminated:
                raise ParseError("content after -2 terminator", lineno)
            try:
                value = int(tok)
            except ValueError:
                raise ParseError(f"malformed integer {tok!r}", lineno) from None
            if value == -1 or value == -2:
                if len(itemset) > 1:
                    raise UnsupportedMultisetError(
                        f"itemset of size {len(itemset)} ({' '.join(itemset)}); "
                        "only single-item itemsets are supported",
                        lineno,
                    )
                if itemset:
                    items.append(alpha.intern(itemset[0]))
                itemset = []
                terminated = value == -2
            elif value < 0:
                raise ParseError(f"negative item {value}", lineno)
            else:
                itemset.append(str(value))
        if itemset:
            if len(itemset) > 1:
                raise UnsupportedMultisetError(
                    f"itemset of size {len(itemset)}; only single-item itemsets are supported",
                    lineno,
                )
            items.append(alpha.intern(itemset[0]))
        seqs.append(Sequence(len(seqs) + 1, tuple(items)))
    return SequenceDatabase(alpha, seqs)


def load(path: str | Path, format: str = "plain") -> SequenceDatabase:
    return parse(Path(path).read_text(encoding="utf-8"), format)


def serialize(db: SequenceDatabase) -> str:
    """Plain-format text. Empty sequences cannot be represented and are dropped."""
    lines = [" ".join(db.decode(s.items)) for s in db.sequences if s.items]
    return "".join(line + "\n" for line in lines)


def contains(s: Sequence | Seq[int], p: Seq[int], gap: GapSpec | None = None) -> bool:
    """True iff ``p`` embeds into ``s`` (respecting ``gap`` between neighbours)."""
    items = s.items if isinstance(s, Sequence) else s
    if not p:
        return True
    if gap is None:
        it = iter(items)
        return all(x in it for x in p)
    # ends: 0-based positions where the current pattern prefix can end
    ends = [j for j, x in enumerate(items) if x == p[0]]
    for target in p[1:]:
        if not ends:
            return False
        nxt = []
        for j in range(ends[0] + 1, len(items)):
            if items[j] == target and any(gap.admits(j - e - 1) for e in ends if e < j):
                nxt.append(j)
        ends = nxt
    return bool(ends)


def supporting(db: SequenceDatabase, p: Seq[int], gap: GapSpec | None = None) -> list[int]:
    """Sids of the sequences containing ``p``, in database order."""
    return [s.sid for s in db.sequences if contains(s, p, gap)]


def support(db: SequenceDatabase, p: Seq[int], gap: GapSpec | None = None) -> int:
    return sum(1 for s in db.sequences if contains(s, p, gap))


def item_supports(db: SequenceDatabase) -> dict[int, int]:
    """Sequence-level support of every item occurring in ``db``."""
    counts: dict[int, int] = {}
    for s in db.sequences:
        for item in set(s.items):
            counts[item] = counts.get(item, 0) + 1
    return dict(sorted(counts.items()))


def resolve_minsup(minsup: int | float | Fraction | str, m: int) -> int:
    """Absolute support threshold.

    Integers are absolute counts. Floats and Fractions in (0, 1] are relative
    and resolve to ``ceil(ratio * m)``; floats go through their decimal repr so
    ``0.1`` means exactly one tenth.
    """
    if isinstance(minsup, bool):
        raise TypeError("minsup must be a number")
    if isinstance(minsup, int):
        return minsup
    if isinstance(minsup, float):
        minsup = Fraction(repr(minsup))
    elif isinstance(minsup, str):
        minsup = Fraction(minsup)
    if not 0 < minsup <= 1:
        raise ValueError(f"relative minsup must lie in (0, 1], got {minsup}")
    return math.ceil(minsup * m)
