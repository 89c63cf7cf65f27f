"""Brute-force reference miner.

Generate-and-test over every distinct subsequence occurring in the database.
Shares with the engine only the ``seqdb`` predicates and query plumbing
(minsup resolution, the regex parser). No solver or automaton is involved,
so agreement with the miner is independent evidence.
"""

from __future__ import annotations

from typing import Iterator, Sequence as Seq

from . import regex as rx
from .miner import MiningQuery, PatternResult, absolute_minsup, resolve_items
from .seqdb import SequenceDatabase, supporting

DEFAULT_CAP = 10**6


class OracleCapacityError(RuntimeError):
    """The candidate space is larger than the configured cap."""


def _distinct_subsequences(items: Seq[int]) -> Iterator[tuple[int, ...]]:
    # Extending only with the first occurrence of each item visits every
    # distinct subsequence exactly once.
    def rec(prefix: tuple[int, ...], start: int):
        seen = set()
        for j in range(start, len(items)):
            x = items[j]
            if x in seen:
                continue
            seen.add(x)
            ext = prefix + (x,)
            yield ext
            yield from rec(ext, j + 1)

    return rec((), 0)


def enumerate_candidates(db: SequenceDatabase, cap: int = DEFAULT_CAP) -> set[tuple[int, ...]]:
    """All distinct non-empty subsequences of the database sequences."""
    out: set[tuple[int, ...]] = set()
    for s in db.sequences:
        for sub in _distinct_subsequences(s.items):
            out.add(sub)
            if len(out) > cap:
                raise OracleCapacityError(f"more than {cap} candidate patterns")
    return out


def regex_match(node: rx.Node, word: Seq[int]) -> bool:
    """Backtracking matcher over the regex syntax tree."""

    def ends(n: rx.Node, i: int) -> set[int]:
        # positions where a match of n starting at i can end
        if isinstance(n, rx.Literal):
            return {i + 1} if i < len(word) and word[i] == n.item else set()
        if isinstance(n, rx.Empty):
            return {i}
        if isinstance(n, rx.Group):
            return ends(n.child, i)
        if isinstance(n, rx.Concat):
            cur = {i}
            for part in n.parts:
                cur = {e for c in cur for e in ends(part, c)}
            return cur
        if isinstance(n, rx.Alternation):
            return {e for o in n.options for e in ends(o, i)}
        if isinstance(n, rx.Optional):
            return {i} | ends(n.child, i)
        if isinstance(n, (rx.Star, rx.Plus)):
            reached: set[int] = set()
            frontier = ends(n.child, i)
            while frontier - reached:
                new = frontier - reached
                reached |= new
                frontier = {e for c in new for e in ends(n.child, c)}
            return reached | {i} if isinstance(n, rx.Star) else reached
        raise TypeError(f"unknown node {n!r}")

    return len(word) in ends(node, 0)


def _admissible(db: SequenceDatabase, q: MiningQuery):
    ell = db.ell
    items = [(resolve_items(db, ic.tokens), ic.low, ell if ic.high is None else ic.high) for ic in q.items]
    tree = rx.parse_regex(q.regex, db.alphabet.ids) if q.regex is not None else None

    def ok(p: tuple[int, ...]) -> bool:
        if not all(size.admits(len(p)) for size in q.sizes):
            return False
        for values, low, high in items:
            if not low <= sum(1 for x in p if x in values) <= high:
                return False
        return tree is None or regex_match(tree, p)

    return ok


def oracle_mine(db: SequenceDatabase, q: MiningQuery, cap: int = DEFAULT_CAP) -> list[PatternResult]:
    """Frequent patterns satisfying every constraint of ``q`` except closedness."""
    minsup = absolute_minsup(db, q)
    ok = _admissible(db, q)
    out = []
    for p in enumerate_candidates(db, cap):
        if not ok(p):
            continue
        sids = supporting(db, p, q.gap)
        if len(sids) >= minsup:
            out.append(PatternResult(p, len(sids), tuple(sids)))
    return sorted(out)


def _embeds(p: Seq[int], q: Seq[int]) -> bool:
    i = 0
    for x in q:
        if i < len(p) and p[i] == x:
            i += 1
    return i == len(p)


def oracle_closed(db: SequenceDatabase, q: MiningQuery, cap: int = DEFAULT_CAP) -> list[PatternResult]:
    frequent = oracle_mine(db, q, cap)
    return [
        p
        for p in frequent
        if not any(
            f.support == p.support and len(f.pattern) > len(p.pattern) and _embeds(p.pattern, f.pattern)
            for f in frequent
        )
    ]


def oracle_query(db: SequenceDatabase, q: MiningQuery, cap: int = DEFAULT_CAP) -> list[PatternResult]:
    return oracle_closed(db, q, cap) if q.closed else oracle_mine(db, q, cap)
