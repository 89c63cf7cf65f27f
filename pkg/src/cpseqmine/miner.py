"""Constraint-based sequential pattern mining on top of the CSP core."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence as Seq

from .automata import build_subsequence_automaton
from .constraints import (
    post_among,
    post_eos_suffix,
    post_forbid,
    post_frequency,
    post_reified_regular,
    post_regular,
    post_size,
)
from .regex import compile_regex
from .seqdb import GapSpec, SequenceDatabase, contains, item_supports, resolve_minsup
from .solver import Model, SearchStats, Solution, solve_all, solve_minimize

STRATEGIES = ("filter", "optimize-block")


class QueryError(ValueError):
    """The query cannot be turned into a model for this database.

    ``field`` names the offending query field (``minsup``, ``items``, ``db``).
    """

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(message)


class MiningError(RuntimeError):
    """A mined pattern failed its independent support recomputation."""


@dataclass(frozen=True)
class SizeConstraint:
    kind: str  # "exact", "min" or "max"
    k: int

    def __post_init__(self):
        if self.kind not in ("exact", "min", "max"):
            raise ValueError(f"unknown size kind {self.kind!r}")
        if self.k < 0:
            raise ValueError("size bound must be >= 0")

    def admits(self, length: int) -> bool:
        if self.kind == "exact":
            return length == self.k
        if self.kind == "min":
            return length >= self.k
        return length <= self.k


@dataclass(frozen=True)
class ItemConstraint:
    """Between ``low`` and ``high`` pattern positions hold a token of ``tokens``.

    ``high=None`` means no upper bound. ``exclude(...)`` is the (0, 0) case.
    """

    tokens: frozenset[str]
    low: int = 1
    high: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "tokens", frozenset(self.tokens))
        if not self.tokens:
            raise ValueError("item constraint needs at least one token")
        if self.low < 0 or (self.high is not None and self.high < self.low):
            raise ValueError(f"invalid bounds [{self.low}, {self.high}]")

    @classmethod
    def include(cls, *tokens: str, low: int = 1, high: int | None = None) -> ItemConstraint:
        return cls(frozenset(tokens), low, high)

    @classmethod
    def exclude(cls, *tokens: str) -> ItemConstraint:
        return cls(frozenset(tokens), 0, 0)


@dataclass(frozen=True)
class MiningQuery:
    minsup: int | float | Fraction = 1
    closed: bool = False
    sizes: tuple[SizeConstraint, ...] = ()
    gap: GapSpec | None = None
    items: tuple[ItemConstraint, ...] = ()
    regex: str | None = None


@dataclass(frozen=True, order=True)
class PatternResult:
    pattern: tuple[int, ...]
    support: int
    sids: tuple[int, ...] = field(compare=True)


@dataclass
class MinedModel:
    """A built model plus the bookkeeping needed to decode its solutions."""

    model: Model
    minsup: int
    frequent_items: list[int]


def absolute_minsup(db: SequenceDatabase, q: MiningQuery) -> int:
    try:
        minsup = resolve_minsup(q.minsup, len(db))
    except (TypeError, ValueError) as exc:
        raise QueryError(str(exc), "minsup") from None
    if not 1 <= minsup <= len(db):
        raise QueryError(f"minsup {q.minsup} resolves to {minsup}, outside [1, {len(db)}]", "minsup")
    return minsup


def resolve_items(db: SequenceDatabase, tokens: Iterable[str]) -> set[int]:
    unknown = sorted(t for t in tokens if t not in db.alphabet)
    if unknown:
        raise QueryError(f"unknown item(s): {', '.join(unknown)}", "items")
    return {db.alphabet[t] for t in tokens}


def build_model(db: SequenceDatabase, q: MiningQuery, check_restore: bool = False) -> MinedModel:
    """One reified Regular per sequence plus a support threshold, then the query extras."""
    if not len(db):
        raise QueryError("empty database", "db")
    minsup = absolute_minsup(db, q)
    frequent = [i for i, c in item_supports(db).items() if c >= minsup]
    n_items = len(db.alphabet)
    eos = n_items
    model = Model(eos=eos, check_restore=check_restore)
    ell = db.ell
    domain = (1 << eos) | sum(1 << i for i in frequent)
    model.pattern_vars = [model.new_var(domain, f"P{i + 1}") for i in range(ell)]
    model.support_vars = [model.new_bool(f"S{s.sid}") for s in db.sequences]
    P = model.pattern_vars
    for s, b in zip(db.sequences, model.support_vars):
        post_reified_regular(model, b, P, build_subsequence_automaton(s, frequent, q.gap))
    post_frequency(model, model.support_vars, minsup)
    post_eos_suffix(model, P)
    post_size(model, P, "min", 1)
    for size in q.sizes:
        post_size(model, P, size.kind, size.k)
    for ic in q.items:
        values = resolve_items(db, ic.tokens)
        high = ell if ic.high is None else min(ic.high, ell)
        if ic.low > high:
            model.failed = True
            continue
        post_among(model, P, values, ic.low, high)
    if q.regex is not None:
        post_regular(model, P, compile_regex(q.regex, db.alphabet.ids))
    return MinedModel(model, minsup, frequent)


def _result(db: SequenceDatabase, sol: Solution, gap: GapSpec | None) -> PatternResult:
    sids = tuple(db.sequences[k].sid for k in sol.support_indices())
    expected = tuple(s.sid for s in db.sequences if contains(s, sol.pattern, gap))
    if sids != expected:
        raise MiningError(f"support mismatch for {db.decode(sol.pattern)}: {sids} != {expected}")
    return PatternResult(sol.pattern, len(sids), sids)


def is_subsequence(p: Seq[int], q: Seq[int]) -> bool:
    it = iter(q)
    return all(x in it for x in p)


def is_closed(db: SequenceDatabase, p: PatternResult, frequent: Iterable[PatternResult]) -> bool:
    """False iff a strict super-pattern in ``frequent`` has the same support."""
    return not any(
        len(f.pattern) > len(p.pattern)
        and f.support == p.support
        and is_subsequence(p.pattern, f.pattern)
        for f in frequent
    )


def closed_subset(results: Iterable[PatternResult]) -> list[PatternResult]:
    by_support: dict[int, list[PatternResult]] = {}
    for r in results:
        by_support.setdefault(r.support, []).append(r)
    out = []
    for group in by_support.values():
        for r in group:
            if not any(
                len(f.pattern) > len(r.pattern) and is_subsequence(r.pattern, f.pattern)
                for f in group
            ):
                out.append(r)
    return sorted(out)


def mine(
    db: SequenceDatabase, q: MiningQuery, strategy: str = "filter"
) -> tuple[list[PatternResult], SearchStats]:
    """Run a query; returns patterns sorted by ItemId sequence and search stats."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    built = build_model(db, q)
    if q.closed and strategy == "optimize-block":
        return _optimize_block(db, q, built)
    found: list[PatternResult] = []
    stats = solve_all(built.model, lambda sol: found.append(_result(db, sol, q.gap)))
    if q.closed:
        found = closed_subset(found)
    return sorted(found), stats


def _optimize_block(
    db: SequenceDatabase, q: MiningQuery, built: MinedModel
) -> tuple[list[PatternResult], SearchStats]:
    """Minimise the EOS count, block the optimum, repeat until unsatisfiable.

    Optima come out in non-increasing length, so when a pattern is found all
    its strict super-patterns already have been and closedness is decided on
    the spot.
    """
    model = built.model
    model.minimize_eos_count()
    stats = SearchStats()
    seen: list[PatternResult] = []
    closed: list[PatternResult] = []
    while True:
        sol = solve_minimize(model, stats)
        if sol is None:
            break
        res = _result(db, sol, q.gap)
        if is_closed(db, res, seen):
            closed.append(res)
        seen.append(res)
        post_forbid(model, model.pattern_vars, sol.pattern)
    stats.solutions = len(seen)
    return sorted(closed), stats


def mine_frequent(db: SequenceDatabase, q: MiningQuery) -> list[PatternResult]:
    if q.closed:
        raise ValueError("use mine_closed for closed queries")
    return mine(db, q)[0]


def mine_closed(db: SequenceDatabase, q: MiningQuery, strategy: str = "filter") -> list[PatternResult]:
    if not q.closed:
        q = replace(q, closed=True)
    return mine(db, q, strategy)[0]
