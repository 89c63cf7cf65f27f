"""Command line front end.

    cpseqmine --input sdb.txt --minsup 2 --contains a:1, --contains b:1,

Output lines are ``tok tok ...<TAB>support<TAB>sid,sid,...`` sorted by ItemId
sequence. Exit codes: 0 success, 2 bad arguments or input, 3 oracle
mismatch, 4 oracle capacity exceeded.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction

from .miner import STRATEGIES, ItemConstraint, MiningQuery, QueryError, SizeConstraint, mine
from .oracle import DEFAULT_CAP, OracleCapacityError, oracle_query
from .regex import RegexError
from .seqdb import GapSpec, ParseError, SequenceDatabase, load

EXIT_USAGE = 2
EXIT_MISMATCH = 3
EXIT_CAPACITY = 4


class UsageError(Exception):
    def __init__(self, flag: str, message: str):
        self.flag = flag
        super().__init__(f"{flag}: {message}")


def parse_minsup(text: str) -> int | Fraction:
    text = text.strip()
    if text.endswith("%"):
        try:
            pct = Fraction(text[:-1])
        except (ValueError, ZeroDivisionError):
            raise UsageError("--minsup", f"invalid percentage {text!r}") from None
        if not 0 < pct <= 100:
            raise UsageError("--minsup", f"percentage must lie in (0, 100], got {text}")
        return pct / 100
    try:
        value = int(text)
    except ValueError:
        raise UsageError("--minsup", f"expected an integer or a percentage, got {text!r}") from None
    if value < 1:
        raise UsageError("--minsup", f"must be >= 1, got {value}")
    return value


def parse_gap(text: str) -> GapSpec:
    try:
        lo, hi = text.split(",")
        m = int(lo)
        n = None if hi.strip().lower() in ("inf", "") else int(hi)
        return GapSpec(m, n)
    except ValueError as exc:
        raise UsageError("--gap", f"expected M,N with 0 <= M <= N (N may be inf): {exc}") from None


def _tokens(flag: str, text: str) -> frozenset[str]:
    toks = frozenset(t.strip() for t in text.split(",") if t.strip())
    if not toks:
        raise UsageError(flag, f"no items in {text!r}")
    return toks


def parse_contains(text: str) -> ItemConstraint:
    """``tok1,tok2:l,u``; an empty or missing ``u`` means unbounded, ``l`` defaults to 1."""
    items, _, bounds = text.partition(":")
    low, high = 1, None
    if bounds:
        lo, _, hi = bounds.partition(",")
        try:
            low = int(lo) if lo.strip() else 1
            high = int(hi) if hi.strip() else None
        except ValueError:
            raise UsageError("--contains", f"invalid bounds {bounds!r}") from None
    try:
        return ItemConstraint(_tokens("--contains", items), low, high)
    except ValueError as exc:
        raise UsageError("--contains", str(exc)) from None


def parse_exclude(text: str) -> ItemConstraint:
    return ItemConstraint(_tokens("--exclude", text), 0, 0)


def _nonneg(flag: str, value: int | None) -> int | None:
    if value is not None and value < 0:
        raise UsageError(flag, "must be >= 0")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cpseqmine", description="Constraint-based sequential pattern mining.")
    p.add_argument("--input", required=True, help="sequence database file")
    p.add_argument("--format", choices=("plain", "spmf"), default="plain")
    p.add_argument("--minsup", required=True, help="absolute count or percentage such as 10%%")
    p.add_argument("--closed", action="store_true", help="closed patterns only")
    p.add_argument("--min-size", type=int)
    p.add_argument("--max-size", type=int)
    p.add_argument("--size", type=int, help="exact pattern length")
    p.add_argument("--gap", help="M,N items between neighbours; N may be inf")
    p.add_argument("--contains", action="append", default=[], metavar="TOKS:L,U")
    p.add_argument("--exclude", action="append", default=[], metavar="TOKS")
    p.add_argument("--regex")
    p.add_argument("--output", help="write patterns here instead of stdout")
    p.add_argument("--stats", action="store_true", help="search statistics on stderr")
    p.add_argument("--oracle-check", action="store_true", help="verify against brute force")
    p.add_argument("--oracle-cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--strategy", choices=STRATEGIES, default="filter")
    return p


def query_from_args(args: argparse.Namespace) -> MiningQuery:
    sizes = []
    for flag, kind, value in (
        ("--min-size", "min", args.min_size),
        ("--max-size", "max", args.max_size),
        ("--size", "exact", args.size),
    ):
        if _nonneg(flag, value) is not None:
            sizes.append(SizeConstraint(kind, value))
    items = [parse_contains(c) for c in args.contains] + [parse_exclude(e) for e in args.exclude]
    return MiningQuery(
        minsup=parse_minsup(args.minsup),
        closed=args.closed,
        sizes=tuple(sizes),
        gap=parse_gap(args.gap) if args.gap is not None else None,
        items=tuple(items),
        regex=args.regex,
    )


def format_results(db: SequenceDatabase, results) -> str:
    return "".join(
        f"{' '.join(db.decode(r.pattern))}\t{r.support}\t{','.join(map(str, r.sids))}\n"
        for r in results
    )


def _check_tokens(db: SequenceDatabase, q: MiningQuery, args) -> None:
    for flag, constraints in (("--contains", q.items[: len(args.contains)]), ("--exclude", q.items[len(args.contains) :])):
        for ic in constraints:
            unknown = sorted(t for t in ic.tokens if t not in db.alphabet)
            if unknown:
                raise UsageError(flag, f"unknown item(s): {', '.join(unknown)}")


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    err = sys.stderr
    try:
        q = query_from_args(args)
        try:
            db = load(args.input, args.format)
        except (OSError, ParseError) as exc:
            raise UsageError("--input", str(exc)) from None
        _check_tokens(db, q, args)
        started = time.perf_counter()
        try:
            results, stats = mine(db, q, args.strategy)
        except RegexError as exc:
            raise UsageError("--regex", str(exc)) from None
        except QueryError as exc:
            flag = {"minsup": "--minsup", "db": "--input"}.get(exc.field, "--contains/--exclude")
            raise UsageError(flag, str(exc)) from None
        elapsed = time.perf_counter() - started
    except UsageError as exc:
        print(f"cpseqmine: error: {exc}", file=err)
        return EXIT_USAGE

    text = format_results(db, results)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    if args.stats:
        print(
            f"patterns: {len(results)}\nnodes: {stats.nodes}\nfails: {stats.fails}\n"
            f"time: {elapsed:.3f}s",
            file=err,
        )

    if args.oracle_check:
        try:
            expected = oracle_query(db, q, args.oracle_cap)
        except OracleCapacityError as exc:
            print(f"cpseqmine: oracle: {exc}", file=err)
            return EXIT_CAPACITY
        if expected != results:
            got, want = set(results), set(expected)
            print(f"cpseqmine: oracle mismatch: {len(got - want)} extra, {len(want - got)} missing", file=err)
            for r in sorted(got - want):
                print(f"  extra   {' '.join(db.decode(r.pattern))}\t{r.support}", file=err)
            for r in sorted(want - got):
                print(f"  missing {' '.join(db.decode(r.pattern))}\t{r.support}", file=err)
            return EXIT_MISMATCH
        print(f"oracle check: {len(expected)} patterns agree", file=err)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
