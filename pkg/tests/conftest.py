import itertools
from pathlib import Path

import pytest

from cpseqmine.automata import build_subsequence_automaton
from cpseqmine.constraints import post_eos_suffix, post_frequency, post_reified_regular, post_size
from cpseqmine.seqdb import SequenceDatabase, parse
from cpseqmine.solver import Model, solve_all

DATA = Path(__file__).resolve().parent.parent / "data"

SDB1_TEXT = "a b c d a\nd a e\na b d c\nc a\n"


@pytest.fixture
def sdb1() -> SequenceDatabase:
    return parse(SDB1_TEXT)


def tok(db, text):
    """'a b c' -> ItemId tuple."""
    return db.encode(text.split())


def brute_contains(items, pattern, gap=None):
    """Embedding search over every increasing position tuple."""
    if not pattern:
        return True
    for pos in itertools.combinations(range(len(items)), len(pattern)):
        if any(items[j] != x for j, x in zip(pos, pattern)):
            continue
        if gap is not None:
            lo, hi = gap
            between = [b - a - 1 for a, b in zip(pos, pos[1:])]
            if any(d < lo or (hi is not None and d > hi) for d in between):
                continue
        return True
    return False


def sdb1_model(db, minsup, min_size=1):
    """Hand-built model over every item (no frequent-item presolve)."""
    eos = len(db.alphabet)
    m = Model(eos=eos)
    m.pattern_vars = [m.new_var(range(eos + 1), f"P{i + 1}") for i in range(db.ell)]
    m.support_vars = [m.new_bool(f"S{s.sid}") for s in db.sequences]
    for s, b in zip(db.sequences, m.support_vars):
        post_reified_regular(m, b, m.pattern_vars, build_subsequence_automaton(s))
    post_frequency(m, m.support_vars, minsup)
    post_eos_suffix(m, m.pattern_vars)
    if min_size:
        post_size(m, m.pattern_vars, "min", min_size)
    return m


def collect(model):
    out = []
    stats = solve_all(model, out.append)
    return out, stats


# one PASS/FAIL line per acceptance criterion in the terminal summary
_acceptance: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _acceptance[name] = "PASS" if report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance):
        terminalreporter.write_line(f"{_acceptance[name]}  {name}")
