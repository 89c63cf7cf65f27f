import random

import pytest

from conftest import collect, sdb1_model, tok
from cpseqmine.miner import build_model
from cpseqmine.solver import (
    Model,
    SolverError,
    bits,
    mask_of,
    propagate,
    solve_all,
    solve_minimize,
)
from randinst import exhaustive_patterns, random_db, random_query

SDB1_FREQUENT = {"a", "b", "c", "d", "a b", "a c", "a d", "b c", "b d", "c a", "d a", "a b c", "a b d"}


def decoded(db, sols):
    return [" ".join(db.decode(s.pattern)) for s in sols]


def test_bit_helpers():
    assert list(bits(0b10110)) == [1, 2, 4]
    assert mask_of([0, 3]) == 0b1001


def test_assigning_infrequent_item_fails(sdb1):
    m = sdb1_model(sdb1, 2)
    assert propagate(m)
    m.push()
    assert m.assign(m.pattern_vars[0], sdb1.alphabet["e"])
    assert not m.propagate()


def test_minsup_zero_prunes_nothing(sdb1):
    m = sdb1_model(sdb1, 0, min_size=0)
    assert propagate(m)
    assert all(m.domains[s] == 0b11 for s in m.support_vars)


def test_full_assignment_fixes_supports(sdb1):
    m = sdb1_model(sdb1, 0, min_size=0)
    assert propagate(m)
    m.push()
    eos = len(sdb1.alphabet)
    for var, v in zip(m.pattern_vars, tok(sdb1, "b c") + (eos,) * 3):
        assert m.assign(var, v)
    assert m.propagate()
    assert [m.value(s) for s in m.support_vars] == [1, 0, 1, 0]


def test_propagate_idempotent(sdb1):
    m = sdb1_model(sdb1, 2)
    assert propagate(m)
    before = list(m.domains)
    assert propagate(m)
    assert m.domains == before


def test_solve_all_sdb1(sdb1):
    sols, stats = collect(sdb1_model(sdb1, 2))
    assert set(decoded(sdb1, sols)) == SDB1_FREQUENT
    assert len(sols) == 13 == stats.solutions
    assert stats.nodes >= stats.fails


def test_solve_all_unsatisfiable_threshold(sdb1):
    sols, stats = collect(sdb1_model(sdb1, 5))
    assert sols == [] and stats.solutions == 0


def test_solve_all_single_sequence():
    from cpseqmine.seqdb import parse

    db = parse("a")
    sols, _ = collect(sdb1_model(db, 1))
    assert decoded(db, sols) == ["a"]


def test_solve_all_order_is_dfs_with_eos_last(sdb1):
    sols, _ = collect(sdb1_model(sdb1, 2))
    assert decoded(sdb1, sols)[:4] == ["a b c", "a b d", "a b", "a c"]


def test_solve_all_rejects_objective(sdb1):
    m = sdb1_model(sdb1, 2)
    m.minimize_eos_count()
    with pytest.raises(ValueError):
        solve_all(m, print)


def test_solve_minimize_minsup2(sdb1):
    m = sdb1_model(sdb1, 2)
    m.minimize_eos_count()
    sol = solve_minimize(m)
    assert sol.objective_value == sdb1.ell - 3 == 2
    assert " ".join(sdb1.decode(sol.pattern)) in {"a b c", "a b d"}


def test_solve_minimize_minsup4(sdb1):
    m = sdb1_model(sdb1, 4)
    m.minimize_eos_count()
    sol = solve_minimize(m)
    assert sol.objective_value == 4
    assert sdb1.decode(sol.pattern) == ("a",)


def test_solve_minimize_unsatisfiable(sdb1):
    m = sdb1_model(sdb1, 5)
    m.minimize_eos_count()
    assert solve_minimize(m) is None


def test_model_state_restored_after_search(sdb1):
    m = sdb1_model(sdb1, 2)
    before = list(m.domains)
    collect(m)
    assert m.domains == before
    again, _ = collect(m)
    assert len(again) == 13


def test_unfixed_support_is_an_error():
    m = Model(eos=1)
    m.pattern_vars = [m.new_var([0, 1])]
    m.support_vars = [m.new_bool()]
    with pytest.raises(SolverError):
        solve_all(m, print)


# randomized micro-properties


def _random_models(n, seed):
    rng = random.Random(seed)
    done = 0
    while done < n:
        db = random_db(rng, max_seqs=5, max_len=4, max_alpha=3)
        q = random_query(rng, db, closed=False)
        if db.ell == 0:
            continue
        done += 1
        yield db, q


def test_completeness_against_exhaustive_assignments():
    for db, q in _random_models(60, 11):
        built = build_model(db, q)
        sols, _ = collect(built.model)
        patterns = [s.pattern for s in sols]
        assert len(patterns) == len(set(patterns)), "duplicate emission"
        assert set(patterns) == exhaustive_patterns(db, q), (db.sequences, q)


def test_backtracking_restores_domains_exactly():
    for db, q in _random_models(40, 12):
        built = build_model(db, q, check_restore=True)
        collect(built.model)  # raises SolverError on any mismatch


def test_branch_and_bound_optimum():
    for db, q in _random_models(100, 13):
        model = build_model(db, q).model
        sols, _ = collect(model)
        model.minimize_eos_count()
        best = solve_minimize(model)
        if not sols:
            assert best is None
            continue
        ell = len(model.pattern_vars)
        assert best.objective_value == min(ell - len(s.pattern) for s in sols)


def test_propagation_idempotent_on_random_models():
    for db, q in _random_models(60, 14):
        m = build_model(db, q).model
        if propagate(m):
            before = list(m.domains)
            assert propagate(m)
            assert m.domains == before
