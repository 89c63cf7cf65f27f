import itertools
import random

import pytest

from conftest import collect, sdb1_model, tok
from cpseqmine.automata import EOS, accepts, build_subsequence_automaton
from cpseqmine.constraints import (
    FALSE,
    TRUE,
    post_among,
    post_eos_suffix,
    post_forbid,
    post_frequency,
    post_reified_regular,
    post_regular,
)
from cpseqmine.miner import ItemConstraint, MiningQuery, SizeConstraint, mine_frequent
from cpseqmine.seqdb import GapSpec
from cpseqmine.solver import Model, propagate, solve_all


def _vars(m, n, values):
    return [m.new_var(values, f"P{i + 1}") for i in range(n)]


def _as_model_word(word, eos):
    return tuple(EOS if x == eos else x for x in word)


def _enumerate(model):
    sols, _ = collect(model)
    return {s.pattern for s in sols}


def _assignments(model, vars_):
    """Full assignments of ``vars_`` reachable by search, EOS kept."""
    out = set()
    model.pattern_vars = list(vars_)

    def record(_sol):
        out.add(tuple(model.value(v) for v in vars_))

    solve_all(model, record)
    return out


# reified Regular


def test_reified_regular_true_filters_domains(sdb1):
    eos = len(sdb1.alphabet)
    m = Model(eos=eos)
    P = _vars(m, 5, range(eos + 1))
    b = m.new_bool()
    post_reified_regular(m, b, P, build_subsequence_automaton(sdb1.sequences[2]))
    post_eos_suffix(m, P)
    assert m.assign(b, 1)
    assert propagate(m)
    # <a b d c> has no 'e' and a pattern has at most 4 items
    assert sdb1.alphabet["e"] not in m.values(P[0])
    assert m.values(P[4]) == [eos]


def test_reified_regular_detects_disentailment(sdb1):
    eos = len(sdb1.alphabet)
    m = Model(eos=eos)
    P = _vars(m, 5, range(eos + 1))
    b = m.new_bool()
    post_reified_regular(m, b, P, build_subsequence_automaton(sdb1.sequences[2]))
    assert m.assign(P[0], sdb1.alphabet["c"]) and m.assign(P[1], sdb1.alphabet["a"])
    assert propagate(m)
    assert m.domains[b] == FALSE


def test_reified_regular_false_rejects_accepted_word(sdb1):
    eos = len(sdb1.alphabet)
    m = Model(eos=eos)
    P = _vars(m, 5, range(eos + 1))
    b = m.new_bool()
    post_reified_regular(m, b, P, build_subsequence_automaton(sdb1.sequences[2]))
    assert m.assign(b, 0)
    for v, x in zip(P, tok(sdb1, "a d c") + (eos, eos)):
        assert m.assign(v, x)
    assert not propagate(m)


def test_reified_regular_entailed_on_full_assignment(sdb1):
    eos = len(sdb1.alphabet)
    m = Model(eos=eos)
    P = _vars(m, 5, range(eos + 1))
    b = m.new_bool()
    post_reified_regular(m, b, P, build_subsequence_automaton(sdb1.sequences[2]))
    for v, x in zip(P, tok(sdb1, "a d c") + (eos, eos)):
        assert m.assign(v, x)
    assert propagate(m)
    assert m.domains[b] == TRUE


# frequency


def test_frequency_pins_remaining_supports():
    m = Model(eos=0)
    S = [m.new_bool() for _ in range(4)]
    post_frequency(m, S, 2)
    assert m.assign(S[0], 0) and m.assign(S[1], 0)
    assert propagate(m)
    assert m.domains[S[2]] == TRUE and m.domains[S[3]] == TRUE


def test_frequency_above_database_size_fails(sdb1):
    m = sdb1_model(sdb1, 5)
    assert not propagate(m)


def test_frequency_never_prunes_when_slack():
    m = Model(eos=0)
    S = [m.new_bool() for _ in range(4)]
    post_frequency(m, S, 2)
    assert m.assign(S[0], 0)
    assert propagate(m)
    assert all(m.domains[s] == 0b11 for s in S[1:])


# among


def test_among_exactly_one_a(sdb1):
    q = MiningQuery(minsup=2, items=(ItemConstraint.include("a", low=1, high=1),))
    got = {" ".join(sdb1.decode(r.pattern)) for r in mine_frequent(sdb1, q)}
    assert got == {"a", "a b", "a c", "a d", "c a", "d a", "a b c", "a b d"}


def test_among_rejects_eos():
    m = Model(eos=2)
    P = _vars(m, 2, range(3))
    with pytest.raises(ValueError):
        post_among(m, P, {0, 2}, 0, 1)


def test_among_bounds_propagate():
    m = Model(eos=3)
    P = _vars(m, 3, range(4))
    post_among(m, P, {0}, 2, 2)
    assert m.assign(P[0], 1)
    assert propagate(m)
    assert m.values(P[1]) == [0] and m.values(P[2]) == [0]


@pytest.mark.parametrize("seed", range(6))
def test_among_matches_enumeration(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 5)
    k = 3
    values = set(rng.sample(range(k), rng.randint(1, 2)))
    low = rng.randint(0, n)
    high = rng.randint(low, n)
    m = Model(eos=k)
    P = _vars(m, n, range(k + 1))
    post_among(m, P, values, low, high)
    got = _assignments(m, P)
    expected = {
        w for w in itertools.product(range(k + 1), repeat=n) if low <= sum(x in values for x in w) <= high
    }
    assert got == expected


# size


def _sizes(sdb1, kind, k):
    q = MiningQuery(minsup=2, sizes=(SizeConstraint(kind, k),))
    return {" ".join(sdb1.decode(r.pattern)) for r in mine_frequent(sdb1, q)}


def test_size_examples(sdb1):
    assert _sizes(sdb1, "min", 3) == {"a b c", "a b d"}
    assert _sizes(sdb1, "exact", 0) == set()
    assert _sizes(sdb1, "max", 1) == {"a", "b", "c", "d"}
    assert _sizes(sdb1, "exact", 2) == {"a b", "a c", "a d", "b c", "b d", "c a", "d a"}


def test_size_longer_than_ell_is_empty(sdb1):
    assert _sizes(sdb1, "min", 6) == set()
    assert _sizes(sdb1, "exact", 9) == set()


# EOS suffix


def test_eos_suffix_forward():
    m = Model(eos=2)
    P = _vars(m, 5, range(3))
    post_eos_suffix(m, P)
    assert m.assign(P[1], 2)
    assert propagate(m)
    assert all(m.values(v) == [2] for v in P[2:])
    assert m.values(P[0]) == [0, 1, 2]


def test_eos_suffix_contrapositive():
    m = Model(eos=2)
    P = _vars(m, 5, range(3))
    post_eos_suffix(m, P)
    assert m.remove(P[3], 2)
    assert propagate(m)
    assert all(m.values(v) == [0, 1] for v in P[:4])
    assert m.values(P[4]) == [0, 1, 2]


def test_eos_suffix_conflict():
    m = Model(eos=2)
    P = _vars(m, 3, range(3))
    post_eos_suffix(m, P)
    assert m.assign(P[0], 2) and m.assign(P[2], 0)
    assert not propagate(m)


# forbid


def test_forbid_one_pattern(sdb1):
    m = sdb1_model(sdb1, 2)
    post_forbid(m, m.pattern_vars, tok(sdb1, "a b c"))
    got = _enumerate(m)
    assert len(got) == 12 and tok(sdb1, "a b c") not in got


def test_forbid_every_frequent_pattern(sdb1):
    m = sdb1_model(sdb1, 2)
    for p in _enumerate(sdb1_model(sdb1, 2)):
        post_forbid(m, m.pattern_vars, p)
    assert _enumerate(m) == set()


def test_forbid_prunes_last_open_variable():
    m = Model(eos=3)
    P = _vars(m, 3, range(4))
    post_forbid(m, P, (0, 1, 2))
    assert m.assign(P[0], 0) and m.assign(P[2], 2)
    assert propagate(m)
    assert m.values(P[1]) == [0, 2, 3]


def test_forbid_pattern_too_long():
    m = Model(eos=3)
    P = _vars(m, 2, range(4))
    with pytest.raises(ValueError):
        post_forbid(m, P, (0, 1, 2))


# exhaustive Regular checks on random automata and domains


def _random_regular_case(rng):
    k = 3
    s = [rng.randrange(k) for _ in range(rng.randint(0, 5))]
    n = rng.randint(1, 4)
    gap = None
    if rng.random() < 0.5:
        lo = rng.randint(0, 2)
        gap = GapSpec(lo, rng.choice([None, lo, lo + 1]))
    automaton = build_subsequence_automaton(s, gap=gap)
    doms = [rng.sample(range(k + 1), rng.randint(1, k + 1)) for _ in range(n)]
    return k, automaton, doms


@pytest.mark.parametrize("seed", range(40))
def test_regular_filtering_is_sound_and_complete(seed):
    rng = random.Random(seed)
    k, automaton, doms = _random_regular_case(rng)
    m = Model(eos=k)
    P = [m.new_var(d) for d in doms]
    post_regular(m, P, automaton)
    words = [w for w in itertools.product(*doms) if accepts(automaton, _as_model_word(w, k))]
    ok = propagate(m)
    assert ok == bool(words)
    if ok:
        # generalized arc consistency: a value stays iff some accepted word uses it
        for i, v in enumerate(P):
            assert set(m.values(v)) == {w[i] for w in words}


@pytest.mark.parametrize("seed", range(40))
def test_reification_coherent_on_full_assignments(seed):
    rng = random.Random(100 + seed)
    k, automaton, doms = _random_regular_case(rng)
    word = tuple(rng.choice(d) for d in doms)
    m = Model(eos=k)
    P = [m.new_var(d) for d in doms]
    b = m.new_bool()
    post_reified_regular(m, b, P, automaton)
    for v, x in zip(P, word):
        assert m.assign(v, x)
    assert propagate(m)
    assert m.value(b) == int(accepts(automaton, _as_model_word(word, k)))
