import random
from fractions import Fraction

import pytest

from statel import fixtures
from statel.concepts import Conditional, Name, Query, Top
from statel.errors import KbInconsistent
from statel.lp import LinearConstraint, LinearSystem, optimize
from statel.model import is_model, ratio
from statel.oracle import NoModelUpTo, Witness, oracle_consistent, role_free_ratios
from statel.parser import parse_conditional, parse_kb, parse_query
from statel.reasoner import (
    Consistent,
    Entailed,
    Inconsistent,
    IntervalResult,
    NotEntailed,
    QueryInfeasible,
    charnes_cooper,
    check_consistency,
    l_entails,
    p_entail,
    some_program_feasible,
)


def test_flu_consistent_with_checked_witness():
    kb = fixtures.kb("FLU")
    result = check_consistency(kb)
    assert isinstance(result, Consistent) and is_model(result.witness, kb)


def test_rare_fever_contradicts_flu():
    kb = parse_kb(fixtures.FLU + "cond exists has.Fever | top [0, 1/200]\n")
    assert isinstance(check_consistency(kb), Inconsistent)


def test_flu_fever_share():
    kb = fixtures.kb("FLU")
    assert isinstance(l_entails(kb, parse_conditional("exists has.Fever | top [9/1000, 1]")), Entailed)
    res = l_entails(kb, parse_conditional("exists has.Fever | top [1/100, 1]"))
    assert isinstance(res, NotEntailed)
    assert is_model(res.counter_witness, kb)
    assert ratio(res.counter_witness, parse_query("exists has.Fever | top")) < Fraction(1, 100)


def test_fever_share_bounds_are_tight():
    # 9/10 of at least 1/100 of the domain; the smallest share is attained
    res = p_entail(fixtures.kb("FLU"), parse_query("exists has.Fever | top"))
    assert res.interval.lo == Fraction(9, 1000) and res.interval.lo_attained
    assert ratio(res.lo_witness, parse_query("exists has.Fever | top")) == Fraction(9, 1000)


def test_birds_interval():
    kb = fixtures.kb("BIRDS")
    res = p_entail(kb, parse_query("P | B"))
    assert (res.interval.lo, res.interval.hi) == (0, Fraction(3, 20))
    assert res.interval.lo_attained and res.interval.hi_attained
    for w, value in ((res.lo_witness, 0), (res.hi_witness, Fraction(3, 20))):
        assert is_model(w, kb) and ratio(w, parse_query("P | B")) == value


def test_continuity_pair():
    assert isinstance(check_consistency(fixtures.kb("CONTINUITY")), Consistent)
    assert p_entail(fixtures.kb("CONTINUITY"), parse_query("A | top")).interval.hi == 1
    iv = p_entail(fixtures.kb("CONTINUITY_TIGHT"), parse_query("A | top")).interval
    assert (iv.lo, iv.hi) == (0, 0)


def test_k1():
    kb = fixtures.kb("K1")
    assert isinstance(check_consistency(kb), Inconsistent)
    assert isinstance(l_entails(kb, parse_conditional("top | top [0, 0]")), Entailed)
    with pytest.raises(KbInconsistent):
        p_entail(kb, parse_query("A | top"))


def test_related_work():
    kb = fixtures.kb("RELATED_WORK")
    assert isinstance(check_consistency(kb), Consistent)
    assert isinstance(l_entails(kb, parse_conditional("C | top [1, 1]")), Entailed)


def test_query_infeasible():
    kb = parse_kb("cond A | top [0, 0]")
    assert isinstance(p_entail(kb, parse_query("B | A")), QueryInfeasible)


def test_interacting_existentials_need_more_than_programs():
    """Each existential can be met on its own, which satisfies some program.

    Every element needs an r-successor in B; half of the B's are C1, the other
    half C2, and none is both.  Any B-successor is C1 or C2, so every element
    is D, yet D must be empty.
    """
    kb = fixtures.kb("INTERACTING_EXISTENTIALS")
    assert isinstance(check_consistency(kb), Inconsistent)
    assert some_program_feasible(kb)
    # small models agree with the solver
    assert isinstance(oracle_consistent(kb, 2, budget=2**26), NoModelUpTo)


def test_charnes_cooper_on_a_small_ratio():
    # max x / (x + y) subject to x <= 2, y >= 1
    sys = LinearSystem(["x", "y"], [LinearConstraint({"x": 1}, "<=", 2), LinearConstraint({"y": 1}, ">=", 1)])
    out = optimize(charnes_cooper(sys, {"x": 1}, {"x": 1, "y": 1}, "max"))
    assert out.value == Fraction(2, 3)


@pytest.mark.parametrize("seed", range(80))
def test_consistency_agrees_with_small_models(seed):
    rng = random.Random(seed)
    kb = fixtures.random_el_kb(rng, n_names=2, max_gcis=2, max_conds=2)
    result = check_consistency(kb)
    oracle = oracle_consistent(kb, 3, budget=2**26)
    if isinstance(oracle, Witness):
        assert isinstance(result, Consistent)
    if isinstance(result, Consistent):
        assert is_model(result.witness, kb)
        if result.witness.domain_size <= 3:
            assert isinstance(oracle, Witness)


@pytest.mark.parametrize("seed", range(60))
def test_role_free_intervals_contain_all_small_ratios(seed):
    rng = random.Random(seed)
    kb = fixtures.random_el_kb(rng, n_names=3, n_roles=0, max_gcis=2, max_conds=3)
    q = Query(Name("A"), rng.choice([Top, Name("B")]))
    seen = role_free_ratios(kb, q, 20)
    try:
        res = p_entail(kb, q)
    except KbInconsistent:
        assert not seen.values and isinstance(oracle_consistent(kb, 3), NoModelUpTo)
        return
    if isinstance(res, QueryInfeasible):
        assert not seen.values
        return
    iv = res.interval
    assert all(iv.lo <= r <= iv.hi for r in seen.values)
    if iv.lo_attained:
        assert is_model(res.lo_witness, kb) and ratio(res.lo_witness, q) == iv.lo
    if iv.hi_attained:
        assert is_model(res.hi_witness, kb) and ratio(res.hi_witness, q) == iv.hi


@pytest.mark.parametrize("seed", range(60))
def test_entailment_matches_interval(seed):
    rng = random.Random(seed)
    kb = fixtures.random_el_kb(rng, n_names=3, max_gcis=2, max_conds=3)
    q = Query(Name("A"), rng.choice([Top, Name("B")]))
    lo, hi = fixtures.random_bounds(rng)
    k = Conditional(q.lhs, q.rhs, lo, hi)
    res = l_entails(kb, k)
    try:
        pe = p_entail(kb, q)
    except KbInconsistent:
        assert isinstance(res, Entailed)
        return
    if isinstance(pe, QueryInfeasible):
        assert isinstance(res, Entailed)
        return
    iv = pe.interval
    # model ratios fill the interval, so an open end still approaches the bound
    assert isinstance(res, Entailed) == (lo <= iv.lo and iv.hi <= hi)
    if isinstance(res, NotEntailed):
        assert is_model(res.counter_witness, kb)
        r = ratio(res.counter_witness, q)
        assert r is not None and not lo <= r <= hi and iv.lo <= r <= iv.hi


@pytest.mark.parametrize("seed", range(40))
def test_independence_gives_the_same_answers(seed):
    rng = random.Random(seed)
    kb = fixtures.random_el_kb(rng, n_names=4, n_roles=2, max_gcis=3, max_conds=3, depth=1)
    k = Conditional(Name("A"), Top, *fixtures.random_bounds(rng))
    plain, split = l_entails(kb, k), l_entails(kb, k, independence=True)
    assert type(plain) is type(split)
    if isinstance(split, NotEntailed):
        assert is_model(split.counter_witness, kb)
    q = k.query
    try:
        a = p_entail(kb, q)
    except KbInconsistent:
        with pytest.raises(KbInconsistent):
            p_entail(kb, q, independence=True)
        return
    b = p_entail(kb, q, independence=True)
    assert a.interval == b.interval
    for w in (b.lo_witness, b.hi_witness):
        assert w is None or is_model(w, kb)
