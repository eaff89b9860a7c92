import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from statel import fixtures
from statel.concepts import And, Exists, Name, Not, Query, Top, concept_names, role_names
from statel.errors import DenominatorEmpty, StatelError, TargetOutOfRange
from statel.model import (
    Interpretation,
    approach_ratio,
    bisection_bound,
    count,
    disjoint_union,
    extension,
    is_model,
    midpoint_model,
    mix_models,
    n_copy,
    product_model,
    ratio,
    universal_model,
)
from statel.parser import parse_kb, parse_query


def member(i, d, c):
    # pointwise definition, independent of the set-based evaluator
    if c is Top:
        return True
    if isinstance(c, Name):
        return d in i.concept(c.name)
    if isinstance(c, Not):
        return not member(i, d, c.arg)
    if isinstance(c, And):
        return member(i, d, c.left) and member(i, d, c.right)
    return any(a == d and member(i, e, c.filler) for a, e in i.role(c.role))


@pytest.mark.parametrize("seed", range(40))
def test_extension_matches_pointwise_definition(seed):
    rng = random.Random(seed)
    i = fixtures.random_interpretation(rng, ["A", "B", "C"], ["r", "s"], max_size=5)
    for _ in range(10):
        c = fixtures.random_concept(rng, ["A", "B", "C"], ["r", "s"], depth=3)
        if rng.random() < 0.3:
            c = Not(c)
        assert extension(i, c) == {d for d in range(i.domain_size) if member(i, d, c)}


def test_flu_witness_from_the_worked_example():
    # 10 of 1000 have flu, 9 of those fever: a model with fever share 9/1000
    kb = fixtures.kb("FLU")
    i = fixtures.flu_witness()
    assert is_model(i, kb)
    assert ratio(i, parse_query("exists has.Fever | top")) == Fraction(9, 1000)


def test_vacuous_conditional():
    i = Interpretation(2, {"A": {0}})
    assert ratio(i, parse_query("A | B")) is None
    assert is_model(i, parse_kb("cond A | B [1/2, 1/2]"))


def test_penguin_models_and_midpoint():
    kb = fixtures.kb("BIRDS")
    i0, i1 = fixtures.penguin_models()
    q = parse_query("P | B")
    assert is_model(i0, kb) and is_model(i1, kb)
    assert (ratio(i0, q), ratio(i1, q)) == (0, Fraction(3, 20))
    m = midpoint_model(kb, i0, i1, q)
    assert is_model(m, kb)
    assert ratio(m, q) == Fraction(3, 40)


def test_midpoint_needs_nonempty_condition():
    kb = parse_kb("")
    with pytest.raises(DenominatorEmpty):
        midpoint_model(kb, Interpretation(1), Interpretation(1, {"B": {0}}), parse_query("A | B"))


def test_approach_ratio_respects_step_bound():
    kb = fixtures.kb("BIRDS")
    i0, i1 = fixtures.penguin_models()
    q = parse_query("P | B")
    eps = Fraction(1, 1000)
    m, steps = approach_ratio(kb, i0, i1, q, Fraction(1, 10), eps)
    assert abs(ratio(m, q) - Fraction(1, 10)) < eps
    assert steps <= bisection_bound(0, Fraction(3, 20), eps)
    assert is_model(m, kb)
    with pytest.raises(TargetOutOfRange):
        approach_ratio(kb, i0, i1, q, Fraction(1, 5), eps)


def test_universal_model_satisfies_open_minded(rng):
    for _ in range(50):
        kb = fixtures.random_el_kb(rng, open_minded=True)
        assert is_model(universal_model(kb), kb)


def test_product_model_keeps_ratios():
    i0 = Interpretation(3, {"A": {0}}, {"r": {(0, 1)}})
    i1 = Interpretation(2, {"B": {1}})
    p = product_model(i0, i1)
    assert p.domain_size == 6
    assert count(p, Exists("r", Top)) == 2 and count(p, Name("B")) == 3
    assert ratio(p, Query(Name("A"))) == Fraction(1, 3)
    with pytest.raises(StatelError):
        product_model(i0, i0)


def test_interpretation_validation():
    with pytest.raises(StatelError):
        Interpretation(0)
    with pytest.raises(StatelError):
        Interpretation(2, {"A": {2}})


small_models = st.builds(
    lambda seed: fixtures.random_interpretation(random.Random(seed), ["A", "B"], ["r"], max_size=4),
    st.integers(0, 10**9),
)
small_concepts = st.builds(
    lambda seed: fixtures.random_concept(random.Random(seed), ["A", "B"], ["r"], depth=3),
    st.integers(0, 10**9),
)


@given(small_models, small_concepts, st.integers(1, 5))
def test_copy_scaling(i, c, n):
    assert count(n_copy(i, n), c) == n * count(i, c)


@given(small_models, small_models, small_concepts)
def test_disjoint_union_adds_counts(i0, i1, c):
    assert count(disjoint_union(i0, i1), c) == count(i0, c) + count(i1, c)


def test_mix_of_models_is_model(rng):
    hits = 0
    for _ in range(300):
        kb = fixtures.random_el_kb(rng, n_names=2, max_gcis=1, max_conds=2)
        sig = kb.signature
        names, roles = sorted(sig.concepts) or ["A"], sorted(sig.roles)
        found = [i for i in (fixtures.random_interpretation(rng, names, roles, 3) for _ in range(30)) if is_model(i, kb)]
        if len(found) >= 2:
            hits += 1
            assert is_model(mix_models(kb, found[0], found[1], rng.randint(1, 3), rng.randint(1, 3)), kb)
    assert hits > 50


def test_signature_helpers():
    c = And(Name("A"), Exists("r", Name("B")))
    assert concept_names(c) == {"A", "B"} and role_names(c) == {"r"}
