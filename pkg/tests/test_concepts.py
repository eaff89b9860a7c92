from fractions import Fraction

import pytest

from statel.concepts import (
    And,
    Bottom,
    Conditional,
    Exists,
    Gci,
    KnowledgeBase,
    Name,
    Not,
    Signature,
    Top,
    conjunction,
    conjuncts,
    is_el,
    signature,
    subconcepts,
    to_fraction,
)
from statel.errors import BoundsError
from statel.model import Interpretation, extension

A, B = Name("A"), Name("B")


def test_conjunction_helpers():
    c = conjunction([A, B, Exists("r", A)])
    assert conjuncts(c) == [A, B, Exists("r", A)]
    assert conjunction([]) == Top
    assert set(subconcepts(Exists("r", And(A, B)))) >= {A, B, And(A, B)}


def test_el_fragment():
    assert is_el(And(A, Exists("r", Top)))
    assert not is_el(Not(A))


def test_bottom_is_empty():
    assert extension(Interpretation(3, {"A": {0, 1}}), Bottom()) == frozenset()


def test_bounds_become_fractions():
    k = Conditional(A, Top, 0.1, "1/2")
    assert (k.lower, k.upper) == (Fraction(1, 10), Fraction(1, 2))
    assert to_fraction(0.95) == Fraction(19, 20)
    with pytest.raises(BoundsError):
        Conditional(A, Top, Fraction(3, 4), Fraction(1, 2))


def test_signatures():
    kb = KnowledgeBase((Gci(A, Exists("r", B)),), (Conditional(B, Top, 0, 1),))
    assert kb.signature == Signature(frozenset({"A", "B"}), frozenset({"r"}))
    assert signature(Exists("s", A)) == Signature(frozenset({"A"}), frozenset({"s"}))
    assert Signature.of(A) <= kb.signature and not Signature()
    more = kb.with_statements(conditionals=[Conditional(Name("C"), A, 0, 1)])
    assert len(more) == 3 and "C" in more.signature.concepts
