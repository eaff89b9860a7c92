import random
from fractions import Fraction

import pytest

from statel import fixtures
from statel.errors import CapacityExceeded
from statel.lp import feasible
from statel.model import Interpretation, extension, is_model
from statel.normalize import normalize
from statel.reasoner import some_program_feasible
from statel.typespace import TOP_VAR, TypeSpace, TypeVar, base_program, base_rows, choice_sets, enumerate_types, programs


def count_vector(space, i):
    """Type counts of ``i`` extended by the fresh names' meanings."""
    concepts = dict(i.concepts)
    for name, meaning in space.nkb.provenance.items():
        concepts[name] = extension(Interpretation(i.domain_size, concepts, i.roles), meaning)
    point = {v: 0 for v in space.vars}
    for d in range(i.domain_size):
        t = sum(space.bit[a] for a in space.names if d in concepts.get(a, ()))
        if TypeVar(t) not in point:
            return None  # element of a pruned type
        point[TypeVar(t)] += 1
    point[TOP_VAR] = i.domain_size
    return point


def test_pruned_types_are_exactly_the_consistent_masks(rng):
    for _ in range(60):
        nkb = normalize(fixtures.random_el_kb(rng, n_names=4, max_gcis=4))
        space = TypeSpace(nkb, prune=False)
        expected = [t for t in space.types if not space.violates(t)]
        assert enumerate_types(nkb) == expected


def test_type_limit():
    nkb = normalize(fixtures.kb("BIRDS"))
    with pytest.raises(CapacityExceeded):
        TypeSpace(nkb, limit=2)


def test_sum_of_top_is_domain_variable():
    space = TypeSpace(normalize(fixtures.kb("BIRDS")))
    assert space.sum_of() == {TOP_VAR: 1}
    assert len(space.sum_of("B")) == len(space.types) // 2


def test_birds_rows():
    space = TypeSpace(normalize(fixtures.kb("BIRDS")))
    rows = base_rows(space)
    # domain row, 2 + 2 ratio rows for B and F|B, one for F|P, and |domain| >= 1
    assert len(rows) == 1 + 4 + 1 + 1


@pytest.mark.parametrize("seed", range(30))
def test_models_satisfy_some_program(seed):
    rng = random.Random(seed)
    kb = fixtures.random_el_kb(rng, n_names=2, max_gcis=2, max_conds=2)
    nkb = normalize(kb)
    space = TypeSpace(nkb)
    systems = list(programs(space))
    base = base_program(nkb)
    for _ in range(60):
        i = fixtures.random_interpretation(rng, ["A", "B"], ["r"], max_size=3)
        if not is_model(i, kb):
            continue
        point = count_vector(space, i)
        assert point is not None
        assert base.holds(point)
        assert any(s.holds(point) for s in systems)


def test_choice_sets_for_flu():
    space = TypeSpace(normalize(fixtures.kb("FLU")))
    kinds = sorted(s.origin[0] for s in choice_sets(space))
    # four same-role pairs; the two pairs of a definition with itself give identical sets
    assert kinds.count("E") == 2 and kinds.count("F") == 3


def test_programs_are_necessary_for_consistency():
    # consistent KBs always have a feasible program
    for name in ("FLU", "BIRDS", "RELATED_WORK", "ROLES"):
        assert some_program_feasible(fixtures.kb(name))
    assert not some_program_feasible(fixtures.kb("K1"))


def test_base_program_feasible_for_birds():
    out = feasible(base_program(normalize(fixtures.kb("BIRDS"))))
    assert out.is_feasible and out.point[TOP_VAR] >= 1
