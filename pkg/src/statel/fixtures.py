"""Worked example KBs, hand-built models and random KB generators."""

from __future__ import annotations

import random
from fractions import Fraction

from .concepts import And, Conditional, Exists, Gci, KnowledgeBase, Name, Top
from .model import Interpretation
from .parser import parse_kb

FLU = """\
# 90 to 95 percent of patients with flu have fever; 1 to 3 percent have flu
cond exists has.Fever | exists has.Flu [0.9, 0.95]
cond exists has.Flu | top [0.01, 0.03]
"""

BIRDS = """\
cond B | top [1/2, 3/5]
cond F | B [17/20, 9/10]
cond F | P [0, 0]
"""

K1 = """\
cond A | top [0, 1/5]
cond A | top [3/10, 1]
"""

RELATED_WORK = """\
gci top => exists r.A
gci exists r.B => C
cond B | top [1/2, 1]
cond A | B [1/2, 1]
cond A | top [0, 1/4]
"""

CONTINUITY = """\
cond B | A [2/5, 1/2]
cond C | A [1/2, 3/5]
cond B | C [1, 1]
cond C | B [1, 1]
"""

CONTINUITY_TIGHT = """\
cond B | A [2/5, 49/100]
cond C | A [1/2, 3/5]
cond B | C [1, 1]
cond C | B [1, 1]
"""

ROLES = """\
gci top => exists r.A
"""

# three existentials that each look satisfiable on their own
INTERACTING_EXISTENTIALS = """\
gci top => exists r.B
gci exists r.C1 => D
gci exists r.C2 => D
cond C1 | B [1/2, 1/2]
cond C2 | B [1/2, 1/2]
cond C1 and C2 | B [0, 0]
cond D | top [0, 0]
"""

# the rule-based lower bound for B is 0, yet every model has |B| >= n/4
NECESSITY_GAP = """\
gci A1 and A2 => B
cond A1 | top [1/2, 1]
cond A2 | A1 [1/2, 1]
"""


def kb(name: str) -> KnowledgeBase:
    return parse_kb(globals()[name])


def flu_witness(with_fever: int = 9, with_flu: int = 10, size: int = 1000) -> Interpretation:
    """Element 0 is a flu case ``f``, element 1 a fever case ``v``.

    Elements ``2 .. with_flu + 1`` have a ``has`` edge to ``f`` and the first
    ``with_fever`` of them also one to ``v``.
    """
    patients = range(2, 2 + with_flu)
    edges = {(p, 0) for p in patients} | {(p, 1) for p in list(patients)[:with_fever]}
    return Interpretation(size, {"Flu": {0}, "Fever": {1}}, {"has": edges})


def penguin_models() -> tuple[Interpretation, Interpretation]:
    """200 individuals, 100 birds, 85 flying birds; then the 15 non-flyers become penguins."""
    birds = set(range(100))
    flying = set(range(85))
    i0 = Interpretation(200, {"B": birds, "F": flying, "P": set()})
    i1 = Interpretation(200, {"B": birds, "F": flying, "P": birds - flying})
    return i0, i1


# --------------------------------------------------------------- random KBs

GRID = tuple(sorted({Fraction(p, q) for q in (1, 2, 3, 4, 5) for p in range(q + 1)}))


def random_concept(rng: random.Random, names, roles, depth: int = 2):
    roll = rng.random()
    if depth <= 0 or roll < 0.5:
        return Name(rng.choice(names)) if rng.random() < 0.9 else Top
    if roll < 0.75 or not roles:
        return And(random_concept(rng, names, roles, depth - 1), random_concept(rng, names, roles, depth - 1))
    return Exists(rng.choice(roles), random_concept(rng, names, roles, depth - 1))


def random_bounds(rng: random.Random, open_minded: bool = False):
    lo = rng.choice(GRID)
    if open_minded:
        return lo, Fraction(1)
    hi = rng.choice([x for x in GRID if x >= lo])
    return lo, hi


def random_el_kb(
    rng: random.Random,
    n_names: int = 3,
    n_roles: int = 1,
    max_gcis: int = 2,
    max_conds: int = 3,
    open_minded: bool = False,
    depth: int = 2,
) -> KnowledgeBase:
    names = [chr(ord("A") + k) for k in range(n_names)]
    roles = ["r", "s"][:n_roles]
    tbox = [
        Gci(random_concept(rng, names, roles, depth), random_concept(rng, names, roles, depth))
        for _ in range(rng.randint(0, max_gcis))
    ]
    conds = []
    for _ in range(rng.randint(0, max_conds)):
        lo, hi = random_bounds(rng, open_minded)
        rhs = Top if rng.random() < 0.4 else random_concept(rng, names, roles, depth - 1)
        conds.append(Conditional(random_concept(rng, names, roles, depth - 1), rhs, lo, hi))
    return KnowledgeBase(tuple(tbox), tuple(conds))


def random_interpretation(rng: random.Random, names, roles, max_size: int = 4) -> Interpretation:
    n = rng.randint(1, max_size)
    concepts = {a: {d for d in range(n) if rng.random() < 0.5} for a in names}
    rels = {r: {(d, e) for d in range(n) for e in range(n) if rng.random() < 0.3} for r in roles}
    return Interpretation(n, concepts, rels)
