"""Finite interpretations, the counting semantics and model combinators."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .concepts import (
    And,
    Concept,
    Conditional,
    Exists,
    Gci,
    KnowledgeBase,
    Name,
    Not,
    Query,
    _TopType,
)
from .errors import DenominatorEmpty, StatelError, TargetOutOfRange


@dataclass(frozen=True)
class Interpretation:
    """A finite interpretation over the domain ``{0, ..., domain_size - 1}``.

    Names missing from ``concepts`` or ``roles`` are read as empty.
    """

    domain_size: int
    concepts: Mapping[str, frozenset] = field(default_factory=dict)
    roles: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        n = self.domain_size
        if n < 1:
            raise StatelError("an interpretation needs a non-empty domain")
        concepts = {a: frozenset(ext) for a, ext in self.concepts.items()}
        roles = {r: frozenset((int(d), int(e)) for d, e in rel) for r, rel in self.roles.items()}
        for a, ext in concepts.items():
            if any(not 0 <= d < n for d in ext):
                raise StatelError(f"extension of {a} leaves the domain")
        for r, rel in roles.items():
            if any(not (0 <= d < n and 0 <= e < n) for d, e in rel):
                raise StatelError(f"role {r} leaves the domain")
        object.__setattr__(self, "concepts", concepts)
        object.__setattr__(self, "roles", roles)

    __hash__ = None  # type: ignore[assignment]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Interpretation):
            return NotImplemented
        return (
            self.domain_size == other.domain_size
            and _nonempty(self.concepts) == _nonempty(other.concepts)
            and _nonempty(self.roles) == _nonempty(other.roles)
        )

    def concept(self, name: str) -> frozenset:
        return self.concepts.get(name, frozenset())

    def role(self, name: str) -> frozenset:
        return self.roles.get(name, frozenset())

    def restrict(self, concepts=None, roles=None) -> "Interpretation":
        """Forget every name outside the given sets."""
        cs = {a: e for a, e in self.concepts.items() if concepts is None or a in concepts}
        rs = {r: e for r, e in self.roles.items() if roles is None or r in roles}
        return Interpretation(self.domain_size, cs, rs)

    def to_json_obj(self) -> dict:
        return {
            "domain": self.domain_size,
            "concepts": {a: sorted(ext) for a, ext in sorted(self.concepts.items())},
            "roles": {r: [list(p) for p in sorted(rel)] for r, rel in sorted(self.roles.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Interpretation":
        return cls(
            int(obj["domain"]),
            {a: frozenset(int(d) for d in ext) for a, ext in obj.get("concepts", {}).items()},
            {r: frozenset((int(d), int(e)) for d, e in rel) for r, rel in obj.get("roles", {}).items()},
        )


def _nonempty(m: Mapping) -> dict:
    return {k: v for k, v in m.items() if v}


def extension(i: Interpretation, c: Concept, _cache: dict | None = None) -> frozenset:
    """The set of domain elements that belong to ``c`` under ``i``."""
    cache = {} if _cache is None else _cache
    hit = cache.get(c)
    if hit is not None:
        return hit
    if isinstance(c, _TopType):
        result = frozenset(range(i.domain_size))
    elif isinstance(c, Name):
        result = i.concept(c.name)
    elif isinstance(c, Not):
        result = frozenset(range(i.domain_size)) - extension(i, c.arg, cache)
    elif isinstance(c, And):
        result = extension(i, c.left, cache) & extension(i, c.right, cache)
    elif isinstance(c, Exists):
        filler = extension(i, c.filler, cache)
        result = frozenset(d for d, e in i.role(c.role) if e in filler)
    else:
        raise TypeError(f"not a concept: {c!r}")
    cache[c] = result
    return result


def count(i: Interpretation, c: Concept) -> int:
    return len(extension(i, c))


def ratio(i: Interpretation, q: Query) -> Fraction | None:
    """``count(C and D) / count(D)``, or None when D is empty."""
    cache: dict = {}
    d = extension(i, q.rhs, cache)
    if not d:
        return None
    return Fraction(len(extension(i, q.lhs, cache) & d), len(d))


def satisfies_conditional(i: Interpretation, k: Conditional) -> bool:
    r = ratio(i, k.query)
    return r is None or k.lower <= r <= k.upper


def satisfies_gci(i: Interpretation, g: Gci) -> bool:
    cache: dict = {}
    return extension(i, g.sub, cache) <= extension(i, g.sup, cache)


def is_model(i: Interpretation, kb: KnowledgeBase) -> bool:
    return all(satisfies_gci(i, g) for g in kb.tbox) and all(
        satisfies_conditional(i, k) for k in kb.conditionals
    )


def n_copy(i: Interpretation, n: int) -> Interpretation:
    """``n`` copies of ``i``; copy ``j`` of element ``d`` is ``j * |domain| + d``.

    Role edges connect every copy of ``d`` with every copy of ``e``, which
    scales every concept count by exactly ``n``.
    """
    if n < 1:
        raise StatelError("n_copy needs n >= 1")
    size = i.domain_size
    offsets = [j * size for j in range(n)]
    concepts = {a: frozenset(o + d for o in offsets for d in ext) for a, ext in i.concepts.items()}
    roles = {
        r: frozenset((o1 + d, o2 + e) for d, e in rel for o1 in offsets for o2 in offsets)
        for r, rel in i.roles.items()
    }
    return Interpretation(size * n, concepts, roles)


def disjoint_union(i0: Interpretation, i1: Interpretation) -> Interpretation:
    shift = i0.domain_size
    concepts = {a: set(ext) for a, ext in i0.concepts.items()}
    for a, ext in i1.concepts.items():
        concepts.setdefault(a, set()).update(shift + d for d in ext)
    roles = {r: set(rel) for r, rel in i0.roles.items()}
    for r, rel in i1.roles.items():
        roles.setdefault(r, set()).update((shift + d, shift + e) for d, e in rel)
    return Interpretation(i0.domain_size + i1.domain_size, concepts, roles)


def mix_models(kb: KnowledgeBase, i0: Interpretation, i1: Interpretation, a: int, b: int) -> Interpretation:
    """``a`` copies of ``i0`` next to ``b`` copies of ``i1``.

    Every conditional ratio of the result is a convex combination of the
    ratios in the two inputs, so models of ``kb`` stay models.
    """
    if a < 1 or b < 1:
        raise StatelError("mix weights must be positive")
    return disjoint_union(n_copy(i0, a), n_copy(i1, b))


def midpoint_model(kb: KnowledgeBase, i0: Interpretation, i1: Interpretation, q: Query) -> Interpretation:
    """A model whose ratio for ``q`` is the mean of the ratios in ``i0`` and ``i1``."""
    d0, d1 = count(i0, q.rhs), count(i1, q.rhs)
    if d0 == 0 or d1 == 0:
        raise DenominatorEmpty(f"{q.rhs} has no instances in one of the models")
    g = math.gcd(d0, d1)
    # equal D-mass on both sides makes the combined ratio the plain average
    return mix_models(kb, i0, i1, d1 // g, d0 // g)


def approach_ratio(
    kb: KnowledgeBase,
    i0: Interpretation,
    i1: Interpretation,
    q: Query,
    x,
    eps,
    max_steps: int | None = None,
) -> tuple[Interpretation, int]:
    """Bisect between two models until the ratio of ``q`` is within ``eps`` of ``x``.

    Returns the model and the number of midpoint steps taken, which never
    exceeds ``ceil(log2(|r1 - r0| / eps))``.
    """
    x, eps = Fraction(x), Fraction(eps)
    if eps <= 0:
        raise StatelError("eps must be positive")
    r0, r1 = ratio(i0, q), ratio(i1, q)
    if r0 is None or r1 is None:
        raise DenominatorEmpty(f"{q.rhs} has no instances in one of the models")
    if r0 > r1:
        i0, i1, r0, r1 = i1, i0, r1, r0
    if not r0 <= x <= r1:
        raise TargetOutOfRange(f"{x} not in [{r0}, {r1}]")
    low, high = i0, i1
    steps = 0
    while True:
        if abs(r0 - x) < eps:
            return low, steps
        if abs(r1 - x) < eps:
            return high, steps
        if max_steps is not None and steps >= max_steps:
            raise StatelError("bisection step limit reached")
        mid = midpoint_model(kb, low, high, q)
        steps += 1
        rm = (r0 + r1) / 2
        if rm == x:
            return mid, steps
        if rm < x:
            low, r0 = mid, rm
        else:
            high, r1 = mid, rm


def bisection_bound(r0, r1, eps) -> int:
    """Upper bound on the number of midpoint steps used by ``approach_ratio``."""
    width = abs(Fraction(r1) - Fraction(r0))
    eps = Fraction(eps)
    steps = 0
    while width > eps:
        width /= 2
        steps += 1
    return steps


def universal_model(kb: KnowledgeBase) -> Interpretation:
    """One element in every concept name, with a self-loop for every role."""
    sig = kb.signature
    return Interpretation(
        1,
        {a: frozenset({0}) for a in sig.concepts},
        {r: frozenset({(0, 0)}) for r in sig.roles},
    )


def product_model(i0: Interpretation, i1: Interpretation) -> Interpretation:
    """Pairs ``(d, e)`` encoded as ``d * |i1| + e``; each side's names act on its own coordinate.

    Every count over the names of ``i0`` is multiplied by ``|i1|`` and vice
    versa, so for KBs over disjoint signatures the product of two models is
    a model of their union with unchanged ratios.
    """
    clash = [a for a in i0.concepts if i0.concept(a) and i1.concept(a)]
    clash += [r for r in i0.roles if i0.role(r) and i1.role(r)]
    if clash:
        raise StatelError(f"product needs disjoint signatures, shared: {sorted(clash)}")
    n0, n1 = i0.domain_size, i1.domain_size
    concepts = {a: frozenset(d * n1 + e for d in ext for e in range(n1)) for a, ext in i0.concepts.items() if ext}
    concepts.update({a: frozenset(d * n1 + e for d in range(n0) for e in ext) for a, ext in i1.concepts.items() if ext})
    roles = {
        r: frozenset((d * n1 + e, d2 * n1 + e) for d, d2 in rel for e in range(n1)) for r, rel in i0.roles.items() if rel
    }
    roles.update(
        {r: frozenset((d * n1 + e, d * n1 + e2) for e, e2 in rel for d in range(n0)) for r, rel in i1.roles.items() if rel}
    )
    return Interpretation(n0 * n1, concepts, roles)
