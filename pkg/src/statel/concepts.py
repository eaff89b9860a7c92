"""Concept syntax and statistical knowledge bases.

Concepts are immutable trees built from ``Top``, ``Name``, ``Not``, ``And``
and ``Exists``.  Disjunction, universal restriction and bottom are not
primitive; the helper constructors expand them through negation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Union

from .errors import BoundsError


class Concept:
    __slots__ = ()

    def __and__(self, other: "Concept") -> "Concept":
        return And(self, other)

    def __invert__(self) -> "Concept":
        return Not(self)

    def __str__(self) -> str:
        from .parser import render_concept

        return render_concept(self)


@dataclass(frozen=True, eq=True, repr=False)
class _TopType(Concept):
    def __repr__(self) -> str:
        return "Top"


Top = _TopType()


@dataclass(frozen=True, repr=False)
class Name(Concept):
    name: str

    def __repr__(self) -> str:
        return f"Name({self.name!r})"


@dataclass(frozen=True, repr=False)
class Not(Concept):
    arg: Concept

    def __repr__(self) -> str:
        return f"Not({self.arg!r})"


@dataclass(frozen=True, repr=False)
class And(Concept):
    left: Concept
    right: Concept

    def __repr__(self) -> str:
        return f"And({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Exists(Concept):
    role: str
    filler: Concept

    def __repr__(self) -> str:
        return f"Exists({self.role!r}, {self.filler!r})"


def Or(left: Concept, right: Concept) -> Concept:
    return Not(And(Not(left), Not(right)))


def Forall(role: str, filler: Concept) -> Concept:
    return Not(Exists(role, Not(filler)))


def Bottom() -> Concept:
    return Not(Top)


def conjunction(parts: Iterable[Concept]) -> Concept:
    """Left-nested conjunction; the empty conjunction is Top."""
    result = None
    for part in parts:
        result = part if result is None else And(result, part)
    return Top if result is None else result


def conjuncts(c: Concept) -> list[Concept]:
    if isinstance(c, And):
        return conjuncts(c.left) + conjuncts(c.right)
    return [c]


def subconcepts(c: Concept) -> Iterator[Concept]:
    yield c
    if isinstance(c, Not):
        yield from subconcepts(c.arg)
    elif isinstance(c, And):
        yield from subconcepts(c.left)
        yield from subconcepts(c.right)
    elif isinstance(c, Exists):
        yield from subconcepts(c.filler)


def is_el(c: Concept) -> bool:
    return not any(isinstance(s, Not) for s in subconcepts(c))


def concept_names(c: Concept) -> set[str]:
    return {s.name for s in subconcepts(c) if isinstance(s, Name)}


def role_names(c: Concept) -> set[str]:
    return {s.role for s in subconcepts(c) if isinstance(s, Exists)}


def to_fraction(value) -> Fraction:
    if isinstance(value, float):
        # floats only reach here from careless callers; go through repr to keep 0.1 == 1/10
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class Signature:
    concepts: frozenset = frozenset()
    roles: frozenset = frozenset()

    def __or__(self, other: "Signature") -> "Signature":
        return Signature(self.concepts | other.concepts, self.roles | other.roles)

    def __and__(self, other: "Signature") -> "Signature":
        return Signature(self.concepts & other.concepts, self.roles & other.roles)

    def __bool__(self) -> bool:
        return bool(self.concepts or self.roles)

    def __le__(self, other: "Signature") -> bool:
        return self.concepts <= other.concepts and self.roles <= other.roles

    @classmethod
    def of(cls, *concepts: Concept) -> "Signature":
        cs: set[str] = set()
        rs: set[str] = set()
        for c in concepts:
            cs |= concept_names(c)
            rs |= role_names(c)
        return cls(frozenset(cs), frozenset(rs))


@dataclass(frozen=True)
class Conditional:
    """``(lhs | rhs)[lower, upper]``: the share of ``rhs`` elements in ``lhs``."""

    lhs: Concept
    rhs: Concept
    lower: Fraction
    upper: Fraction

    def __post_init__(self):
        lo, hi = to_fraction(self.lower), to_fraction(self.upper)
        if not 0 <= lo <= hi <= 1:
            raise BoundsError(f"bounds [{lo}, {hi}] violate 0 <= l <= u <= 1")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def query(self) -> "Query":
        return Query(self.lhs, self.rhs)

    def signature(self) -> Signature:
        return Signature.of(self.lhs, self.rhs)

    def __str__(self) -> str:
        from .parser import render_conditional

        return render_conditional(self)


@dataclass(frozen=True)
class Gci:
    sub: Concept
    sup: Concept

    def signature(self) -> Signature:
        return Signature.of(self.sub, self.sup)

    def __str__(self) -> str:
        from .parser import render_concept

        return f"{render_concept(self.sub)} => {render_concept(self.sup)}"


@dataclass(frozen=True)
class Query:
    lhs: Concept
    rhs: Concept = Top

    def signature(self) -> Signature:
        return Signature.of(self.lhs, self.rhs)

    def __str__(self) -> str:
        from .parser import render_concept

        return f"{render_concept(self.lhs)} | {render_concept(self.rhs)}"


Statement = Union[Gci, Conditional]


@dataclass(frozen=True)
class KnowledgeBase:
    tbox: tuple = ()
    conditionals: tuple = ()
    extra_signature: Signature = field(default=Signature(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "tbox", tuple(self.tbox))
        object.__setattr__(self, "conditionals", tuple(self.conditionals))

    @property
    def signature(self) -> Signature:
        sig = self.extra_signature
        for s in self.statements:
            sig = sig | s.signature()
        return sig

    @property
    def statements(self) -> tuple:
        return self.tbox + self.conditionals

    def is_el(self) -> bool:
        return all(is_el(c) for s in self.statements for c in _sides(s))

    def with_statements(self, tbox=(), conditionals=()) -> "KnowledgeBase":
        return KnowledgeBase(
            self.tbox + tuple(tbox), self.conditionals + tuple(conditionals), self.extra_signature
        )

    def __len__(self) -> int:
        return len(self.tbox) + len(self.conditionals)


def _sides(s: Statement) -> tuple:
    if isinstance(s, Gci):
        return (s.sub, s.sup)
    return (s.lhs, s.rhs)


def signature(x) -> Signature:
    """Concept and role names occurring in a concept, statement or KB."""
    if isinstance(x, Concept):
        return Signature.of(x)
    if isinstance(x, KnowledgeBase):
        return x.signature
    return x.signature()
