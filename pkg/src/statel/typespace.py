"""Types over the names of a normalized KB and the linear systems built on them.

A type is a set of concept names, stored as a bitmask over ``TypeSpace.names``;
top belongs to every type.  Each type gets a nonnegative variable counting its
elements, and ``TOP_VAR`` counts the whole domain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import CapacityExceeded
from .lp import (
    LinearConstraint,
    LinearSystem,
    ScaleClass,
    at_least,
    homogeneous,
)
from .normalize import TOP, NormalKb

DEFAULT_TYPE_LIMIT = 24
DEFAULT_CHOICE_LIMIT = 20


@dataclass(frozen=True, order=True)
class TypeVar:
    mask: int

    def __repr__(self) -> str:
        return f"x{self.mask}"


@dataclass(frozen=True)
class _TopVar:
    def __repr__(self) -> str:
        return "x_top"


TOP_VAR = _TopVar()


class TypeSpace:
    """The admissible types of a normal-form KB, with helpers for type sums."""

    def __init__(self, nkb: NormalKb, prune: bool = True, limit: int = DEFAULT_TYPE_LIMIT):
        self.nkb = nkb
        self.names = nkb.names
        if len(self.names) > limit:
            raise CapacityExceeded(f"{len(self.names)} concept names exceed the type limit {limit}")
        self.bit = {a: 1 << k for k, a in enumerate(self.names)}
        self.prune = prune
        self.types = enumerate_types(nkb, prune=prune, limit=limit, _names=self.names)
        self.vars = [TypeVar(t) for t in self.types]

    def has(self, t: int, name: str) -> bool:
        return name == TOP or bool(t & self.bit[name])

    def members(self, t: int) -> list[str]:
        return [a for a in self.names if t & self.bit[a]]

    def violates(self, t: int) -> bool:
        return any(self.has(t, a1) and self.has(t, a2) and not self.has(t, b) for a1, a2, b in self.nkb.conj_gcis)

    def sum_where(self, pred) -> dict:
        return {TypeVar(t): Fraction(1) for t in self.types if pred(t)}

    def sum_of(self, *names: str) -> dict:
        """Coefficients of the sum over types containing every name given."""
        if all(a == TOP for a in names):
            return {TOP_VAR: Fraction(1)}
        return self.sum_where(lambda t: all(self.has(t, a) for a in names))

    def ratio_row(self, a: str, b: str, bound: Fraction, relation: str, rhs=0) -> LinearConstraint:
        """``q * sum(A and B) - p * sum(B)  <relation>  rhs`` for ``bound = p/q``."""
        p, q = bound.numerator, bound.denominator
        coeffs: dict = {}
        for v, c in self.sum_of(a, b).items():
            coeffs[v] = coeffs.get(v, 0) + q * c
        for v, c in self.sum_of(b).items():
            coeffs[v] = coeffs.get(v, 0) - p * c
        rhs = Fraction(rhs)
        if rhs == 0:
            return homogeneous(coeffs, relation)
        cls = ScaleClass.SCALE_ROBUST_GE if rhs > 0 else ScaleClass.SCALE_ROBUST_LE
        return LinearConstraint(coeffs, relation, rhs, cls)

    def domain_row(self) -> LinearConstraint:
        coeffs = {v: Fraction(1) for v in self.vars}
        coeffs[TOP_VAR] = coeffs.get(TOP_VAR, 0) - 1
        return homogeneous(coeffs, "=")

    def system(self, rows) -> LinearSystem:
        return LinearSystem(self.vars + [TOP_VAR], list(rows))

    def describe(self, t: int) -> str:
        return "{" + ", ".join(self.members(t)) + "}"


def enumerate_types(nkb: NormalKb, prune: bool = True, limit: int = DEFAULT_TYPE_LIMIT, _names=None) -> list[int]:
    """All types as bitmasks; with ``prune`` those breaking a conjunction axiom are left out."""
    names = nkb.names if _names is None else _names
    if len(names) > limit:
        raise CapacityExceeded(f"{len(names)} concept names exceed the type limit {limit}")
    if not prune:
        return list(range(1 << len(names)))
    bit = {a: 1 << k for k, a in enumerate(names)}
    bit[TOP] = 0
    # check each axiom as soon as the highest name it mentions has been decided
    checks: list[list] = [[] for _ in names]
    for a1, a2, b in nkb.conj_gcis:
        pos = max(names.index(x) for x in (a1, a2, b) if x != TOP)  # b is never top
        checks[pos].append((a1, a2, b))

    def inside(t, a):
        return a == TOP or bool(t & bit[a])

    out: list[int] = []

    def extend(k: int, t: int):
        if k == len(names):
            out.append(t)
            return
        for choice in (0, bit[names[k]]):
            u = t | choice
            if all(not (inside(u, a1) and inside(u, a2)) or inside(u, b) for a1, a2, b in checks[k]):
                extend(k + 1, u)

    if names:
        extend(0, 0)
    else:
        out.append(0)
    return sorted(out)


def base_rows(space: TypeSpace) -> list[LinearConstraint]:
    """Domain size, conditional bounds, pruning and non-empty domain rows.

    Nonnegativity of every variable is implicit in the solver.
    """
    rows = [space.domain_row()]
    for a, b, lo, hi in space.nkb.atomic_conds:
        if lo > 0:
            rows.append(space.ratio_row(a, b, lo, ">="))
        if hi < 1:
            rows.append(space.ratio_row(a, b, hi, "<="))
    if not space.prune:
        for t in space.types:
            if space.violates(t):
                rows.append(homogeneous({TypeVar(t): 1}, "="))
    rows.append(at_least({TOP_VAR: 1}, 1))
    return rows


def base_program(nkb: NormalKb, prune: bool = True, limit: int = DEFAULT_TYPE_LIMIT) -> LinearSystem:
    space = TypeSpace(nkb, prune=prune, limit=limit)
    return space.system(base_rows(space))


@dataclass(frozen=True)
class ChoiceSet:
    options: tuple
    origin: tuple  # ("E", A, r, B) or ("F", A, r, B, C, D)


def _space(x) -> TypeSpace:
    return x if isinstance(x, TypeSpace) else TypeSpace(x)


def choice_sets(space) -> list[ChoiceSet]:
    """One E-set per ``A => exists r.B``, one F-set per same-role pair with ``exists r.C => D``."""
    space = _space(space)
    nkb = space.nkb
    out: list[ChoiceSet] = []
    seen = set()

    def add(origin, empty_pred_coeffs, witness_coeffs):
        options = (homogeneous(empty_pred_coeffs, "="), at_least(witness_coeffs, 1))
        key = tuple(_row_key(o) for o in options)
        if key not in seen:
            seen.add(key)
            out.append(ChoiceSet(options, origin))

    for a, r, b in nkb.exist_right:
        add(("E", a, r, b), space.sum_of(a), space.sum_of(b))
    for a, r, b in nkb.exist_right:
        for r2, c, d in nkb.exist_left:
            if r2 != r:
                continue
            add(
                ("F", a, r, b, c, d),
                space.sum_where(lambda t: space.has(t, a) and not space.has(t, d)),
                space.sum_where(lambda t: space.has(t, b) and not space.has(t, c)),
            )
    return out


def _row_key(row: LinearConstraint):
    return (frozenset(row.coeffs.items()), row.relation, row.rhs)


def programs(space, limit: int = DEFAULT_CHOICE_LIMIT):
    """Base rows plus one option from every choice set, each distinct system once."""
    space = _space(space)
    sets = choice_sets(space)
    if len(sets) > limit:
        raise CapacityExceeded(f"{len(sets)} choice sets exceed the limit {limit}")
    base = base_rows(space)
    seen = set()
    for pick in itertools.product(*(s.options for s in sets)):
        key = frozenset(_row_key(o) for o in pick)
        if key in seen:
            continue
        seen.add(key)
        yield space.system(base + list(pick))
