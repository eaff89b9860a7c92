"""Consistency, l-entailment and p-entailment for statistical EL.

Every question reduces to: does the type system, extended by a few extra
rows, have an integer solution that a real interpretation can realize?  The
realizability test is a greatest fixpoint over types.  A type survives when

* every existential it needs (``A => exists r.B`` with ``A`` in the type)
  has a surviving successor type that contains ``B`` and does not force,
  through some ``exists r.C => D``, a name the type lacks, and
* some solution of the linear system over surviving types populates it.

At the fixpoint the sum of the populating solutions has full support on the
surviving types; scaling it to integers and wiring every element of a type to
one representative of a successor type yields a model.  The choice-set
programs in :mod:`statel.typespace` are a necessary condition only, so they
are not used to decide anything here.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from .concepts import Conditional, KnowledgeBase, Query, Top
from .errors import KbInconsistent, StatelError
from .lp import (
    DEFAULT_PIVOT_LIMIT,
    LinearConstraint,
    LinearSystem,
    at_least,
    feasible,
    integerize,
    optimize,
)
from .model import Interpretation, is_model, product_model, ratio
from .normalize import TOP, connected_restriction, normalize, normalize_with
from .parser import render_fraction
from .typespace import TOP_VAR, TypeSpace, TypeVar, base_rows, programs

log = logging.getLogger(__name__)


# ---------------------------------------------------------------- results


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction
    lo_attained: bool
    hi_attained: bool

    def __post_init__(self):
        if not 0 <= self.lo <= self.hi <= 1:
            raise ValueError(f"bad interval [{self.lo}, {self.hi}]")

    def to_json_obj(self) -> dict:
        return {
            "lo": render_fraction(self.lo),
            "hi": render_fraction(self.hi),
            "loAttained": self.lo_attained,
            "hiAttained": self.hi_attained,
        }


@dataclass
class Consistent:
    witness: Interpretation
    status = "consistent"

    def to_json_obj(self) -> dict:
        return {"status": self.status, "witness": self.witness.to_json_obj()}


@dataclass
class Inconsistent:
    status = "inconsistent"

    def to_json_obj(self) -> dict:
        return {"status": self.status}


@dataclass
class Entailed:
    status = "entailed"

    def to_json_obj(self) -> dict:
        return {"status": self.status}


@dataclass
class NotEntailed:
    counter_witness: Interpretation
    status = "not-entailed"

    def to_json_obj(self) -> dict:
        return {"status": self.status, "witness": self.counter_witness.to_json_obj()}


@dataclass
class IntervalResult:
    interval: Interval
    lo_witness: Interpretation | None = field(default=None, repr=False)
    hi_witness: Interpretation | None = field(default=None, repr=False)
    status = "interval"

    def to_json_obj(self) -> dict:
        return {"status": self.status, "interval": self.interval.to_json_obj()}


@dataclass
class QueryInfeasible:
    status = "query-infeasible"

    def to_json_obj(self) -> dict:
        return {"status": self.status}


# ------------------------------------------------------------ realization


@dataclass
class Realization:
    space: TypeSpace
    counts: dict  # type mask -> positive integer

    def witness(self) -> Interpretation:
        return build_witness(self.space, self.counts)


def _restrict_row(row: LinearConstraint, alive: set) -> LinearConstraint:
    coeffs = {v: a for v, a in row.coeffs.items() if v is TOP_VAR or v.mask in alive}
    return LinearConstraint(coeffs, row.relation, row.rhs, row.scale_class)


def _restricted_system(space: TypeSpace, rows, alive: set) -> LinearSystem:
    vars_ = [TypeVar(t) for t in space.types if t in alive] + [TOP_VAR]
    return LinearSystem(vars_, [_restrict_row(r, alive) for r in rows])


def _union(bits) -> int:
    out = 0
    for b in bits:
        out |= b
    return out


class _Successors:
    """Which types may serve as ``r``-successors of which."""

    def __init__(self, space: TypeSpace):
        self.space = space
        nkb = space.nkb
        # names a type forces on its r-predecessors through exists r.C => D
        self.forced: dict = {}
        for r in nkb.roles:
            left = [(c, space.bit[d]) for r2, c, d in nkb.exist_left if r2 == r and d != TOP]
            self.forced[r] = {t: _union(bit for c, bit in left if space.has(t, c)) for t in space.types}
        self.required = {
            t: [(r, b) for a, r, b in nkb.exist_right if space.has(t, a)] for t in space.types
        }

    def candidates(self, t: int, r: str, b: str, pool) -> list[int]:
        forced = self.forced[r]
        return [u for u in pool if self.space.has(u, b) and (forced[u] & ~t) == 0]

    def prune(self, alive: set) -> set:
        """Drop types with a missing successor until nothing changes."""
        alive = set(alive)
        while True:
            # per (r, b): the distinct forced-name masks among surviving B-types
            offers: dict = {}
            dead = set()
            for t in alive:
                for r, b in self.required[t]:
                    key = (r, b)
                    if key not in offers:
                        offers[key] = {self.forced[r][u] for u in alive if self.space.has(u, b)}
                    if not any((m & ~t) == 0 for m in offers[key]):
                        dead.add(t)
                        break
            if not dead:
                return alive
            alive -= dead

    def closed(self, support: set) -> bool:
        return all(
            self.candidates(t, r, b, support) for t in support for r, b in self.required[t]
        )


def surviving_types(space: TypeSpace, rows, pivot_limit: int = DEFAULT_PIVOT_LIMIT, shortcut: bool = False):
    """Greatest fixpoint of type elimination for the system ``rows``.

    Returns the surviving types and a solution whose support covers them;
    both are empty when nothing is realizable.  With ``shortcut`` a first
    solution whose support is already closed under successors is accepted
    as is, and the returned type set is then only an upper bound.  Without
    existential axioms every type is kept: the relaxation is exact as is.
    """
    rows = list(rows)
    alive = set(space.types)
    if not space.nkb.exist_right:
        out = feasible(_restricted_system(space, rows, alive), pivot_limit)
        return (alive, [out.point]) if out.is_feasible else (set(), [])

    succ = _Successors(space)
    while True:
        alive = succ.prune(alive)
        if not alive:
            return set(), []
        system = _restricted_system(space, rows, alive)
        if shortcut:
            shortcut = False
            out = feasible(system, pivot_limit)
            if not out.is_feasible:
                return set(), []
            support = {v.mask for v, x in out.point.items() if v is not TOP_VAR and x > 0}
            if succ.closed(support):
                return alive, [out.point]
        out = _widest_solution(system, alive, pivot_limit)
        if out is None:
            return set(), []
        support = {v.mask for v, x in out.items() if v is not TOP_VAR and x > 0}
        if support == alive:
            return alive, [out]
        log.debug("dropping %d unpopulatable types", len(alive - support))
        alive = support


def _widest_solution(system: LinearSystem, alive: set, pivot_limit: int) -> dict | None:
    """A solution populating every type that any solution populates.

    The rows are closed under sums (homogeneous or scale robust), so the
    union of all supports is itself a support; capped indicators
    ``z_t <= min(x_t, 1)`` find it with one linear program.
    """
    z = {t: ("z", t) for t in alive}
    rows = [LinearConstraint({z[t]: 1, TypeVar(t): -1}, "<=", 0) for t in alive]
    rows += [LinearConstraint({z[t]: 1}, "<=", 1) for t in alive]
    wide = LinearSystem(
        system.vars + list(z.values()), system.constraints + rows, ({v: 1 for v in z.values()}, "max")
    )
    out = optimize(wide, pivot_limit)
    if out.status == "infeasible":
        return None
    return {v: out.point[v] for v in system.vars}


def realize(space: TypeSpace, rows, pivot_limit: int = DEFAULT_PIVOT_LIMIT) -> Realization | None:
    """An integer solution of ``rows`` that some interpretation realizes, or None."""
    alive, points = surviving_types(space, rows, pivot_limit, shortcut=True)
    if not points:
        return None
    return _integral(space, rows, alive, points, pivot_limit)


def _integral(space: TypeSpace, rows, alive: set, points: list, pivot_limit: int = DEFAULT_PIVOT_LIMIT) -> Realization:
    """Smallest-domain integer solution populating every type some point uses."""
    support = {v.mask for p in points for v, x in p.items() if v is not TOP_VAR and x > 0}
    system = _restricted_system(space, rows, support)
    tight = system.with_rows(*(at_least({TypeVar(t): 1}, 1) for t in sorted(support)), objective=({TOP_VAR: 1}, "min"))
    out = optimize(tight, pivot_limit)
    assert out.status == "optimal", out.status
    counts = integerize(out.point, tight)
    return Realization(space, {v.mask: x for v, x in counts.items() if v is not TOP_VAR and x > 0})


def build_witness(space: TypeSpace, counts: dict) -> Interpretation:
    """``counts[t]`` elements per type; each element points at one representative successor."""
    nkb = space.nkb
    support = sorted(t for t, x in counts.items() if x > 0)
    members: dict = {}
    start = 0
    for t in support:
        members[t] = range(start, start + counts[t])
        start += counts[t]
    concepts = {a: set() for a in space.names}
    for t in support:
        for a in space.members(t):
            concepts[a].update(members[t])
    roles: dict = {r: set() for r in nkb.roles}
    if nkb.exist_right:
        succ = _Successors(space)
        for t in support:
            for r, b in succ.required[t]:
                target = succ.candidates(t, r, b, support)[0]
                rep = members[target][0]
                roles[r].update((d, rep) for d in members[t])
    full = Interpretation(start, concepts, roles)
    # fresh names are bookkeeping; query names outside the KB stay
    return full.restrict(concepts=[a for a in space.names if a not in nkb.provenance])


# ------------------------------------------------------------- procedures


def _space_for(kb: KnowledgeBase, *concepts):
    nkb, atoms = normalize_with(kb, *concepts)
    return TypeSpace(nkb), atoms


def _checked(witness: Interpretation, kb: KnowledgeBase) -> Interpretation:
    if not is_model(witness, kb):
        raise StatelError("internal error: constructed witness is not a model")
    return witness


def check_consistency(kb: KnowledgeBase, pivot_limit: int = DEFAULT_PIVOT_LIMIT):
    space = TypeSpace(normalize(kb))
    real = realize(space, base_rows(space), pivot_limit)
    if real is None:
        return Inconsistent()
    return Consistent(_checked(real.witness(), kb))


def some_program_feasible(kb: KnowledgeBase) -> bool:
    """Whether some choice-set program admits a rational solution.

    Every consistent KB passes; the converse fails once several existentials
    interact, which is why decisions go through :func:`realize` instead.
    """
    space = TypeSpace(normalize(kb))
    return any(feasible(p).is_feasible for p in programs(space))


def _violations(space: TypeSpace, a: str, b: str, k: Conditional):
    nonempty = at_least(space.sum_of(b), 1)
    if k.lower > 0:
        yield [nonempty, space.ratio_row(a, b, k.lower, "<=", -1)]
    if k.upper < 1:
        yield [nonempty, space.ratio_row(a, b, k.upper, ">=", 1)]


def _split(kb: KnowledgeBase, q):
    near = connected_restriction(kb, q)
    kept = set(near.statements)
    rest = KnowledgeBase(
        tuple(g for g in kb.tbox if g not in kept), tuple(k for k in kb.conditionals if k not in kept)
    )
    return near, rest


def l_entails(kb: KnowledgeBase, k: Conditional, independence: bool = False, pivot_limit: int = DEFAULT_PIVOT_LIMIT):
    """Entailed, or NotEntailed with a model of ``kb`` breaking ``k``."""
    if independence:
        near, rest = _split(kb, k)
        result = l_entails(near, k, pivot_limit=pivot_limit)
        if isinstance(result, Entailed):
            return result
        other = check_consistency(rest, pivot_limit)
        if isinstance(other, Inconsistent):
            return Entailed()
        witness = product_model(result.counter_witness, other.witness)
        return NotEntailed(_checked(witness, kb))
    space, (a, b) = _space_for(kb, k.lhs, k.rhs)
    base = base_rows(space)
    for extra in _violations(space, a, b, k):
        real = realize(space, base + extra, pivot_limit)
        if real is not None:
            witness = _checked(real.witness(), kb)
            r = ratio(witness, k.query)
            assert r is not None and not k.lower <= r <= k.upper
            return NotEntailed(witness)
    return Entailed()


def charnes_cooper(system: LinearSystem, numerator: dict, denominator: dict, sense: str) -> LinearSystem:
    """Linear program whose optimum is the optimum of ``numerator / denominator`` over ``system``.

    Variables ``("y", v)`` are the originals divided by the denominator and
    ``"t"`` is the reciprocal of the denominator.  ``t = 0`` is admitted, so the
    optimum is the infimum or supremum over the closure of the feasible set.
    """
    ys = [("y", v) for v in system.vars]
    rows = []
    for row in system.constraints:
        coeffs = {("y", v): a for v, a in row.coeffs.items()}
        if row.rhs:
            coeffs["t"] = -row.rhs
        rows.append(LinearConstraint(coeffs, row.relation, 0))
    rows.append(LinearConstraint({("y", v): a for v, a in denominator.items()}, "=", 1))
    objective = ({("y", v): a for v, a in numerator.items()}, sense)
    return LinearSystem(ys + ["t"], rows, objective)


def p_entail(kb: KnowledgeBase, q: Query, independence: bool = False, pivot_limit: int = DEFAULT_PIVOT_LIMIT):
    """Tight bounds on the share of ``q.rhs`` elements in ``q.lhs`` over all models."""
    if independence:
        near, rest = _split(kb, q)
        other = check_consistency(rest, pivot_limit)
        if isinstance(other, Inconsistent):
            raise KbInconsistent("the knowledge base has no model")
        result = p_entail(near, q, pivot_limit=pivot_limit)
        if isinstance(result, QueryInfeasible):
            return result
        lo_w, hi_w = (
            None if w is None else _checked(product_model(w, other.witness), kb)
            for w in (result.lo_witness, result.hi_witness)
        )
        return IntervalResult(result.interval, lo_w, hi_w)
    space, (a, b) = _space_for(kb, q.lhs, q.rhs)
    base = base_rows(space)
    nonempty = at_least(space.sum_of(b), 1)
    alive, _ = surviving_types(space, base + [nonempty], pivot_limit)
    if not alive:
        if realize(space, base, pivot_limit) is None:
            raise KbInconsistent("the knowledge base has no model")
        return QueryInfeasible()
    # every surviving type can be populated, so the rational relaxation is exact
    system = _restricted_system(space, base + [nonempty], alive)
    numerator, denominator = space.sum_of(a, b), space.sum_of(b)
    numerator = {v: x for v, x in numerator.items() if v is TOP_VAR or v.mask in alive}
    denominator = {v: x for v, x in denominator.items() if v is TOP_VAR or v.mask in alive}
    bounds = []
    for sense in ("min", "max"):
        out = optimize(charnes_cooper(system, numerator, denominator, sense), pivot_limit)
        assert out.status == "optimal", out.status
        bounds.append(out.value)
    lo, hi = bounds
    witnesses = []
    for value in (lo, hi):
        exact = space.ratio_row(a, b, value, "=")
        hit = realize(space, base + [nonempty, exact], pivot_limit)
        w = None
        if hit is not None:
            w = _checked(hit.witness(), kb)
            assert ratio(w, q) == value
        witnesses.append(w)
    interval = Interval(lo, hi, witnesses[0] is not None, witnesses[1] is not None)
    return IntervalResult(interval, witnesses[0], witnesses[1])


def necessity_via_p_entail(kb: KnowledgeBase, concept) -> Fraction:
    """Lower end of the p-entailment interval of ``(concept | top)``."""
    result = p_entail(kb, Query(concept, Top))
    if isinstance(result, QueryInfeasible):  # pragma: no cover - the domain is never empty
        raise StatelError("top cannot be empty")
    return result.interval.lo
