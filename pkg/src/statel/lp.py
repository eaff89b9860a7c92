"""Exact rational linear programming.

A two-phase primal simplex over Python integers: every tableau row is kept
fraction free (scaled to coprime integers), Bland's rule picks both the
entering and the leaving variable, so the method terminates and all reported
points and optima are exact rationals.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Mapping

from .errors import CapacityExceeded, ScaleClassViolation

DEFAULT_PIVOT_LIMIT = 10**6


class ScaleClass(enum.Enum):
    HOMOGENEOUS = "homogeneous"
    SCALE_ROBUST_GE = "scale-robust-ge"
    SCALE_ROBUST_LE = "scale-robust-le"


@dataclass(frozen=True)
class LinearConstraint:
    coeffs: Mapping[Hashable, Fraction]
    relation: str  # "<=", "=", ">="
    rhs: Fraction = Fraction(0)
    scale_class: ScaleClass | None = None

    def __post_init__(self):
        if self.relation not in ("<=", "=", ">="):
            raise ValueError(f"bad relation {self.relation!r}")
        coeffs = {v: Fraction(a) for v, a in self.coeffs.items() if a != 0}
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "rhs", Fraction(self.rhs))
        sc = self.scale_class
        if sc is ScaleClass.HOMOGENEOUS and self.rhs != 0:
            raise ScaleClassViolation("homogeneous row with non-zero right-hand side")
        if sc is ScaleClass.SCALE_ROBUST_GE and not (self.relation == ">=" and self.rhs > 0):
            raise ScaleClassViolation("scale-robust >= row needs '>=' and a positive bound")
        if sc is ScaleClass.SCALE_ROBUST_LE and not (self.relation == "<=" and self.rhs < 0):
            raise ScaleClassViolation("scale-robust <= row needs '<=' and a negative bound")

    def lhs_value(self, point: Mapping) -> Fraction:
        total = Fraction(0)
        for v, a in self.coeffs.items():
            x = point.get(v, 0)
            if x:
                total += a * x
        return total

    def holds(self, point: Mapping) -> bool:
        lhs = self.lhs_value(point)
        if self.relation == "<=":
            return lhs <= self.rhs
        if self.relation == ">=":
            return lhs >= self.rhs
        return lhs == self.rhs


def homogeneous(coeffs, relation: str) -> LinearConstraint:
    return LinearConstraint(coeffs, relation, Fraction(0), ScaleClass.HOMOGENEOUS)


def at_least(coeffs, bound) -> LinearConstraint:
    return LinearConstraint(coeffs, ">=", Fraction(bound), ScaleClass.SCALE_ROBUST_GE)


def at_most(coeffs, bound) -> LinearConstraint:
    return LinearConstraint(coeffs, "<=", Fraction(bound), ScaleClass.SCALE_ROBUST_LE)


@dataclass
class LinearSystem:
    vars: list = field(default_factory=list)
    constraints: list = field(default_factory=list)
    objective: tuple | None = None  # (coeffs, "min" | "max")
    free: set = field(default_factory=set)

    def __post_init__(self):
        declared = set(self.vars)
        for row in self.constraints:
            unknown = set(row.coeffs) - declared
            if unknown:
                raise ValueError(f"undeclared variables {sorted(map(str, unknown))}")

    def with_rows(self, *rows: LinearConstraint, objective=None) -> "LinearSystem":
        return LinearSystem(
            list(self.vars),
            list(self.constraints) + list(rows),
            self.objective if objective is None else objective,
            set(self.free),
        )

    def holds(self, point: Mapping) -> bool:
        for v in self.vars:
            if v not in self.free and Fraction(point.get(v, 0)) < 0:
                return False
        return all(row.holds(point) for row in self.constraints)

    def dump(self) -> str:
        """LP-format-like listing for debugging."""

        def term(a, v):
            return f"{'-' if a < 0 else '+'} {abs(a)} {v}"

        lines = []
        if self.objective is not None:
            coeffs, sense = self.objective
            lines.append(f"{sense}: " + " ".join(term(a, v) for v, a in coeffs.items()))
        lines.append("subject to")
        for k, row in enumerate(self.constraints):
            tag = f" [{row.scale_class.value}]" if row.scale_class else ""
            body = " ".join(term(a, v) for v, a in row.coeffs.items()) or "0"
            lines.append(f"  r{k}: {body} {row.relation} {row.rhs}{tag}")
        lines.append("bounds")
        lines.append("  " + ", ".join(f"{v} {'free' if v in self.free else '>= 0'}" for v in self.vars))
        return "\n".join(lines)


@dataclass
class LpOutcome:
    status: str  # "infeasible" | "feasible" | "optimal" | "unbounded"
    point: dict | None = None
    value: Fraction | None = None
    direction: dict | None = None
    pivots: int = 0

    @property
    def is_feasible(self) -> bool:
        return self.status != "infeasible"


def _lcm_of_denominators(values) -> int:
    out = 1
    for v in values:
        out = out * v.denominator // math.gcd(out, v.denominator)
    return out


def _normalize(row: list) -> list:
    g = math.gcd(*row)
    if g > 1:
        return [a // g for a in row]
    return row


class _Tableau:
    def __init__(self, rows, basis, ncols, pivot_limit):
        self.rows = rows  # each row: ints of length ncols + 1, last entry is the rhs
        self.basis = basis
        self.ncols = ncols
        self.pivots = 0
        self.pivot_limit = pivot_limit

    def pivot(self, r: int, c: int):
        self.pivots += 1
        if self.pivots > self.pivot_limit:
            raise CapacityExceeded(f"simplex pivot limit {self.pivot_limit} exceeded")
        prow = self.rows[r]
        p = prow[c]
        if p < 0:
            prow = [-a for a in prow]
            p = -p
            self.rows[r] = prow
        nz = [j for j, a in enumerate(prow) if a]
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row[c]
            if f:
                new = [a * p for a in row]
                for j in nz:
                    new[j] -= f * prow[j]
                self.rows[i] = _normalize(new)
        self.basis[r] = c

    def reduce_objective(self, obj: list) -> list:
        for i, row in enumerate(self.rows):
            b = self.basis[i]
            f = obj[b]
            if f:
                d = row[b]
                obj = [a * d - f * x for a, x in zip(obj, row)]
                obj = _normalize(obj)
        return obj

    def run(self, obj: list, allowed) -> tuple[str, list, int | None]:
        """Minimize ``obj`` over the current basis; returns status, reduced costs, entering column."""
        obj = self.reduce_objective(obj)
        while True:
            enter = next((j for j in allowed if obj[j] < 0), None)
            if enter is None:
                return "optimal", obj, None
            leave = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    if leave is None:
                        leave = i
                        continue
                    lrow = self.rows[leave]
                    lhs = row[-1] * lrow[enter]
                    rhs = lrow[-1] * a
                    if lhs < rhs or (lhs == rhs and self.basis[i] < self.basis[leave]):
                        leave = i
            if leave is None:
                return "unbounded", obj, enter
            self.pivot(leave, enter)
            prow = self.rows[leave]
            f = obj[enter]
            d = prow[enter]
            obj = _normalize([a * d - f * x for a, x in zip(obj, prow)])

    def values(self) -> dict:
        out = {}
        for i, row in enumerate(self.rows):
            b = self.basis[i]
            out[b] = Fraction(row[-1], row[b])
        return out


def _build(sys: LinearSystem, pivot_limit: int):
    columns: list = []  # (var, sign)
    index: dict = {}
    for v in sys.vars:
        index[v] = [(len(columns), 1)]
        columns.append((v, 1))
        if v in sys.free:
            index[v].append((len(columns), -1))
            columns.append((v, -1))
    nstruct = len(columns)

    prepared = []
    for row in sys.constraints:
        scale = _lcm_of_denominators(list(row.coeffs.values()) + [row.rhs])
        coeffs = {}
        for v, a in row.coeffs.items():
            for col, sign in index[v]:
                coeffs[col] = int(a * scale) * sign
        rhs = int(row.rhs * scale)
        rel = row.relation
        if rhs < 0:
            coeffs = {c: -a for c, a in coeffs.items()}
            rhs = -rhs
            rel = {"<=": ">=", ">=": "<=", "=": "="}[rel]
        prepared.append((coeffs, rel, rhs))

    nslack = sum(1 for _, rel, _ in prepared if rel != "=")
    nart = sum(1 for _, rel, _ in prepared if rel != "<=")
    ncols = nstruct + nslack + nart
    rows, basis = [], []
    slack = nstruct
    art = nstruct + nslack
    artificial = []
    for coeffs, rel, rhs in prepared:
        row = [0] * (ncols + 1)
        for c, a in coeffs.items():
            row[c] += a
        row[-1] = rhs
        if rel == "<=":
            row[slack] = 1
            basis.append(slack)
            slack += 1
        else:
            if rel == ">=":
                row[slack] = -1
                slack += 1
            row[art] = 1
            basis.append(art)
            artificial.append(art)
            art += 1
        rows.append(_normalize(row))
    return _Tableau(rows, basis, ncols, pivot_limit), columns, nstruct, set(artificial)


def _point(tab: _Tableau, columns, sys: LinearSystem) -> dict:
    vals = tab.values()
    point = {v: Fraction(0) for v in sys.vars}
    for col, (v, sign) in enumerate(columns):
        if col in vals:
            point[v] += sign * vals[col]
    return point


def _phase_one(sys: LinearSystem, pivot_limit: int):
    tab, columns, nstruct, artificial = _build(sys, pivot_limit)
    if artificial:
        obj = [0] * (tab.ncols + 1)
        for a in artificial:
            obj[a] = 1
        tab.run(obj, range(tab.ncols))
        vals = tab.values()
        if any(vals.get(a, 0) != 0 for a in artificial):
            return None, columns, nstruct
        # drive zero-level artificials out of the basis or drop redundant rows
        keep_rows = []
        for i in range(len(tab.rows)):
            if tab.basis[i] in artificial:
                row = tab.rows[i]
                col = next((j for j in range(tab.ncols) if j not in artificial and row[j]), None)
                if col is not None:
                    tab.pivot(i, col)
                    keep_rows.append(i)
            else:
                keep_rows.append(i)
        tab.rows = [tab.rows[i] for i in keep_rows]
        tab.basis = [tab.basis[i] for i in keep_rows]
    tab.allowed = [j for j in range(tab.ncols) if j not in artificial]
    return tab, columns, nstruct


def feasible(sys: LinearSystem, pivot_limit: int = DEFAULT_PIVOT_LIMIT) -> LpOutcome:
    """Phase-one simplex: an exact feasible point or ``infeasible``."""
    tab, columns, _ = _phase_one(sys, pivot_limit)
    if tab is None:
        return LpOutcome("infeasible")
    point = _point(tab, columns, sys)
    assert sys.holds(point), "simplex returned a point violating the system"
    return LpOutcome("feasible", point, pivots=tab.pivots)


def optimize(sys: LinearSystem, pivot_limit: int = DEFAULT_PIVOT_LIMIT) -> LpOutcome:
    if sys.objective is None:
        raise ValueError("optimize needs an objective")
    coeffs, sense = sys.objective
    if sense not in ("min", "max"):
        raise ValueError(f"bad objective sense {sense!r}")
    tab, columns, nstruct = _phase_one(sys, pivot_limit)
    if tab is None:
        return LpOutcome("infeasible")
    coeffs = {v: Fraction(a) for v, a in coeffs.items()}
    scale = _lcm_of_denominators(list(coeffs.values()) or [Fraction(0)])
    sign = 1 if sense == "min" else -1
    obj = [0] * (tab.ncols + 1)
    for col, (v, s) in enumerate(columns):
        if v in coeffs:
            obj[col] = sign * s * int(coeffs[v] * scale)
    status, _, enter = tab.run(obj, tab.allowed)
    point = _point(tab, columns, sys)
    assert sys.holds(point), "simplex returned a point violating the system"
    if status == "unbounded":
        vals_rows = {tab.basis[i]: i for i in range(len(tab.rows))}
        ray_cols = {enter: Fraction(1)}
        for b, i in vals_rows.items():
            row = tab.rows[i]
            ray_cols[b] = Fraction(-row[enter], row[b])
        direction = {v: Fraction(0) for v in sys.vars}
        for col, (v, s) in enumerate(columns):
            if col in ray_cols:
                direction[v] += s * ray_cols[col]
        return LpOutcome("unbounded", point, direction=direction, pivots=tab.pivots)
    value = sum((a * point[v] for v, a in coeffs.items()), Fraction(0))
    return LpOutcome("optimal", point, value, pivots=tab.pivots)


def integerize(point: Mapping, sys: LinearSystem) -> dict:
    """Scale a rational solution by the LCM of its denominators.

    Only valid when every row is homogeneous or scale robust: scaling by a
    factor >= 1 keeps such rows satisfied.
    """
    for row in sys.constraints:
        if row.scale_class is None:
            raise ScaleClassViolation(f"row without scale class: {row}")
    if not sys.holds(point):
        raise ValueError("point does not satisfy the system")
    values = [Fraction(point.get(v, 0)) for v in sys.vars]
    if any(x < 0 for x in values):
        raise ValueError("integerize expects a nonnegative point")
    factor = _lcm_of_denominators(values)
    out = {v: int(Fraction(point.get(v, 0)) * factor) for v in sys.vars}
    assert sys.holds(out)
    return out
