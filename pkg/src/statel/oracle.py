"""Brute-force ground truth.

Exhaustive enumeration of small interpretations (full ALC, negation
included), count-vector enumeration for role-free KBs, and the reduction from
3DNF validity to inconsistency together with a truth-table validity check.
"""

from __future__ import annotations

import itertools
import os
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

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
    Signature,
    Top,
    _TopType,
    signature,
)
from .errors import CapacityExceeded, ParseError, SourceSpan, StatelError
from .model import Interpretation

DEFAULT_BUDGET = 2**26
_BLOCK_CELLS = 1 << 22  # rows times n^2 per evaluated block


def default_budget() -> int:
    env = os.environ.get("STATEL_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


def _cost(sig: Signature, n: int) -> int:
    return 2 ** (len(sig.concepts) * n + len(sig.roles) * n * n)


def _guard(sig: Signature, sizes, budget: int | None):
    budget = default_budget() if budget is None else budget
    total = sum(_cost(sig, n) for n in sizes)
    if total > budget:
        raise CapacityExceeded(f"enumeration needs {total} interpretations, budget is {budget}")


def enumerate_interpretations(sig: Signature, n: int, budget: int | None = None):
    """Every interpretation of ``sig`` over ``{0, ..., n-1}``, each once."""
    if n < 1:
        raise StatelError("domain size must be positive")
    _guard(sig, [n], budget)
    names, roles = sorted(sig.concepts), sorted(sig.roles)
    pairs = [(d, e) for d in range(n) for e in range(n)]
    subsets = [frozenset(d for d in range(n) if mask >> d & 1) for mask in range(1 << n)]
    relations = [frozenset(p for k, p in enumerate(pairs) if mask >> k & 1) for mask in range(1 << len(pairs))]
    for cs in itertools.product(subsets, repeat=len(names)):
        for rs in itertools.product(relations, repeat=len(roles)):
            yield Interpretation(n, dict(zip(names, cs)), dict(zip(roles, rs)))


# ------------------------------------------------------- vectorized search


def _bits(index: np.ndarray, width: int) -> np.ndarray:
    return ((index[:, None] >> np.arange(width, dtype=np.int64)) & 1).astype(bool)


class _Block:
    """Many interpretations of one domain size evaluated side by side."""

    def __init__(self, n: int, concepts: dict, roles: dict, rows: int):
        self.n = n
        self.concepts = concepts  # name -> (rows, n) bool
        self.roles = roles  # role -> (rows, n, n) bool
        self.rows = rows
        self._cache: dict = {}

    def ext(self, c: Concept) -> np.ndarray:
        hit = self._cache.get(c)
        if hit is not None:
            return hit
        if isinstance(c, _TopType):
            out = np.ones((self.rows, self.n), dtype=bool)
        elif isinstance(c, Name):
            out = self.concepts.get(c.name)
            if out is None:
                out = np.zeros((self.rows, self.n), dtype=bool)
        elif isinstance(c, Not):
            out = ~self.ext(c.arg)
        elif isinstance(c, And):
            out = self.ext(c.left) & self.ext(c.right)
        elif isinstance(c, Exists):
            rel = self.roles.get(c.role)
            if rel is None:
                out = np.zeros((self.rows, self.n), dtype=bool)
            else:
                out = (rel & self.ext(c.filler)[:, None, :]).any(axis=2)
        else:
            raise TypeError(f"not a concept: {c!r}")
        self._cache[c] = out
        return out

    def count(self, c: Concept) -> np.ndarray:
        return self.ext(c).sum(axis=1)

    def satisfies(self, s) -> np.ndarray:
        if isinstance(s, Gci):
            return ~(self.ext(s.sub) & ~self.ext(s.sup)).any(axis=1)
        den = self.count(s.rhs)
        num = self.count(And(s.lhs, s.rhs))
        lo, hi = s.lower, s.upper
        ok_lo = num * lo.denominator >= lo.numerator * den
        ok_hi = num * hi.denominator <= hi.numerator * den
        return (den == 0) | (ok_lo & ok_hi)

    def interpretation(self, row: int, names, roles) -> Interpretation:
        concepts = {a: frozenset(np.flatnonzero(self.concepts[a][row]).tolist()) for a in names}
        rels = {}
        for r in roles:
            ds, es = np.nonzero(self.roles[r][row])
            rels[r] = frozenset(zip(ds.tolist(), es.tolist()))
        return Interpretation(self.n, concepts, rels)


def _models(kb: KnowledgeBase, sig: Signature, n: int):
    """Blocks of interpretations of size ``n`` with a mask of which ones are models."""
    names, roles = sorted(sig.concepts), sorted(sig.roles)
    statements = list(kb.statements)
    local = [s for s in statements if not signature(s).roles]
    rest = [s for s in statements if signature(s).roles]

    cbits = len(names) * n
    concept_index = np.arange(1 << cbits, dtype=np.int64)
    bits = _bits(concept_index, cbits) if cbits else np.zeros((1, 0), dtype=bool)
    cpart = {a: bits[:, j * n : (j + 1) * n] for j, a in enumerate(names)}
    head = _Block(n, cpart, {}, len(concept_index))
    keep = np.ones(len(concept_index), dtype=bool)
    for s in local:
        keep &= head.satisfies(s)
    survivors = {a: m[keep] for a, m in cpart.items()}
    s_count = int(keep.sum())
    if s_count == 0:
        return
    if not roles:
        block = _Block(n, survivors, {}, s_count)
        yield block, np.ones(s_count, dtype=bool)
        return

    rbits = len(roles) * n * n
    total_roles = 1 << rbits
    per_row = max(1, n * n * len(roles))
    rows_per_block = max(1, _BLOCK_CELLS // per_row)
    r_chunk = min(total_roles, rows_per_block)
    s_chunk = max(1, rows_per_block // r_chunk)
    for s0 in range(0, s_count, s_chunk):
        s1 = min(s_count, s0 + s_chunk)
        for r0 in range(0, total_roles, r_chunk):
            r1 = min(total_roles, r0 + r_chunk)
            ridx = np.arange(r0, r1, dtype=np.int64)
            rb = _bits(ridx, rbits)
            rows = (s1 - s0) * (r1 - r0)
            concepts = {a: np.repeat(m[s0:s1], r1 - r0, axis=0) for a, m in survivors.items()}
            rel = {
                r: np.tile(rb[:, k * n * n : (k + 1) * n * n].reshape(-1, n, n), (s1 - s0, 1, 1))
                for k, r in enumerate(roles)
            }
            block = _Block(n, concepts, rel, rows)
            ok = np.ones(rows, dtype=bool)
            for s in rest:
                ok &= block.satisfies(s)
            yield block, ok


@dataclass(frozen=True)
class Witness:
    model: Interpretation

    def to_json_obj(self) -> dict:
        return {"status": "witness", "witness": self.model.to_json_obj()}


@dataclass(frozen=True)
class NoModelUpTo:
    n: int

    def to_json_obj(self) -> dict:
        return {"status": "no-model", "maxDomain": self.n}


def oracle_consistent(kb: KnowledgeBase, n_max: int, budget: int | None = None, n_min: int = 1):
    """The first model with at most ``n_max`` elements, smallest domains first."""
    sig = kb.signature
    _guard(sig, range(n_min, n_max + 1), budget)
    names, roles = sorted(sig.concepts), sorted(sig.roles)
    for n in range(n_min, n_max + 1):
        for block, ok in _models(kb, sig, n):
            hits = np.flatnonzero(ok)
            if len(hits):
                return Witness(block.interpretation(int(hits[0]), names, roles))
    return NoModelUpTo(n_max)


@dataclass(frozen=True)
class RatioSet:
    values: frozenset

    @property
    def min(self):
        return min(self.values) if self.values else None

    @property
    def max(self):
        return max(self.values) if self.values else None

    def __contains__(self, x) -> bool:
        return Fraction(x) in self.values

    def __iter__(self):
        return iter(sorted(self.values))

    def __len__(self) -> int:
        return len(self.values)

    def to_json_obj(self) -> dict:
        from .parser import render_fraction

        out = {"status": "ratios", "ratios": [render_fraction(x) for x in sorted(self.values)]}
        if self.values:
            out["min"] = render_fraction(self.min)
            out["max"] = render_fraction(self.max)
        return out


def oracle_ratios(kb: KnowledgeBase, q: Query, n_max: int, budget: int | None = None) -> RatioSet:
    """Every value of ``|C and D| / |D|`` over models with ``|D| > 0`` and at most ``n_max`` elements."""
    sig = kb.signature | q.signature()
    _guard(sig, range(1, n_max + 1), budget)
    seen: set = set()
    for n in range(1, n_max + 1):
        for block, ok in _models(kb, sig, n):
            if not ok.any():
                continue
            den = block.count(q.rhs)[ok]
            num = block.count(And(q.lhs, q.rhs))[ok]
            pairs = np.unique(np.stack([num[den > 0], den[den > 0]], axis=1), axis=0)
            seen.update(Fraction(int(a), int(b)) for a, b in pairs)
    return RatioSet(frozenset(seen))


# ------------------------------------------------------ role-free counting


def _truth(c: Concept, members: set) -> bool:
    if isinstance(c, _TopType):
        return True
    if isinstance(c, Name):
        return c.name in members
    if isinstance(c, Not):
        return not _truth(c.arg, members)
    if isinstance(c, And):
        return _truth(c.left, members) and _truth(c.right, members)
    raise StatelError(f"{c} uses a role; count-vector enumeration is role-free only")


def role_free_ratios(kb: KnowledgeBase, q: Query, n_max: int) -> RatioSet:
    """Ratios of ``q`` over role-free models with at most ``n_max`` elements.

    Only the counts of a few concepts matter, so the enumeration runs over
    reachable vectors of those counts instead of over interpretations: each
    type adds its 0/1 feature vector, and types with equal vectors merge.
    """
    sig = kb.signature | q.signature()
    if sig.roles:
        raise StatelError("role_free_ratios needs a role-free KB and query")
    names = sorted(sig.concepts)
    # conditionals that only forbid types become filters; vacuous ones vanish
    counted = []
    forbidden = []
    for k in kb.conditionals:
        if k.upper == 0:
            forbidden.append(And(k.lhs, k.rhs))
        elif k.lower == 1:
            forbidden.append(And(k.rhs, Not(k.lhs)))
        elif k.lower > 0 or k.upper < 1:
            counted.append(k)
    forbidden += [And(g.sub, Not(g.sup)) for g in kb.tbox]
    features = [Top]
    for k in counted:
        features += [And(k.lhs, k.rhs), k.rhs]
    features += [And(q.lhs, q.rhs), q.rhs]

    rows = []
    for bits in itertools.product((False, True), repeat=len(names)):
        members = {a for a, b in zip(names, bits) if b}
        if not any(_truth(c, members) for c in forbidden):
            rows.append(tuple(int(_truth(f, members)) for f in features))
    # features with the same column always have the same count
    column_of: dict = {}
    index: dict = {}
    for j, f in enumerate(features):
        col = tuple(r[j] for r in rows)
        index[f] = column_of.setdefault(col, len(column_of))
    columns = list(column_of)
    vectors = {tuple(col[i] for col in columns) for i in range(len(rows))}
    base = n_max + 1
    if base ** len(columns) >= 2**62:
        raise CapacityExceeded(f"{len(columns)} count features exceed the packed state width")
    weights = base ** np.arange(len(columns), dtype=np.int64)
    offsets = sorted({int(np.dot(v, weights)) for v in vectors})

    states = np.zeros(1, dtype=np.int64)  # packed feature sums; digit 0 is the domain size
    for off in offsets:
        grown = [states]
        layer = states
        for _ in range(n_max):
            layer = layer[layer % base < n_max] + off
            if not len(layer):
                break
            grown.append(layer)
        states = np.unique(np.concatenate(grown))
    digits = (states[:, None] // weights) % base
    ok = digits[:, index[Top]] >= 1
    for k in counted:
        num, den = digits[:, index[And(k.lhs, k.rhs)]], digits[:, index[k.rhs]]
        lo, hi = k.lower, k.upper
        ok &= (den == 0) | ((num * lo.denominator >= lo.numerator * den) & (num * hi.denominator <= hi.numerator * den))
    num, den = digits[:, index[And(q.lhs, q.rhs)]], digits[:, index[q.rhs]]
    ok &= den > 0
    pairs = np.unique(np.stack([num[ok], den[ok]], axis=1), axis=0) if ok.any() else []
    return RatioSet(frozenset(Fraction(int(a), int(b)) for a, b in pairs))


# ------------------------------------------------------------------- 3DNF


@dataclass(frozen=True)
class DnfFormula:
    variables: tuple
    clauses: tuple  # of 3-tuples of (name, positive)

    def __post_init__(self):
        for clause in self.clauses:
            if len(clause) != 3:
                raise StatelError("every clause needs exactly three literals")
            for name, _ in clause:
                if name not in self.variables:
                    raise StatelError(f"undeclared variable {name}")

    @classmethod
    def of(cls, *clauses) -> "DnfFormula":
        """Build from clauses written as strings like ``"x !y z"``."""
        parsed = [tuple(_literal(tok) for tok in c.split()) for c in clauses]
        variables = tuple(sorted({name for c in parsed for name, _ in c}))
        return cls(variables, tuple(parsed))

    def render(self) -> str:
        return "".join(
            "clause " + " ".join(("" if pos else "!") + name for name, pos in c) + "\n" for c in self.clauses
        )


_VAR_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


def _literal(tok: str) -> tuple:
    name = tok[1:] if tok.startswith("!") else tok
    if not _VAR_RE.fullmatch(name):
        raise StatelError(f"bad literal {tok!r}")
    return (name, not tok.startswith("!"))


def parse_dnf(text: str) -> DnfFormula:
    clauses = []
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].split()
        if not body:
            continue
        if body[0] != "clause" or len(body) != 4:
            raise ParseError(SourceSpan(lineno, 1, len(line)), "expected 'clause LIT LIT LIT'", ["clause"])
        try:
            clauses.append(tuple(_literal(tok) for tok in body[1:]))
        except StatelError as exc:
            raise ParseError(SourceSpan(lineno, 1, len(line)), str(exc), ["name", "!name"]) from None
    variables = tuple(sorted({name for c in clauses for name, _ in c}))
    return DnfFormula(variables, tuple(clauses))


def literal_name(name: str, positive: bool) -> str:
    return f"A_{name}" if positive else f"An_{name}"


def reduce_3dnf(f: DnfFormula) -> KnowledgeBase:
    """A KB that is inconsistent exactly when ``f`` is valid.

    Each variable splits the domain into two halves, one per polarity; each
    clause's elements fall into ``C``; ``C`` may cover at most half.
    """
    goal = Name("C")
    tbox = []
    for i, clause in enumerate(f.clauses):
        a1, a2, a3 = (Name(literal_name(*lit)) for lit in clause)
        aux, cl = Name(f"H_{i}"), Name(f"B_{i}")
        tbox += [Gci(And(a1, a2), aux), Gci(And(aux, a3), cl), Gci(cl, goal)]
    half = Fraction(1, 2)
    conds = []
    for x in f.variables:
        pos, neg = Name(literal_name(x, True)), Name(literal_name(x, False))
        conds += [
            Conditional(pos, Top, half, 1),
            Conditional(neg, Top, half, 1),
            Conditional(neg, pos, 0, 0),
        ]
    conds.append(Conditional(goal, Top, 0, half))
    return KnowledgeBase(tuple(tbox), tuple(conds))


def dnf_valid(f: DnfFormula) -> bool:
    if len(f.variables) > 20:
        raise CapacityExceeded("truth tables are limited to 20 variables")
    for values in itertools.product((False, True), repeat=len(f.variables)):
        v = dict(zip(f.variables, values))
        if not any(all(v[name] == pos for name, pos in c) for c in f.clauses):
            return False
    return True

