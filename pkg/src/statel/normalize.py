"""Normal form for statistical EL knowledge bases.

After normalization every GCI has one of the shapes ``A1 and A2 => B``,
``A => exists r.B`` or ``exists r.A => B`` and every conditional relates two
atoms, where an atom is a concept name or top.  Complex conditional sides get
a fresh name defined by equivalence so that their counts are pinned; fresh
names introduced while normalizing GCIs only need one direction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .concepts import (
    And,
    Concept,
    Conditional,
    Exists,
    Gci,
    KnowledgeBase,
    Name,
    Query,
    Signature,
    _TopType,
    conjuncts,
    is_el,
    signature,
)
from .errors import NotDeterministic, NotInElFragment

TOP = "⊤"


@dataclass
class NormalKb:
    conj_gcis: list = field(default_factory=list)  # (A1, A2, B)
    exist_right: list = field(default_factory=list)  # (A, r, B)
    exist_left: list = field(default_factory=list)  # (r, A, B)
    atomic_conds: list = field(default_factory=list)  # (A, B, lower, upper): (A | B)[lower, upper]
    provenance: dict = field(default_factory=dict)  # fresh name -> concept it stands for
    original_signature: Signature = field(default_factory=Signature)
    definitions: dict = field(default_factory=dict)  # concept -> atom with atom == concept
    declared: set = field(default_factory=set)  # names kept even if no axiom mentions them

    @property
    def names(self) -> list[str]:
        """Concept names used by the normal form, top excluded, in a fixed order."""
        seen: set[str] = set(self.declared)
        for a1, a2, b in self.conj_gcis:
            seen.update((a1, a2, b))
        for a, _, b in self.exist_right:
            seen.update((a, b))
        for _, a, b in self.exist_left:
            seen.update((a, b))
        for a, b, _, _ in self.atomic_conds:
            seen.update((a, b))
        seen.discard(TOP)
        return sorted(seen, key=lambda s: (s.startswith("_"), s))

    @property
    def roles(self) -> list[str]:
        return sorted({r for _, r, _ in self.exist_right} | {r for r, _, _ in self.exist_left})

    def size(self) -> int:
        return len(self.conj_gcis) + len(self.exist_right) + len(self.exist_left) + len(self.atomic_conds)

    def copy(self) -> "NormalKb":
        return NormalKb(
            list(self.conj_gcis),
            list(self.exist_right),
            list(self.exist_left),
            list(self.atomic_conds),
            dict(self.provenance),
            self.original_signature,
            dict(self.definitions),
            set(self.declared),
        )

    def render(self) -> str:
        def atom(x):
            return "top" if x == TOP else x

        lines = []
        for a1, a2, b in self.conj_gcis:
            lhs = atom(a1) if a2 == TOP else f"{atom(a1)} and {atom(a2)}"
            lines.append(f"gci {lhs} => {atom(b)}")
        for a, r, b in self.exist_right:
            lines.append(f"gci {atom(a)} => exists {r}.{atom(b)}")
        for r, a, b in self.exist_left:
            lines.append(f"gci exists {r}.{atom(a)} => {atom(b)}")
        for a, b, lo, hi in self.atomic_conds:
            lines.append(f"cond {atom(a)} | {atom(b)} [{_frac(lo)}, {_frac(hi)}]")
        for name, c in self.provenance.items():
            lines.append(f"# {name} := {c}")
        return "\n".join(lines) + "\n"


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def gci_to_conditional(g: Gci) -> Conditional:
    return Conditional(g.sup, g.sub, Fraction(1), Fraction(1))


def conditional_to_gci(k: Conditional) -> Gci:
    if k.lower != 1 or k.upper != 1:
        raise NotDeterministic(f"({k}) is not a [1, 1] conditional")
    return Gci(k.rhs, k.lhs)


def _is_atom(c: Concept) -> bool:
    return isinstance(c, (Name, _TopType))


def _atom(c: Concept) -> str:
    return TOP if isinstance(c, _TopType) else c.name


class Normalizer:
    """Accumulates normal-form axioms; reusable for query definitions."""

    def __init__(self, nkb: NormalKb | None = None, taken: set[str] | None = None):
        self.nkb = nkb if nkb is not None else NormalKb()
        self.taken = set(taken or ()) | set(self.nkb.provenance)
        self._counter = 0
        self._above: dict = {}  # concept -> fresh name X with concept => X
        self._below: dict = {}  # concept -> fresh name X with X => concept
        self._seen: set = set()
        for a1, a2, b in self.nkb.conj_gcis:
            self._seen.add(("c", a1, a2, b))
        for a, r, b in self.nkb.exist_right:
            self._seen.add(("r", a, r, b))
        for r, a, b in self.nkb.exist_left:
            self._seen.add(("l", r, a, b))

    def fresh(self, meaning: Concept) -> str:
        while True:
            name = f"_N{self._counter}"
            self._counter += 1
            if name not in self.taken:
                break
        self.taken.add(name)
        self.nkb.provenance[name] = meaning
        return name

    def _emit(self, key: tuple):
        if key in self._seen:
            return
        self._seen.add(key)
        kind, *rest = key
        if kind == "c":
            self.nkb.conj_gcis.append(tuple(rest))
        elif kind == "r":
            self.nkb.exist_right.append(tuple(rest))
        else:
            self.nkb.exist_left.append(tuple(rest))

    def above(self, c: Concept) -> str:
        """A name X with ``c => X`` (enough on the left of an inclusion)."""
        if _is_atom(c):
            return _atom(c)
        x = self.nkb.definitions.get(c) or self._above.get(c)
        if x is None:
            x = self._above[c] = self.fresh(c)
            self.add_gci(c, Name(x))
        return x

    def below(self, c: Concept) -> str:
        """A name X with ``X => c`` (enough on the right of an inclusion)."""
        if _is_atom(c):
            return _atom(c)
        x = self.nkb.definitions.get(c) or self._below.get(c)
        if x is None:
            x = self._below[c] = self.fresh(c)
            self.add_gci(Name(x), c)
        return x

    def define(self, c: Concept) -> str:
        """An atom equivalent to ``c`` in every model of the normal form."""
        if _is_atom(c):
            return _atom(c)
        if not is_el(c):
            raise NotInElFragment(f"{c} uses negation")
        known = self.nkb.definitions.get(c)
        if known is not None:
            return known
        x = self.fresh(c)
        self.nkb.definitions[c] = x
        self.add_gci(Name(x), c)
        self.add_gci(c, Name(x))
        return x

    def add_gci(self, sub: Concept, sup: Concept):
        if not (is_el(sub) and is_el(sup)):
            raise NotInElFragment(f"{sub} => {sup} uses negation")
        if isinstance(sup, _TopType):
            return
        if isinstance(sup, And):
            for part in conjuncts(sup):
                self.add_gci(sub, part)
            return
        parts = [p for p in conjuncts(sub) if not isinstance(p, _TopType)]
        if not parts:
            self._atomic_lhs(TOP, sup)
        elif len(parts) == 1 and _is_atom(parts[0]):
            self._atomic_lhs(_atom(parts[0]), sup)
        elif len(parts) == 1:
            (ex,) = parts  # an existential restriction
            self._exists_lhs(ex, self.below(sup))
        else:
            atoms = [self.above(p) for p in parts]
            target = self.below(sup)
            acc = atoms[0]
            for a in atoms[1:-1]:
                acc_and = And(Name(acc), Name(a))
                z = self.nkb.definitions.get(acc_and) or self._above.get(acc_and)
                if z is None:
                    z = self._above[acc_and] = self.fresh(acc_and)
                    self._conj(acc, a, z)
                acc = z
            self._conj(acc, atoms[-1], target)

    def _exists_lhs(self, ex: Exists, target: str):
        filler = self.above(ex.filler)
        if target != TOP:
            self._emit(("l", ex.role, filler, target))

    def _conj(self, a1: str, a2: str, b: str):
        if b == TOP or b in (a1, a2):
            return
        if a1 == TOP and a2 != TOP:
            a1, a2 = a2, a1
        self._emit(("c", a1, a2, b))

    def _atomic_lhs(self, a: str, sup: Concept):
        if _is_atom(sup):
            self._conj(a, TOP, _atom(sup))
        elif isinstance(sup, Exists):
            self._emit(("r", a, sup.role, self.below(sup.filler)))
        else:
            raise NotInElFragment(f"unsupported concept {sup}")

    def add_conditional(self, k: Conditional):
        if k.lower == 1:
            # (D | C)[1, 1] is the GCI C => D
            self.add_gci(k.rhs, k.lhs)
            return
        a = self.define(k.lhs)
        b = self.define(k.rhs)
        self.nkb.atomic_conds.append((a, b, k.lower, k.upper))


def normalize(kb: KnowledgeBase) -> NormalKb:
    nkb, _ = normalize_with(kb)
    return nkb


def normalize_with(kb: KnowledgeBase, *concepts: Concept) -> tuple[NormalKb, list[str]]:
    """Normalize ``kb`` and return atoms equivalent to each extra concept."""
    if not kb.is_el():
        raise NotInElFragment("the knowledge base uses negation")
    sig = kb.signature
    norm = Normalizer(NormalKb(original_signature=sig), taken=set(sig.concepts))
    for g in kb.tbox:
        norm.add_gci(g.sub, g.sup)
    for k in kb.conditionals:
        norm.add_conditional(k)
    atoms = [norm.define(c) for c in concepts]
    norm.nkb.declared.update(a for a in atoms if a != TOP)
    return norm.nkb, atoms


def extend_with(nkb: NormalKb, *concepts: Concept) -> tuple[NormalKb, list[str]]:
    """Copy of ``nkb`` with equivalence definitions for ``concepts``."""
    out = nkb.copy()
    norm = Normalizer(out, taken=set(nkb.original_signature.concepts) | set(nkb.names))
    atoms = [norm.define(c) for c in concepts]
    out.declared.update(a for a in atoms if a != TOP)
    return out, atoms


def connected_restriction(kb: KnowledgeBase, q) -> KnowledgeBase:
    """Statements linked to ``q`` through chains of shared concept or role names."""
    statements = list(kb.statements)
    sigs = [signature(s) for s in statements]
    qsig = q.signature() if isinstance(q, (Query, Conditional)) else signature(q)

    parent = list(range(len(statements) + 1))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        parent[find(i)] = find(j)

    owner: dict = {}
    qnode = len(statements)
    for idx, sig in enumerate(sigs + [qsig]):
        for key in [("c", a) for a in sig.concepts] + [("r", r) for r in sig.roles]:
            if key in owner:
                union(idx, owner[key])
            else:
                owner[key] = idx
    root = find(qnode)
    keep = {i for i in range(len(statements)) if find(i) == root}
    tbox = [s for i, s in enumerate(statements) if i in keep and isinstance(s, Gci)]
    conds = [s for i, s in enumerate(statements) if i in keep and isinstance(s, Conditional)]
    return KnowledgeBase(tuple(tbox), tuple(conds))


__all__ = [
    "TOP",
    "NormalKb",
    "Normalizer",
    "conditional_to_gci",
    "connected_restriction",
    "extend_with",
    "gci_to_conditional",
    "normalize",
    "normalize_with",
]
