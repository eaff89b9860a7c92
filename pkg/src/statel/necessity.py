"""Lower bounds on concept shares for open-minded KBs.

A KB is open-minded when every conditional has upper bound 1.  Such KBs are
always consistent, and the least share of the domain a concept must occupy is
computed in polynomial time: first a classical completion derives
subsumptions, then lower bounds are pushed along conditionals, conjunctions
and subsumptions, largest update first.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction

from .concepts import Concept, KnowledgeBase
from .errors import NotOpenMinded, StatelError
from .normalize import TOP, NormalKb, normalize_with


@dataclass
class CompletionState:
    subsumers: set = field(default_factory=set)  # (X, A): X => A
    links: set = field(default_factory=set)  # (X, r, B): X => exists r.B
    lower: dict = field(default_factory=dict)  # name -> least share of the domain
    trace: list = field(default_factory=list)

    @property
    def S(self) -> set:
        return self.subsumers | self.links


def check_open_minded(nkb: NormalKb) -> NormalKb:
    """Copy of ``nkb`` with [1, 1] conditionals turned into GCIs; rejects upper bounds below 1."""
    bad = [k for k in nkb.atomic_conds if k[3] < 1]
    if bad:
        raise NotOpenMinded([f"({a} | {b})[{lo}, {hi}]" for a, b, lo, hi in bad])
    out = nkb.copy()
    out.atomic_conds = []
    for a, b, lo, hi in nkb.atomic_conds:
        if lo == 1:
            gci = (b, TOP, a)
            if gci not in out.conj_gcis and a != b:
                out.conj_gcis.append(gci)
        else:
            out.atomic_conds.append((a, b, lo, hi))
    return out


def saturate_classical(nkb: NormalKb, trace: list | None = None) -> CompletionState:
    """Least fixpoint of the three completion rules over ``nkb``'s names."""
    names = list(nkb.names) + [TOP]
    state = CompletionState()
    subs = state.subsumers
    for a in names:
        subs.add((a, a))
        subs.add((a, TOP))
    by_conj: dict = {}
    for a1, a2, b in nkb.conj_gcis:
        by_conj.setdefault(a1, []).append((a2, b))
        if a2 != a1:
            by_conj.setdefault(a2, []).append((a1, b))
    by_exists: dict = {}
    for a, r, b in nkb.exist_right:
        by_exists.setdefault(a, []).append((r, b))
    by_left: dict = {}
    for r, a, b in nkb.exist_left:
        by_left.setdefault((r, a), []).append(b)

    def note(rule, premises, produced):
        if trace is not None:
            trace.append((rule, premises, produced))

    changed = True
    while changed:
        changed = False
        for x, a in list(subs):
            for other, b in by_conj.get(a, ()):
                if (x, other) in subs and (x, b) not in subs:
                    subs.add((x, b))
                    note("C1", [(x, a), (x, other)], (x, b))
                    changed = True
            for r, b in by_exists.get(a, ()):
                if (x, r, b) not in state.links:
                    state.links.add((x, r, b))
                    note("C2", [(x, a)], (x, r, b))
                    changed = True
        for x, r, y in list(state.links):
            for y2, a in list(subs):
                if y2 != y:
                    continue
                for b in by_left.get((r, a), ()):
                    if (x, b) not in subs:
                        subs.add((x, b))
                        note("C3", [(x, r, y), (y, a)], (x, b))
                        changed = True
    return state


def propagate_bounds(nkb: NormalKb, state: CompletionState, trace: list | None = None) -> CompletionState:
    """Fill ``state.lower`` by applying the largest pending bound update first."""
    names = list(nkb.names)
    lower = {a: Fraction(0) for a in names}
    lower[TOP] = Fraction(1)
    # rules keyed by the name whose bound feeds them
    feeds: dict = {}
    for a, b, lo, _ in nkb.atomic_conds:
        feeds.setdefault(b, []).append(("L1", a, (a, b, lo)))
    for a1, a2, b in nkb.conj_gcis:
        feeds.setdefault(a1, []).append(("L2", b, (a1, a2, b)))
        feeds.setdefault(a2, []).append(("L2", b, (a1, a2, b)))
    for b, a in state.subsumers:
        if a != b:
            feeds.setdefault(b, []).append(("L3", a, (b, a)))

    def candidate(rule, data):
        if rule == "L1":
            a, b, lo = data
            return lo * lower[b]
        if rule == "L2":
            a1, a2, _ = data
            return lower[a1] + lower[a2] - 1
        b, _ = data
        return lower[b]

    heap: list = []

    def push_from(source):
        for rule, target, data in feeds.get(source, ()):
            value = candidate(rule, data)
            if value > lower[target]:
                heapq.heappush(heap, (-value, target, rule, data))

    push_from(TOP)
    finalized: set = set()
    while heap:
        neg, target, rule, data = heapq.heappop(heap)
        value = -neg
        if value <= lower[target]:
            continue
        if target in finalized:
            raise StatelError(f"bound of {target} changed twice")  # ruled out by the update order
        finalized.add(target)
        lower[target] = value
        if trace is not None:
            trace.append((rule, data, target, value))
        push_from(target)
    if len(finalized) > len(names) + 1:
        raise StatelError("bound propagation exceeded one update per name")
    state.lower = lower
    return state


def necessity_bound(kb: KnowledgeBase, c: Concept, trace: list | None = None) -> Fraction:
    """Largest ``m`` such that ``(c | top)[m, 1]`` follows from the open-minded ``kb``."""
    bad = [k for k in kb.conditionals if k.upper < 1]
    if bad:
        raise NotOpenMinded([str(k) for k in bad])
    nkb, (atom,) = normalize_with(kb, c)
    nkb = check_open_minded(nkb)
    classical: list | None = [] if trace is not None else None
    state = saturate_classical(nkb, classical)
    propagate_bounds(nkb, state, trace)
    if trace is not None:
        trace[:0] = classical
    return state.lower[atom]


def is_m_necessary(kb: KnowledgeBase, c: Concept, m) -> bool:
    return Fraction(m) <= necessity_bound(kb, c)
