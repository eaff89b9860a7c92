"""Acceptance criteria, one test each; a PASS/FAIL line per criterion is printed in the summary.

Run alone with ``pytest tests/test_acceptance.py -v`` or as a script.
"""

import itertools
import random
import sys
import time
from fractions import Fraction

import pytest

from statel import fixtures
from statel.concepts import Conditional, Gci, KnowledgeBase, Name, Query, Top
from statel.errors import KbInconsistent
from statel.model import count, is_model, midpoint_model, mix_models, n_copy, ratio
from statel.necessity import necessity_bound
from statel.oracle import DnfFormula, NoModelUpTo, Witness, dnf_valid, oracle_consistent, oracle_ratios, reduce_3dnf
from statel.parser import parse_conditional, parse_kb, parse_query
from statel.reasoner import Consistent, Entailed, Inconsistent, NotEntailed, check_consistency, l_entails, p_entail

ORACLE_BUDGET = 2**29


def report(log, number, title, limit, check):
    start = time.perf_counter()
    try:
        ok, detail = check()
    except Exception as exc:  # logged as a failing line, then re-raised
        ok, detail = False, f"{type(exc).__name__}: {exc}"
        raise
    finally:
        elapsed = time.perf_counter() - start
        ok = ok and elapsed < limit
        log.append(f"{number:>2}. [{'PASS' if ok else 'FAIL'}] {title}: {detail} ({elapsed:.2f}s, limit {limit}s)")
    assert ok, detail
    assert elapsed < limit


# ------------------------------------------------------------------ checks


def flu_consistency():
    flu = fixtures.kb("FLU")
    rare = parse_kb(fixtures.FLU + "cond exists has.Fever | top [0, 1/200]\n")
    first, second = check_consistency(flu), check_consistency(rare)
    ok = isinstance(first, Consistent) and is_model(first.witness, flu) and isinstance(second, Inconsistent)
    return ok, f"{first.status}, then {second.status}"


def flu_entailment():
    kb = fixtures.kb("FLU")
    yes = l_entails(kb, parse_conditional("exists has.Fever | top [9/1000, 1]"))
    no = l_entails(kb, parse_conditional("exists has.Fever | top [1/100, 1]"))
    ok = isinstance(yes, Entailed) and isinstance(no, NotEntailed)
    if ok:
        w = no.counter_witness
        r = ratio(w, parse_query("exists has.Fever | top"))
        ok = is_model(w, kb) and r < Fraction(1, 100)
        return ok, f"9/1000 entailed; 1/100 refuted by a model with share {r}"
    return ok, f"{yes.status}, {no.status}"


def birds_interval():
    kb = fixtures.kb("BIRDS")
    q = parse_query("P | B")
    res = p_entail(kb, q)
    iv = res.interval
    ok = (iv.lo, iv.hi) == (0, Fraction(3, 20)) and iv.lo_attained and iv.hi_attained
    for w, value in ((res.lo_witness, iv.lo), (res.hi_witness, iv.hi)):
        ok = ok and w is not None and is_model(w, kb) and ratio(w, q) == value
    return ok, f"[{iv.lo}, {iv.hi}] attained {iv.lo_attained}/{iv.hi_attained}"


def continuity():
    loose, tight = fixtures.kb("CONTINUITY"), fixtures.kb("CONTINUITY_TIGHT")
    q = parse_query("A | top")
    hi = p_entail(loose, q).interval.hi
    iv = p_entail(tight, q).interval
    ok = isinstance(check_consistency(loose), Consistent) and hi == 1 and (iv.lo, iv.hi) == (0, 0)
    return ok, f"loose hi = {hi}, tight [{iv.lo}, {iv.hi}]"


def k1():
    kb = fixtures.kb("K1")
    a = check_consistency(kb)
    b = l_entails(kb, parse_conditional("top | top [0, 0]"))
    return isinstance(a, Inconsistent) and isinstance(b, Entailed), f"{a.status}; (top | top)[0, 0] {b.status}"


def related_work():
    kb = fixtures.kb("RELATED_WORK")
    a = check_consistency(kb)
    b = l_entails(kb, parse_conditional("C | top [1, 1]"))
    small = oracle_consistent(kb, 4, budget=ORACLE_BUDGET)
    ok = isinstance(a, Consistent) and isinstance(b, Entailed)
    ok = ok and isinstance(small, Witness) and small.model.domain_size == 4 and is_model(small.model, kb)
    size = small.model.domain_size if isinstance(small, Witness) else None
    return ok, f"{a.status}, (C | top)[1, 1] {b.status}, smallest oracle model {size}"


def roles_necessity():
    kb = fixtures.kb("ROLES")
    bound = necessity_bound(kb, Name("A"))
    seen = oracle_ratios(kb, Query(Name("A")), 4)
    ok = bound == 0 and seen.min is not None and seen.min <= Fraction(1, 4)
    return ok, f"bound {bound}, least oracle ratio {seen.min}"


def necessity_equals_lower_end():
    rng = random.Random(8)
    kbs = mismatches = 0
    for _ in range(60):
        kb = fixtures.random_el_kb(rng, n_names=4, n_roles=1, max_gcis=3, max_conds=4, open_minded=True)
        kbs += 1
        for a in "ABCD":
            rules = necessity_bound(kb, Name(a))
            exact = p_entail(kb, Query(Name(a))).interval.lo
            mismatches += rules != exact
    return mismatches == 0, f"{kbs} KBs, {4 * kbs} names, {mismatches} mismatches"


def oracle_agreement():
    rng = random.Random(9)
    contradictions = consistent = 0
    n = 220
    for _ in range(n):
        kb = fixtures.random_el_kb(rng, n_names=3, n_roles=1, max_gcis=3, max_conds=3)
        result = check_consistency(kb)
        found = oracle_consistent(kb, 3, budget=ORACLE_BUDGET)
        if isinstance(result, Consistent):
            consistent += 1
            if not is_model(result.witness, kb):
                contradictions += 1
            elif isinstance(found, NoModelUpTo) and result.witness.domain_size <= 3:
                contradictions += 1
        elif isinstance(found, Witness):
            contradictions += 1
    return contradictions == 0, f"{n} KBs ({consistent} consistent), {contradictions} contradictions"


def all_small_formulas():
    literals = [("x", True), ("x", False), ("y", True), ("y", False)]
    clauses = list(itertools.combinations_with_replacement(literals, 3))
    formulas = [()] + [(c,) for c in clauses] + list(itertools.combinations(clauses, 2))
    wrong = 0
    for cs in formulas:
        f = DnfFormula(tuple(sorted({name for c in cs for name, _ in c})), cs)
        wrong += dnf_valid(f) != isinstance(check_consistency(reduce_3dnf(f)), Inconsistent)
    return wrong == 0, f"{len(formulas)} formulas, {wrong} disagreements"


def combinator_case(rng):
    """Two random interpretations and a KB both satisfy by construction."""
    names, roles = ["A", "B", "C"], ["r"]
    i0 = fixtures.random_interpretation(rng, names, roles, 4)
    i1 = fixtures.random_interpretation(rng, names, roles, 4)
    conds = []
    for _ in range(rng.randint(1, 3)):
        c = fixtures.random_concept(rng, names, roles, 2)
        d = fixtures.random_concept(rng, names, roles, 1) if rng.random() < 0.6 else Top
        rs = [x for x in (ratio(i0, Query(c, d)), ratio(i1, Query(c, d))) if x is not None]
        lo, hi = (min(rs), max(rs)) if rs else (Fraction(0), Fraction(1))
        conds.append(Conditional(c, d, lo, hi))
    tbox = []
    for _ in range(rng.randint(0, 2)):
        g = Gci(fixtures.random_concept(rng, names, roles, 2), fixtures.random_concept(rng, names, roles, 2))
        if is_model(i0, KnowledgeBase((g,))) and is_model(i1, KnowledgeBase((g,))):
            tbox.append(g)
    return KnowledgeBase(tuple(tbox), tuple(conds)), i0, i1


def combinators():
    rng = random.Random(11)
    cases = failures = 0
    for _ in range(600):
        kb, i0, i1 = combinator_case(rng)
        cases += 1
        c = fixtures.random_concept(rng, ["A", "B", "C"], ["r"], 3)
        k = rng.randint(1, 4)
        good = count(n_copy(i0, k), c) == k * count(i0, c)
        good &= is_model(i0, kb) and is_model(i1, kb)
        good &= is_model(mix_models(kb, i0, i1, rng.randint(1, 4), rng.randint(1, 4)), kb)
        q = kb.conditionals[0].query
        r0, r1 = ratio(i0, q), ratio(i1, q)
        if r0 is not None and r1 is not None:
            m = midpoint_model(kb, i0, i1, q)
            good &= ratio(m, q) == (r0 + r1) / 2 and is_model(m, kb)
        failures += not good
    return failures == 0, f"{cases} cases, {failures} failures"


# ------------------------------------------------------------------- tests


def test_01_flu_consistency(acceptance_log):
    report(acceptance_log, 1, "flu KB consistent, rare fever makes it inconsistent", 1, flu_consistency)


def test_02_flu_entailment(acceptance_log):
    report(acceptance_log, 2, "flu fever share entailment", 1, flu_entailment)


def test_03_birds_interval(acceptance_log):
    report(acceptance_log, 3, "penguin share of birds", 5, birds_interval)


def test_04_continuity(acceptance_log):
    report(acceptance_log, 4, "continuity pair", 5, continuity)


def test_05_k1(acceptance_log):
    report(acceptance_log, 5, "contradictory bounds", 1, k1)


def test_06_related_work(acceptance_log):
    report(acceptance_log, 6, "related-work KB", 5, related_work)


def test_07_roles_necessity(acceptance_log):
    report(acceptance_log, 7, "existential forces no share", 10, roles_necessity)


def test_08_necessity_equals_lower_end(acceptance_log):
    report(acceptance_log, 8, "necessity bound equals interval lower end", 60, necessity_equals_lower_end)


def test_09_oracle_agreement(acceptance_log):
    report(acceptance_log, 9, "solver agrees with small-model oracle", 120, oracle_agreement)


def test_10_reduction(acceptance_log):
    report(acceptance_log, 10, "3DNF reduction, two variables, up to two clauses", 60, all_small_formulas)


def test_11_combinators(acceptance_log):
    report(acceptance_log, 11, "model combinators", 30, combinators)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
