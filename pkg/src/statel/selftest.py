"""Bundled regression fixtures built from the worked examples."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import fixtures
from .model import is_model, midpoint_model, ratio
from .necessity import necessity_bound
from .oracle import DnfFormula, Witness, dnf_valid, oracle_consistent, oracle_ratios, reduce_3dnf
from .parser import parse_concept, parse_conditional, parse_kb, parse_query
from .reasoner import IntervalResult, check_consistency, l_entails, p_entail


@dataclass(frozen=True)
class Fixture:
    name: str
    kind: str  # consistency | entail | pentail | necessity | oracle-witness | oracle-ratio | midpoint | reduce
    kb: str = ""
    arg: str = ""
    expect: object = None


FIXTURES = (
    Fixture("flu-consistent", "consistency", fixtures.FLU, expect="consistent"),
    Fixture(
        "flu-rare-fever-inconsistent",
        "consistency",
        fixtures.FLU + "cond exists has.Fever | top [0, 1/200]\n",
        expect="inconsistent",
    ),
    Fixture("flu-fever-at-least-9-in-1000", "entail", fixtures.FLU, "exists has.Fever | top [9/1000, 1]", "entailed"),
    Fixture("flu-fever-not-1-in-100", "entail", fixtures.FLU, "exists has.Fever | top [1/100, 1]", "not-entailed"),
    Fixture("birds-penguin-interval", "pentail", fixtures.BIRDS, "P | B", ("0", "3/20", True, True)),
    Fixture("continuity-loose", "pentail", fixtures.CONTINUITY, "A | top", (None, "1", None, None)),
    Fixture("continuity-tight", "pentail", fixtures.CONTINUITY_TIGHT, "A | top", ("0", "0", None, None)),
    Fixture("k1-inconsistent", "consistency", fixtures.K1, expect="inconsistent"),
    Fixture("k1-entails-empty-top", "entail", fixtures.K1, "top | top [0, 0]", "entailed"),
    Fixture("related-work-consistent", "consistency", fixtures.RELATED_WORK, expect="consistent"),
    Fixture("related-work-everything-in-c", "entail", fixtures.RELATED_WORK, "C | top [1, 1]", "entailed"),
    Fixture("related-work-oracle-size-4", "oracle-witness", fixtures.RELATED_WORK, "4", 4),
    Fixture("roles-necessity-zero", "necessity", fixtures.ROLES, "A", "0"),
    Fixture("roles-oracle-quarter", "oracle-ratio", fixtures.ROLES, "A | top", "1/4"),
    Fixture("penguin-midpoint", "midpoint", fixtures.BIRDS, "P | B", "3/40"),
    Fixture("interacting-existentials-inconsistent", "consistency", fixtures.INTERACTING_EXISTENTIALS, expect="inconsistent"),
    Fixture("reduce-valid", "reduce", "", "x x x;!x !x !x", "inconsistent"),
    Fixture("reduce-not-valid", "reduce", "", "x y z", "consistent"),
)


def _frac(text):
    return None if text is None else Fraction(text)


def run_fixture(f: Fixture) -> tuple[bool, str]:
    kb = parse_kb(f.kb)
    if f.kind == "consistency":
        got = check_consistency(kb).status
        return got == f.expect, got
    if f.kind == "entail":
        got = l_entails(kb, parse_conditional(f.arg)).status
        return got == f.expect, got
    if f.kind == "pentail":
        result = p_entail(kb, parse_query(f.arg))
        if not isinstance(result, IntervalResult):
            return False, result.status
        iv = result.interval
        lo, hi, lo_att, hi_att = f.expect
        ok = (lo is None or iv.lo == _frac(lo)) and (hi is None or iv.hi == _frac(hi))
        ok &= lo_att is None or iv.lo_attained == lo_att
        ok &= hi_att is None or iv.hi_attained == hi_att
        for w in (result.lo_witness, result.hi_witness):
            ok &= w is None or is_model(w, kb)
        return ok, f"[{iv.lo}, {iv.hi}] attained={iv.lo_attained},{iv.hi_attained}"
    if f.kind == "necessity":
        got = necessity_bound(kb, parse_concept(f.arg))
        return got == _frac(f.expect), str(got)
    if f.kind == "oracle-witness":
        out = oracle_consistent(kb, int(f.arg), budget=2**29)
        ok = isinstance(out, Witness) and out.model.domain_size == f.expect and is_model(out.model, kb)
        return ok, type(out).__name__
    if f.kind == "oracle-ratio":
        got = oracle_ratios(kb, parse_query(f.arg), 4)
        return got.min is not None and got.min <= _frac(f.expect), f"min {got.min}"
    if f.kind == "midpoint":
        i0, i1 = fixtures.penguin_models()
        q = parse_query(f.arg)
        m = midpoint_model(kb, i0, i1, q)
        got = ratio(m, q)
        return got == _frac(f.expect) and is_model(m, kb), str(got)
    if f.kind == "reduce":
        formula = DnfFormula.of(*f.arg.split(";"))
        got = check_consistency(reduce_3dnf(formula)).status
        return got == f.expect and (got == "inconsistent") == dnf_valid(formula), got
    raise ValueError(f"unknown fixture kind {f.kind!r}")


def run_all(selected=FIXTURES):
    for f in selected:
        try:
            ok, detail = run_fixture(f)
        except Exception as exc:  # a crashing fixture is a failing fixture
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        yield f, ok, detail


__all__ = ["FIXTURES", "Fixture", "run_all", "run_fixture"]
