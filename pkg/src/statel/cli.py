"""``statel`` command line: JSON answers on stdout, diagnostics on stderr.

Exit status is 0 for any computed answer, 2 for usage, parse and input
errors, 3 when a size, pivot or enumeration limit is hit.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from fractions import Fraction

from .errors import CapacityExceeded, KbInconsistent, StatelError
from .model import approach_ratio, is_model, midpoint_model, ratio
from .necessity import necessity_bound
from .normalize import normalize
from .oracle import oracle_consistent, oracle_ratios, parse_dnf, reduce_3dnf, role_free_ratios
from .parser import (
    parse_concept,
    parse_conditional,
    parse_kb,
    parse_model,
    parse_number,
    parse_query,
    render_concept,
    render_fraction,
    render_kb,
    render_result,
)
from .reasoner import check_consistency, l_entails, p_entail

EXIT_OK, EXIT_USAGE, EXIT_CAPACITY = 0, 2, 3


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8", newline="") as fh:
        return fh.read()


def _kb(path: str):
    return parse_kb(_read(path))


def _fraction(text: str) -> Fraction:
    try:
        return parse_number(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _cmd_check(args):
    kb = _kb(args.kb)
    return check_consistency(kb)


def _cmd_entail(args):
    kb = _kb(args.kb)
    return l_entails(kb, parse_conditional(args.cond), independence=not args.no_independence)


def _cmd_pentail(args):
    kb = _kb(args.kb)
    try:
        return p_entail(kb, parse_query(args.query), independence=not args.no_independence)
    except KbInconsistent:
        return {"status": "inconsistent"}


def _render_trace(trace) -> list:
    out = []
    for step in trace:
        rule = step[0]
        if rule.startswith("C"):
            _, premises, produced = step
            out.append({"rule": rule, "premises": [list(p) for p in premises], "produced": list(produced)})
        else:
            _, data, target, value = step
            premise = [render_fraction(x) if isinstance(x, Fraction) else x for x in data]
            out.append({"rule": rule, "premises": premise, "target": target, "value": render_fraction(value)})
    return out


def _cmd_necessity(args):
    kb = _kb(args.kb)
    trace: list | None = [] if args.trace else None
    bound = necessity_bound(kb, parse_concept(args.concept), trace)
    out = {"status": "bound", "bound": render_fraction(bound)}
    if args.m is not None:
        out["necessary"] = args.m <= bound
    if trace is not None:
        out["trace"] = _render_trace(trace)
    return out


def _cmd_normalize(args):
    nkb = normalize(_kb(args.kb))
    return {
        "status": "normal-form",
        "kb": nkb.render(),
        "fresh": {name: render_concept(c) for name, c in nkb.provenance.items()},
    }


def _cmd_oracle(args):
    kb = _kb(args.kb)
    if args.query is None:
        return oracle_consistent(kb, args.max_domain, args.budget)
    q = parse_query(args.query)
    if not (kb.signature | q.signature()).roles:
        return role_free_ratios(kb, q, args.max_domain)
    return oracle_ratios(kb, q, args.max_domain, args.budget)


def _cmd_mix(args):
    kb = _kb(args.kb)
    i0, i1 = parse_model(_read(args.model_a)), parse_model(_read(args.model_b))
    for name, i in (("first", i0), ("second", i1)):
        if not is_model(i, kb):
            raise StatelError(f"the {name} interpretation is not a model of the knowledge base")
    q = parse_query(args.query)
    if args.target is None:
        model, steps = midpoint_model(kb, i0, i1, q), 1
    else:
        model, steps = approach_ratio(kb, i0, i1, q, args.target, args.eps)
    return {
        "status": "model",
        "ratio": render_fraction(ratio(model, q)),
        "steps": steps,
        "witness": model.to_json_obj(),
    }


def _cmd_reduce(args):
    kb = reduce_3dnf(parse_dnf(_read(args.dnf)))
    return {"status": "reduced", "kb": render_kb(kb)}


def _cmd_selftest(args):
    from .selftest import FIXTURES, run_all

    if args.list:
        return {"status": "fixtures", "fixtures": [f.name for f in FIXTURES]}
    cases = []
    for f, ok, detail in run_all():
        print(f"{'PASS' if ok else 'FAIL'} {f.name}: {detail}", file=sys.stderr)
        cases.append({"name": f.name, "passed": ok, "detail": detail})
    passed = all(c["passed"] for c in cases)
    return {"status": "selftest", "passed": passed, "cases": cases}


def build_parser() -> argparse.ArgumentParser:
    def common(p, default):
        # accepted before or after the subcommand
        p.add_argument("--budget", type=int, default=default(None), help="interpretation enumeration budget")
        p.add_argument("--jobs", type=int, default=default(1), help="worker cap (solving is single-threaded)")
        p.add_argument("-v", "--verbose", action="store_true", default=default(False), help="log progress to stderr")

    parser = argparse.ArgumentParser(prog="statel", description="Reasoning for statistical EL knowledge bases.")
    common(parser, lambda x: x)
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help_text, kb=True):
        p = sub.add_parser(name, help=help_text)
        common(p, lambda x: argparse.SUPPRESS)
        if kb:
            p.add_argument("kb", help="knowledge base file, or - for stdin")
        p.set_defaults(func=func)
        return p

    command("check", _cmd_check, "decide consistency")
    p = command("entail", _cmd_entail, "decide l-entailment of a conditional")
    p.add_argument("--cond", required=True, help='conditional, e.g. "C | D [l, u]"')
    p.add_argument("--no-independence", action="store_true", help="skip the connected-restriction shortcut")
    p = command("pentail", _cmd_pentail, "tight interval for a query")
    p.add_argument("--query", required=True, help='query, e.g. "C | D"')
    p.add_argument("--no-independence", action="store_true", help="skip the connected-restriction shortcut")
    p = command("necessity", _cmd_necessity, "lower bound on a concept share (open-minded KBs)")
    p.add_argument("--concept", required=True)
    p.add_argument("--m", type=_fraction, default=None, help="also decide whether the share is at least m")
    p.add_argument("--trace", action="store_true", help="include the rule firings")
    command("normalize", _cmd_normalize, "print the normal form")
    p = command("oracle", _cmd_oracle, "brute-force models or ratios")
    p.add_argument("--query", default=None)
    p.add_argument("--max-domain", type=int, required=True)
    p = command("mix", _cmd_mix, "combine two models", kb=False)
    p.add_argument("model_a")
    p.add_argument("model_b")
    p.add_argument("--kb", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--target", type=_fraction, default=None)
    p.add_argument("--eps", type=_fraction, default=Fraction(1, 100))
    p = command("reduce", _cmd_reduce, "knowledge base for a 3DNF formula", kb=False)
    p.add_argument("dnf")
    p = command("selftest", _cmd_selftest, "run the bundled fixtures", kb=False)
    p.add_argument("--list", action="store_true", help="list fixtures without running them")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    if args.budget is None and os.environ.get("STATEL_BUDGET"):
        args.budget = int(os.environ["STATEL_BUDGET"])
    try:
        result = args.func(args)
    except CapacityExceeded as exc:
        print(f"statel: capacity limit: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (StatelError, OSError) as exc:
        print(f"statel: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(render_result(result))
    if args.command == "selftest" and not getattr(args, "list", False):
        return EXIT_OK if result["passed"] else 1
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
