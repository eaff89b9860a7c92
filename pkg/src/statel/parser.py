"""Text formats for concepts, knowledge bases, models and results.

KB files hold one statement per line::

    # comment
    gci Flu => exists has.Fever
    cond exists has.Fever | exists has.Flu [0.9, 0.95]

Bounds are written as ``p/q`` or as finite decimals; both are read exactly.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction

from .concepts import (
    And,
    Bottom,
    Concept,
    Conditional,
    Exists,
    Forall,
    Gci,
    KnowledgeBase,
    Name,
    Not,
    Or,
    Query,
    Top,
    _TopType,
)
from .errors import BoundsError, ParseError, SourceSpan
from .model import Interpretation

KEYWORDS = {"top", "bottom", "not", "and", "or", "exists", "forall", "gci", "cond"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<number>\d+/\d+|\d+\.\d*|\.\d+|\d+)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<arrow>=>)
  | (?P<punct>[().|\[\],])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # ident, keyword, number, punct, nl, eof
    text: str
    span: SourceSpan


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(SourceSpan(line, col, 1), f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        value = m.group()
        if kind == "nl":
            tokens.append(Token("nl", value, SourceSpan(line, col, 1)))
            line += 1
            line_start = m.end()
        elif kind == "ident":
            kind = "keyword" if value in KEYWORDS else "ident"
            tokens.append(Token(kind, value, SourceSpan(line, col, len(value))))
        elif kind in ("number", "punct"):
            tokens.append(Token(kind, value, SourceSpan(line, col, len(value))))
        elif kind == "arrow":
            tokens.append(Token("punct", value, SourceSpan(line, col, 2)))
        pos = m.end()
    tokens.append(Token("eof", "", SourceSpan(line, pos - line_start + 1, 0)))
    return tokens


def parse_number(text: str) -> Fraction:
    """Exact rational from ``p/q`` or a finite decimal such as ``0.009``."""
    if "/" in text:
        p, q = text.split("/")
        if int(q) == 0:
            raise ValueError("zero denominator")
        return Fraction(int(p), int(q))
    return Fraction(text)  # Fraction parses decimal strings exactly


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def fail(self, message: str, expected: list[str]):
        t = self.tok
        found = t.text if t.kind not in ("eof", "nl") else ("end of line" if t.kind == "nl" else "end of input")
        raise ParseError(t.span, f"{message}, found {found!r}", expected)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("keyword", "punct") and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}", [repr(text)])
        return self.advance()

    def skip_newlines(self):
        while self.tok.kind == "nl":
            self.advance()

    def concept(self) -> Concept:
        left = self.conj()
        while self.at("or"):
            self.advance()
            left = Or(left, self.conj())
        return left

    def conj(self) -> Concept:
        left = self.unary()
        while self.at("and"):
            self.advance()
            left = And(left, self.unary())
        return left

    def unary(self) -> Concept:
        if self.at("not"):
            self.advance()
            return Not(self.unary())
        if self.at("exists") or self.at("forall"):
            quant = self.advance().text
            if self.tok.kind != "ident":
                self.fail("expected a role name", ["role name"])
            role = self.advance().text
            self.expect(".")
            filler = self.unary()
            return Exists(role, filler) if quant == "exists" else Forall(role, filler)
        return self.primary()

    def primary(self) -> Concept:
        t = self.tok
        if self.at("top"):
            self.advance()
            return Top
        if self.at("bottom"):
            self.advance()
            return Bottom()
        if t.kind == "ident":
            self.advance()
            return Name(t.text)
        if self.at("("):
            self.advance()
            c = self.concept()
            self.expect(")")
            return c
        self.fail("expected a concept", ["concept name", "'top'", "'not'", "'exists'", "'('"])

    def number(self) -> Fraction:
        t = self.tok
        if t.kind != "number":
            self.fail("expected a number", ["p/q", "decimal"])
        self.advance()
        try:
            return parse_number(t.text)
        except (ValueError, ZeroDivisionError):
            raise ParseError(t.span, f"bad number {t.text!r}", ["p/q", "decimal"]) from None

    def bounds(self) -> tuple[Fraction, Fraction, SourceSpan]:
        start = self.expect("[").span
        lo = self.number()
        self.expect(",")
        hi = self.number()
        self.expect("]")
        return lo, hi, start

    def conditional(self) -> Conditional:
        lhs = self.concept()
        self.expect("|")
        rhs = self.concept()
        lo, hi, span = self.bounds()
        if not 0 <= lo <= hi <= 1:
            raise BoundsError(f"{span}: bounds [{lo}, {hi}] violate 0 <= l <= u <= 1")
        return Conditional(lhs, rhs, lo, hi)

    def query(self) -> Query:
        lhs = self.concept()
        if self.at("|"):
            self.advance()
            return Query(lhs, self.concept())
        return Query(lhs, Top)

    def end(self, what: str = "end of input"):
        if self.tok.kind != "eof":
            self.fail("unexpected trailing input", [what])

    def end_line(self):
        if self.tok.kind not in ("nl", "eof"):
            self.fail("unexpected trailing input", ["end of line"])

    def kb(self) -> KnowledgeBase:
        tbox, conds = [], []
        self.skip_newlines()
        while self.tok.kind != "eof":
            if self.at("gci"):
                self.advance()
                sub = self.concept()
                self.expect("=>")
                tbox.append(Gci(sub, self.concept()))
            elif self.at("cond"):
                self.advance()
                conds.append(self.conditional())
            else:
                self.fail("expected a statement", ["'gci'", "'cond'"])
            self.end_line()
            self.skip_newlines()
        return KnowledgeBase(tuple(tbox), tuple(conds))


def parse_concept(text: str) -> Concept:
    p = _Parser(text)
    c = p.concept()
    p.end()
    return c


def parse_query(text: str) -> Query:
    """``C | D``; a bare ``C`` means ``C | top``."""
    p = _Parser(text)
    q = p.query()
    p.end()
    return q


def parse_conditional(text: str) -> Conditional:
    p = _Parser(text)
    k = p.conditional()
    p.end()
    return k


def parse_kb(text: str) -> KnowledgeBase:
    return _Parser(text).kb()


def render_fraction(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _bound(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else render_fraction(x)


def render_concept(c: Concept, level: int = 0) -> str:
    if isinstance(c, _TopType):
        return "top"
    if isinstance(c, Name):
        return c.name
    if isinstance(c, Not):
        return "not " + render_concept(c.arg, 1)
    if isinstance(c, Exists):
        return f"exists {c.role}." + render_concept(c.filler, 1)
    if isinstance(c, And):
        text = render_concept(c.left, 0) + " and " + render_concept(c.right, 1)
        return f"({text})" if level > 0 else text
    raise TypeError(f"not a concept: {c!r}")


def render_conditional(k: Conditional) -> str:
    return f"{render_concept(k.lhs)} | {render_concept(k.rhs)} [{_bound(k.lower)}, {_bound(k.upper)}]"


def render_kb(kb: KnowledgeBase) -> str:
    lines = [f"gci {render_concept(g.sub)} => {render_concept(g.sup)}" for g in kb.tbox]
    lines += [f"cond {render_conditional(k)}" for k in kb.conditionals]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_model(text: str) -> Interpretation:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(SourceSpan(exc.lineno, exc.colno, 1), exc.msg, ["JSON"]) from None
    try:
        return Interpretation.from_json_obj(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(SourceSpan(1, 1, 1), f"malformed model: {exc}", ['{"domain": n, ...}']) from None


def render_model(i: Interpretation) -> str:
    return i.to_json()


def render_result(result) -> str:
    """Canonical JSON for any result object exposing ``to_json_obj``."""
    obj = result.to_json_obj() if hasattr(result, "to_json_obj") else result
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))
