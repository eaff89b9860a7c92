"""Exception hierarchy shared by all statel modules."""

from __future__ import annotations

from dataclasses import dataclass


class StatelError(Exception):
    """Base class for every error raised by statel."""


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 1

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class ParseError(StatelError):
    def __init__(self, span: SourceSpan, message: str, expected: list[str] | None = None):
        self.span = span
        self.message = message or "syntax error"
        self.expected = list(expected or [])
        text = f"{span}: {self.message}"
        if self.expected:
            text += f" (expected {', '.join(self.expected)})"
        super().__init__(text)


class BoundsError(StatelError):
    """Conditional bounds violate 0 <= lower <= upper <= 1."""


class NotInElFragment(StatelError):
    """A concept uses negation, so only the brute-force oracle can handle it."""


class NotDeterministic(StatelError):
    """A conditional with bounds other than [1, 1] cannot become a GCI."""


class NotOpenMinded(StatelError):
    def __init__(self, offending):
        self.offending = list(offending)
        super().__init__(
            "conditionals with upper bound < 1: " + "; ".join(str(k) for k in self.offending)
        )


class CapacityExceeded(StatelError):
    """A configured size, pivot or enumeration limit was hit."""


class DenominatorEmpty(StatelError):
    """The conditioning concept of a query has no instances in a model."""


class TargetOutOfRange(StatelError):
    """Requested ratio lies outside the interval spanned by two models."""


class ScaleClassViolation(StatelError):
    """A constraint row is not homogeneous or scale robust."""


class KbInconsistent(StatelError):
    """The knowledge base has no model."""
