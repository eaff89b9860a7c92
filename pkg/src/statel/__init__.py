"""Exact reasoning for statistical EL knowledge bases, with brute-force checks for ALC."""

from .concepts import (
    And,
    Bottom,
    Conditional,
    Exists,
    Forall,
    Gci,
    KnowledgeBase,
    Name,
    Not,
    Or,
    Query,
    Signature,
    Top,
)
from .errors import (
    BoundsError,
    CapacityExceeded,
    DenominatorEmpty,
    KbInconsistent,
    NotDeterministic,
    NotInElFragment,
    NotOpenMinded,
    ParseError,
    ScaleClassViolation,
    SourceSpan,
    StatelError,
    TargetOutOfRange,
)
from .model import Interpretation, is_model, midpoint_model, mix_models, ratio
from .necessity import is_m_necessary, necessity_bound
from .normalize import NormalKb, normalize
from .oracle import oracle_consistent, oracle_ratios, reduce_3dnf
from .parser import parse_concept, parse_conditional, parse_kb, parse_model, parse_query
from .reasoner import Interval, check_consistency, l_entails, p_entail

__version__ = "0.1.0"

from types import ModuleType as _Module

__all__ = [n for n, v in globals().items() if not n.startswith("_") and not isinstance(v, _Module)]
