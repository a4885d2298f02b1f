"""Algebra of proof-expressions.

Finite proof trees with set application, infinite rule-described elements
(modus ponens, group reduction operators, the combinators K and S),
propositional closure, group-term normalization and a compiler from
applicative expressions to combinators.
"""

from .core import (
    EMPTY,
    Arrow,
    CanonSet,
    Leaf,
    ParseError,
    ProofExpr,
    apply_fin,
    canonicalize,
    format_expr,
    format_set,
    parse_expr,
    parse_set,
    rank,
    root,
)
from .intensional import Element, Ext, Int, RuleFamily, apply, close, member, union

__version__ = "0.1.0"

__all__ = [
    "EMPTY",
    "Arrow",
    "CanonSet",
    "Element",
    "Ext",
    "Int",
    "Leaf",
    "ParseError",
    "ProofExpr",
    "RuleFamily",
    "apply",
    "apply_fin",
    "canonicalize",
    "close",
    "format_expr",
    "format_set",
    "member",
    "parse_expr",
    "parse_set",
    "rank",
    "root",
    "union",
]
