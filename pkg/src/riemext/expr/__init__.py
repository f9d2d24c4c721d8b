"""Exact symbolic scalars: construction, calculus, parsing, printing, zero tests."""

from .core import (
    ONE,
    ZERO,
    Const,
    Exp,
    Expression,
    Power,
    Product,
    Sum,
    Var,
    derive,
    esum,
    normalize,
    substitute,
    to_expr,
)
from .evaluate import (
    SingularPointError,
    UnboundSymbolError,
    Verdict,
    ZeroVerdict,
    combine,
    eval_at,
    eval_float,
    is_zero,
)
from .nodes import Node, from_json, to_node
from .parser import ParseError, parse_expression
from .render import render

__all__ = [
    "ONE", "ZERO", "Const", "Exp", "Expression", "Power", "Product", "Sum", "Var",
    "derive", "esum", "normalize", "substitute", "to_expr",
    "SingularPointError", "UnboundSymbolError", "Verdict", "ZeroVerdict", "combine",
    "eval_at", "eval_float", "is_zero",
    "Node", "from_json", "to_node", "ParseError", "parse_expression", "render",
]
