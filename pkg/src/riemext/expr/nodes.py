"""Tree view of canonical expressions.

The canonical store is a reduced fraction; this module presents it as the
usual node kinds (const, var, sum, product, power, exp) for printing, JSON
dumps and structural inspection.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .core import ONE_MONO, Expression, mono_sort_key

KIND_ORDER = {"const": 0, "var": 1, "power": 2, "exp": 3, "product": 4, "sum": 5}


@dataclass(frozen=True)
class Node:
    kind: str
    args: tuple = ()
    value: Any = None  # Fraction for const, name for var, exponent for power

    def to_json(self) -> dict:
        if self.kind == "const":
            return {"kind": "const", "value": _qtext(self.value)}
        if self.kind == "var":
            return {"kind": "var", "name": self.value}
        if self.kind == "power":
            return {"kind": "power", "base": self.args[0].to_json(), "exponent": self.value}
        if self.kind == "exp":
            return {"kind": "exp", "arg": self.args[0].to_json()}
        return {"kind": self.kind, "args": [a.to_json() for a in self.args]}


def _qtext(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def sorted_terms(num: dict) -> list:
    return sorted(num.items(), key=lambda mc: mono_sort_key(mc[0]))


def term_node(coef: Fraction, mono) -> Node:
    powers, earg = mono
    parts = []
    for name, k in powers:
        v = Node("var", value=name)
        parts.append(v if k == 1 else Node("power", (v,), k))
    if earg is not None:
        parts.append(Node("exp", (to_node(earg),)))
    if coef != 1 or not parts:
        parts.insert(0, Node("const", value=coef))
    return parts[0] if len(parts) == 1 else Node("product", tuple(parts))


def poly_node(num: dict) -> Node:
    if not num:
        return Node("const", value=Fraction(0))
    terms = [term_node(c, m) for m, c in sorted_terms(num)]
    return terms[0] if len(terms) == 1 else Node("sum", tuple(terms))


def to_node(e: Expression) -> Node:
    num, den = e.numerator_terms, e.denominator_factors
    if not den:
        return poly_node(num)
    parts = []
    if len(num) == 1 and ONE_MONO in num:
        if num[ONE_MONO] != 1:
            parts.append(Node("const", value=num[ONE_MONO]))
    else:
        n = poly_node(num)
        parts.extend(n.args if n.kind == "product" else (n,))
    for f, k in den:
        parts.append(Node("power", (poly_node(f.poly),), -k))
    return parts[0] if len(parts) == 1 else Node("product", tuple(parts))


def from_json(obj: dict) -> Expression:
    from .core import Const, Exp, Power, Product, Sum, Var

    kind = obj["kind"]
    if kind == "const":
        return Const(Fraction(obj["value"]))
    if kind == "var":
        return Var(obj["name"])
    if kind == "power":
        return Power(from_json(obj["base"]), int(obj["exponent"]))
    if kind == "exp":
        return Exp(from_json(obj["arg"]))
    if kind == "sum":
        return Sum(*(from_json(a) for a in obj["args"]))
    if kind == "product":
        return Product(*(from_json(a) for a in obj["args"]))
    raise ValueError(f"unknown node kind {kind!r}")
