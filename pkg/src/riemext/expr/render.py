"""Text, LaTeX and JSON rendering of canonical expressions."""

from __future__ import annotations

import json
from fractions import Fraction

from .core import ONE_MONO, Expression
from .nodes import sorted_terms, to_node

FORMATS = ("text", "latex", "json")


def _q(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# -- text ---------------------------------------------------------------------

def _term_text(coef: Fraction, mono) -> str:
    """Unsigned text for one term; the caller places the sign."""
    powers, earg = mono
    parts = [n if k == 1 else f"{n}^{k}" for n, k in powers]
    if earg is not None:
        parts.append(f"exp({_text(earg)})")
    mag = abs(coef)
    if not parts:
        return _q(mag)
    if mag != 1:
        parts.insert(0, _q(mag))
    return "*".join(parts)


def _poly_text(num: dict) -> str:
    if not num:
        return "0"
    out = []
    for i, (m, c) in enumerate(sorted_terms(num)):
        body = _term_text(c, m)
        if i == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


def _text(e: Expression) -> str:
    num, den = e.numerator_terms, e.denominator_factors
    top = _poly_text(num)
    if not den:
        return top
    if len(num) > 1:
        top = f"({top})"
    parts = []
    for f, k in den:
        base = f.single_var if f.single_var is not None else f"({_poly_text(f.poly)})"
        parts.append(base if k == 1 else f"{base}^{k}")
    if len(parts) == 1:
        return f"{top}/{parts[0]}"
    return f"{top}/({'*'.join(parts)})"


# -- latex --------------------------------------------------------------------

def _lq(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else rf"\frac{{{q.numerator}}}{{{q.denominator}}}"


def _latex_name(name: str) -> str:
    if "_" in name:
        head, _, tail = name.partition("_")
        return f"{head}_{{{tail}}}"
    return name


def _term_latex(coef: Fraction, mono) -> str:
    powers, earg = mono
    parts = [_latex_name(n) if k == 1 else f"{_latex_name(n)}^{{{k}}}" for n, k in powers]
    if earg is not None:
        parts.append(f"e^{{{_latex(earg)}}}")
    mag = abs(coef)
    if not parts:
        return _lq(mag)
    if mag != 1:
        parts.insert(0, _lq(mag))
    return " ".join(parts)


def _poly_latex(num: dict) -> str:
    if not num:
        return "0"
    out = []
    for i, (m, c) in enumerate(sorted_terms(num)):
        body = _term_latex(c, m)
        if i == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


def _latex(e: Expression) -> str:
    num, den = e.numerator_terms, e.denominator_factors
    if not den:
        return _poly_latex(num)
    parts = []
    for f, k in den:
        base = _latex_name(f.single_var) if f.single_var is not None else rf"\left({_poly_latex(f.poly)}\right)"
        parts.append(base if k == 1 else f"{base}^{{{k}}}")
    sign = ""
    top_num = num
    if len(num) == 1:
        (m, c), = num.items()
        if c < 0:
            sign, top_num = "-", {m: -c}
    top = _poly_latex(top_num) if top_num != {ONE_MONO: 1} else "1"
    return rf"{sign}\frac{{{top}}}{{{' '.join(parts)}}}"


def render(e: Expression, fmt: str = "text") -> str:
    """Deterministic rendering of a canonical expression."""
    if fmt == "text":
        return _text(e)
    if fmt == "latex":
        return _latex(e)
    if fmt == "json":
        return json.dumps(to_node(e).to_json(), sort_keys=True, separators=(",", ":"))
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
