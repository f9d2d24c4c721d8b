"""Point evaluation and three-valued zero testing."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

import mpmath

from .core import Expression, ExprLike, to_expr

DEFAULT_TRIALS = 8
DEFAULT_THRESHOLD = 1e-9
SAMPLE_RADIUS = 10
SAMPLE_MAX_DENOMINATOR = 64


class UnboundSymbolError(KeyError):
    pass


class SingularPointError(ZeroDivisionError):
    pass


def _eval_poly(num: Mapping, point: Mapping, ctx):
    """Sum of terms; exact Fraction unless an exp kernel appears (then mpf)."""
    total = Fraction(0)
    for (powers, earg), c in num.items():
        v = c
        for name, k in powers:
            v *= point[name] ** k
        if earg is not None:
            v = ctx.mpf(v.numerator) / v.denominator * ctx.exp(_eval(earg, point, ctx))
        total = total + v
    return total


def _eval(e: Expression, point: Mapping, ctx):
    top = _eval_poly(e.numerator_terms, point, ctx)
    for f, k in e.denominator_factors:
        d = _eval_poly(f.poly, point, ctx)
        if d == 0:
            raise SingularPointError(f"denominator {f.as_expr()} vanishes at {_fmt_point(point)}")
        top = top / d**k
    return top


def _fmt_point(point: Mapping) -> str:
    return "{" + ", ".join(f"{k}={v}" for k, v in sorted(point.items())) + "}"


def eval_at(e: ExprLike, point: Mapping[str, Union[int, Fraction]]) -> Union[Fraction, float]:
    """Value of ``e`` at ``point``.

    Exact Fraction when no exponential kernel is present; otherwise a float
    computed with 40 significant digits internally.
    """
    e = to_expr(e)
    missing = e.free_symbols() - point.keys()
    if missing:
        raise UnboundSymbolError(f"unbound symbols: {', '.join(sorted(missing))}")
    pt = {k: Fraction(v) for k, v in point.items()}
    if not e.has_exp():
        return _eval(e, pt, None)
    with mpmath.workdps(40):
        return float(_eval(e, pt, mpmath.mp))


def eval_float(e: ExprLike, point: Mapping[str, float]) -> float:
    """Floating evaluation at a real point (used by finite-difference oracles)."""
    e = to_expr(e)
    pt = {k: mpmath.mpf(v) for k, v in point.items()}
    with mpmath.workdps(30):

        def poly(num):
            total = mpmath.mpf(0)
            for (powers, earg), c in num.items():
                v = mpmath.mpf(c.numerator) / c.denominator
                for name, k in powers:
                    v *= pt[name] ** k
                if earg is not None:
                    v *= mpmath.exp(poly_e(earg))
                total += v
            return total

        def poly_e(x):
            top = poly(x.numerator_terms)
            for f, k in x.denominator_factors:
                top /= poly(f.poly) ** k
            return top

        return float(poly_e(e))


class Verdict(enum.Enum):
    ZERO = "zero"
    NONZERO = "nonzero"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class ZeroVerdict:
    verdict: Verdict
    witness: Optional[dict] = None
    value: Optional[float] = None
    where: Optional[tuple] = field(default=None, compare=False)

    @property
    def is_zero(self) -> bool:
        return self.verdict is Verdict.ZERO

    def __bool__(self) -> bool:  # truthiness = "verified zero"
        return self.is_zero

    def witness_json(self):
        if self.witness is None:
            return None
        out = {"point": {k: str(v) for k, v in sorted(self.witness.items())}, "value": self.value}
        if self.where is not None:
            out["component"] = list(self.where)
        return out


ZERO_VERDICT = ZeroVerdict(Verdict.ZERO)


def random_point(symbols: Iterable[str], rng: random.Random) -> dict:
    out = {}
    for s in sorted(symbols):
        q = rng.randint(1, SAMPLE_MAX_DENOMINATOR)
        out[s] = Fraction(rng.randint(-SAMPLE_RADIUS * q, SAMPLE_RADIUS * q), q)
    return out


def is_zero(
    e: ExprLike,
    trials: int = DEFAULT_TRIALS,
    threshold: float = DEFAULT_THRESHOLD,
    rng: Optional[random.Random] = None,
    seed: int = 0,
) -> ZeroVerdict:
    """Zero if canonically 0, NonZero with a witness if some sample exceeds
    ``threshold`` in magnitude, Unknown otherwise."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if threshold <= 0:
        raise ValueError("threshold must be > 0")
    e = to_expr(e)
    if e.is_zero_canonical():
        return ZERO_VERDICT
    rng = rng if rng is not None else random.Random(seed)
    symbols = e.free_symbols()
    valid = 0
    for _ in range(10 * trials):
        pt = random_point(symbols, rng)
        try:
            v = eval_at(e, pt)
        except SingularPointError:
            continue
        valid += 1
        if abs(v) > threshold:
            return ZeroVerdict(Verdict.NONZERO, witness=pt, value=float(v))
        if valid >= trials:
            break
    return ZeroVerdict(Verdict.UNKNOWN)


def combine(verdicts: Iterable[ZeroVerdict]) -> ZeroVerdict:
    """Worst verdict of many: any NonZero beats Unknown beats Zero."""
    unknown = None
    for v in verdicts:
        if v.verdict is Verdict.NONZERO:
            return v
        if v.verdict is Verdict.UNKNOWN and unknown is None:
            unknown = v
    return unknown if unknown is not None else ZERO_VERDICT
