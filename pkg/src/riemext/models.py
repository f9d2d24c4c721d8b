"""Concrete metrics used throughout the test corpus and the CLI.

All are rational in their coordinates, so canonical forms stay inside the
exp/rational kernel set:

* upper half-space model of hyperbolic space, ``a²/x_n² δ`` with K = −1/a²;
* round sphere in stereographic coordinates, ``4R²/(1+|x|²)² δ`` with K = 1/R²;
* Schwarzschild in coordinates (T, r, u, phi) with u = cos θ, mass parameter m.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from .expr import ONE, Const, Expression, Var, esum
from .geometry import MetricStructure, metric_from_components
from .tensor import Chart


def _coords(n: int, names: Optional[Sequence[str]]) -> tuple:
    if names is not None:
        if len(names) != n:
            raise ValueError(f"need {n} coordinate names, got {len(names)}")
        return tuple(names)
    if n == 2:
        return ("x", "y")
    return tuple(f"x{i}" for i in range(1, n + 1))


def diagonal_metric(chart: Chart, diag: Sequence[Expression]) -> MetricStructure:
    return metric_from_components(chart, {(i + 1, i + 1): d for i, d in enumerate(diag)})


def flat(n: int, names: Optional[Sequence[str]] = None) -> MetricStructure:
    chart = Chart(_coords(n, names))
    return diagonal_metric(chart, [ONE] * n)


def hyperbolic(n: int = 2, curvature=-1, names: Optional[Sequence[str]] = None) -> MetricStructure:
    """Upper half-space metric with constant sectional curvature ``curvature`` < 0."""
    K = Fraction(curvature)
    if K >= 0:
        raise ValueError("hyperbolic model needs negative curvature")
    chart = Chart(_coords(n, names))
    a2 = Const(-1 / K)
    last = Var(chart.coords[-1])
    return diagonal_metric(chart, [a2 / last**2] * n)


def sphere(n: int = 2, curvature=1, names: Optional[Sequence[str]] = None) -> MetricStructure:
    """Stereographic round sphere with constant sectional curvature ``curvature`` > 0."""
    K = Fraction(curvature)
    if K <= 0:
        raise ValueError("sphere model needs positive curvature")
    chart = Chart(_coords(n, names))
    r2 = esum([ONE, *(Var(x) ** 2 for x in chart.coords)])
    conf = Const(4 / K) / r2**2
    return diagonal_metric(chart, [conf] * n)


def einstein_sphere(n: int) -> MetricStructure:
    """Round n-sphere normalised so that the standard Ricci tensor equals g."""
    return sphere(n, Fraction(1, n - 1))


def schwarzschild(mass: str = "m") -> MetricStructure:
    """Schwarzschild exterior with u = cos θ so every entry is rational."""
    chart = Chart(("T", "r", "u", "phi"))
    r, u, m = Var("r"), Var("u"), Var(mass)
    f = 1 - 2 * m / r
    return diagonal_metric(chart, [-f, 1 / f, r**2 / (1 - u**2), r**2 * (1 - u**2)])


MODELS = {
    "flat": flat,
    "hyperbolic": hyperbolic,
    "sphere": sphere,
}
