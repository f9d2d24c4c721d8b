"""Concircular, conharmonic and Weyl tensors, and the linear relation tying them.

All inputs are (0,4) Riemann tensors lowered with ``lower_riemann``; ``n`` is
the concrete chart dimension.
"""

from __future__ import annotations

import random
from typing import Optional

from .expr import Const, Expression, ZeroVerdict, esum
from .geometry import MetricStructure
from .tensor import DOWN, IndexedTensor, tensor_is_zero


class DimensionError(ValueError):
    pass


def _dim(m: MetricStructure, n: Optional[int]) -> int:
    return m.dim if n is None else n


def _build(m: MetricStructure, fn) -> IndexedTensor:
    n = m.dim
    comps = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for k in range(1, n + 1):
                for l in range(1, n + 1):
                    v = fn(i, j, k, l)
                    if not v.is_zero_canonical():
                        comps[(i, j, k, l)] = v
    return IndexedTensor._trusted(m.chart, (DOWN,) * 4, comps)


def metric_bivector(m: MetricStructure, i: int, j: int, k: int, l: int) -> Expression:
    """g_{il} g_{jk} − g_{jl} g_{ik}."""
    g = m.g
    return g[i, l] * g[j, k] - g[j, l] * g[i, k]


def ricci_metric_bracket(m: MetricStructure, ric: IndexedTensor, i: int, j: int, k: int, l: int) -> Expression:
    """g_{jk} R_{il} + g_{il} R_{jk} − g_{ik} R_{jl} − g_{jl} R_{ik}."""
    g = m.g
    return esum((g[j, k] * ric[i, l], g[i, l] * ric[j, k], -(g[i, k] * ric[j, l]), -(g[j, l] * ric[i, k])))


def concircular(m: MetricStructure, riem04: IndexedTensor, scalar_R: Expression,
                n: Optional[int] = None) -> IndexedTensor:
    """C_{ijkl} = R_{ijkl} − R/(n(n−1)) [g_{il}g_{jk} − g_{jl}g_{ik}]."""
    n = _dim(m, n)
    if n < 2:
        raise DimensionError("concircular tensor needs n >= 2")
    coef = scalar_R / (n * (n - 1))
    if coef.is_zero_canonical():
        return riem04
    return _build(m, lambda i, j, k, l: riem04[i, j, k, l] - coef * metric_bivector(m, i, j, k, l))


def conharmonic(m: MetricStructure, riem04: IndexedTensor, ric: IndexedTensor,
                n: Optional[int] = None) -> IndexedTensor:
    """L_{ijkl} = R_{ijkl} − 1/(n−2) [g_{jk}R_{il} + g_{il}R_{jk} − g_{ik}R_{jl} − g_{jl}R_{ik}]."""
    n = _dim(m, n)
    if n <= 2:
        raise DimensionError(f"conharmonic tensor is undefined in dimension {n} (needs n >= 3)")
    coef = Const(1) / (n - 2)
    return _build(m, lambda i, j, k, l: riem04[i, j, k, l] - coef * ricci_metric_bracket(m, ric, i, j, k, l))


def weyl(m: MetricStructure, riem04: IndexedTensor, ric: IndexedTensor, scalar_R: Expression,
         n: Optional[int] = None) -> IndexedTensor:
    """W_{ijkl} = R_{ijkl} − 1/(n−2)(g_{jk}R_{il} − g_{ik}R_{jl} + g_{il}R_{jk} − g_{jl}R_{ik})
    + R/((n−1)(n−2)) (g_{il}g_{jk} − g_{jl}g_{ik})."""
    n = _dim(m, n)
    if n <= 2:
        raise DimensionError(f"Weyl tensor is undefined in dimension {n} (needs n >= 3)")
    c1 = Const(1) / (n - 2)
    c2 = scalar_R / ((n - 1) * (n - 2))
    return _build(
        m,
        lambda i, j, k, l: esum((
            riem04[i, j, k, l],
            -(c1 * ricci_metric_bracket(m, ric, i, j, k, l)),
            c2 * metric_bivector(m, i, j, k, l),
        )),
    )


def linear_relation_residual(C: IndexedTensor, L: IndexedTensor, W: IndexedTensor, R04: IndexedTensor,
                             n: int) -> IndexedTensor:
    """(W − L) + n/(n−2) (C − R), componentwise."""
    if n <= 2:
        raise DimensionError("the relation involves 1/(n-2); needs n >= 3")
    for t in (L, W, R04):
        if t.chart != C.chart:
            raise ValueError("all four tensors must share one chart")
    return (W - L) + (C - R04) * (Const(n) / (n - 2))


def check_linear_relation(C: IndexedTensor, L: IndexedTensor, W: IndexedTensor, R04: IndexedTensor, n: int,
                          trials: int = 8, threshold: float = 1e-9,
                          rng: Optional[random.Random] = None) -> ZeroVerdict:
    return tensor_is_zero(linear_relation_residual(C, L, W, R04, n), trials, threshold, rng)
