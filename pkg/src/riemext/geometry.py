"""Metric inversion, connections, and the curvature pipeline on any chart.

Index layouts:

* ``Connection.gamma[k, i, j]`` is Γ^k_{ij}.
* ``riemann(c)[l, i, j, k]`` is R^l_{ijk} = ∂_i Γ^l_{jk} − ∂_j Γ^l_{ik}
  + Γ^l_{im} Γ^m_{jk} − Γ^l_{jm} Γ^m_{ik}.
* ``lower_riemann`` gives R_{ijkl} = g_{mk} R^m_{ijl}: the lowered index
  goes to the third slot.
* Covariant derivatives append the differentiation slot last.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from .expr import ONE, ZERO, Expression, derive, esum
from .tensor import (
    DOWN,
    UP,
    Chart,
    IndexedTensor,
    ShapeError,
    SymmetryError,
    contract_product,
    kronecker,
    lower_index,
)


class SingularMetricError(ValueError):
    pass


class RicciConvention(enum.Enum):
    """``standard``: Ric_{jk} = R^a_{ajk}.  ``paper``: its negative.

    The sign-flipped contraction reproduces the worked examples about
    modified Riemann extensions; the classical evolution equations hold
    under the standard one.
    """

    STANDARD = "standard"
    PAPER = "paper"

    @property
    def sign(self) -> int:
        return 1 if self is RicciConvention.STANDARD else -1

    @classmethod
    def parse(cls, value) -> "RicciConvention":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown Ricci convention {value!r}; use 'standard' or 'paper'") from None


# ---------------------------------------------------------------------------
# metric structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MetricStructure:
    chart: Chart
    g: IndexedTensor
    g_inv: IndexedTensor
    det_g: Expression

    @property
    def dim(self) -> int:
        return self.chart.dim

    @cached_property
    def levi_civita(self) -> "Connection":
        return christoffel(self)


def _matrix(t: IndexedTensor) -> list:
    n = t.dim
    return [[t[i, j] for j in range(1, n + 1)] for i in range(1, n + 1)]


def _complexity(e: Expression) -> int:
    return len(e.numerator_terms) + sum(len(f.poly) * k for f, k in e.denominator_factors)


def _gauss_jordan(M: list):
    """Exact inverse and determinant by pivoted Gauss-Jordan elimination."""
    n = len(M)
    A = [row[:] for row in M]
    inv = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    det = ONE
    for col in range(n):
        candidates = [r for r in range(col, n) if not A[r][col].is_zero_canonical()]
        if not candidates:
            raise SingularMetricError("metric determinant is canonically zero")
        piv = min(candidates, key=lambda r: _complexity(A[r][col]))
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            inv[col], inv[piv] = inv[piv], inv[col]
            det = -det
        p = A[col][col]
        det = det * p
        ip = ONE / p
        A[col] = [x * ip for x in A[col]]
        inv[col] = [x * ip for x in inv[col]]
        for r in range(n):
            if r == col:
                continue
            f = A[r][col]
            if f.is_zero_canonical():
                continue
            A[r] = [x - f * y if not y.is_zero_canonical() else x for x, y in zip(A[r], A[col])]
            inv[r] = [x - f * y if not y.is_zero_canonical() else x for x, y in zip(inv[r], inv[col])]
    return inv, det


def invert_metric(g: IndexedTensor) -> MetricStructure:
    """Exact inverse of a symmetric (0,2) tensor."""
    if g.variance != (DOWN, DOWN):
        raise ShapeError("a metric is a (0,2) tensor")
    g.check_symmetry(1, 2)
    n = g.dim
    M = _matrix(g)
    if all(M[i][j].is_zero_canonical() for i in range(n) for j in range(n) if i != j):
        det = ONE
        inv = {}
        for i in range(n):
            if M[i][i].is_zero_canonical():
                raise SingularMetricError("metric determinant is canonically zero")
            det = det * M[i][i]
            inv[(i + 1, i + 1)] = ONE / M[i][i]
        g_inv = IndexedTensor(g.chart, (UP, UP), inv)
    else:
        inv_rows, det = _gauss_jordan(M)
        g_inv = IndexedTensor(
            g.chart, (UP, UP), {(i + 1, j + 1): inv_rows[i][j] for i in range(n) for j in range(n)}
        )
    m = MetricStructure(g.chart, g, g_inv, det)
    check = contract_product(g_inv, g, [(2, 1)])
    if check != kronecker(g.chart):
        raise SingularMetricError("inverse check g^{ik} g_{kj} = δ failed")
    return m


def metric_from_components(chart: Chart, comps: dict) -> MetricStructure:
    """Build a metric from upper-triangle entries ``{(i, j): expr}`` with i <= j."""
    full = {}
    for (i, j), v in comps.items():
        full[(i, j)] = v
        full[(j, i)] = v
    return invert_metric(IndexedTensor(chart, (DOWN, DOWN), full))


# ---------------------------------------------------------------------------
# connections and curvature
# ---------------------------------------------------------------------------

class Connection:
    """Torsion-free affine connection Γ^k_{ij} (symmetric in i, j)."""

    def __init__(self, chart: Chart, gamma: IndexedTensor, levi_civita: bool = False):
        if gamma.variance != (UP, DOWN, DOWN) or gamma.chart != chart:
            raise ShapeError("connection coefficients form a (1,2) array on the chart")
        try:
            gamma.check_symmetry(2, 3)
        except SymmetryError as exc:
            raise SymmetryError(f"connection has torsion: {exc}") from None
        self.chart = chart
        self.gamma = gamma
        self.levi_civita = levi_civita

    @property
    def dim(self) -> int:
        return self.chart.dim

    @cached_property
    def by_upper(self) -> dict:
        """a -> [((i, j), Γ^a_{ij}), ...] over nonzero entries."""
        out: dict = {}
        for (a, i, j), v in self.gamma.items():
            out.setdefault(a, []).append(((i, j), v))
        return out

    @classmethod
    def flat(cls, chart: Chart) -> "Connection":
        return cls(chart, IndexedTensor.zeros(chart, (UP, DOWN, DOWN)))


def christoffel(m: MetricStructure) -> Connection:
    """Levi-Civita connection: Γ^k_{ij} = ½ g^{kl}(∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij})."""
    n, xs = m.dim, m.chart.coords
    dg = {}
    for l in range(1, n + 1):
        for i in range(1, n + 1):
            for j in range(i, n + 1):
                d = derive(m.g[i, j], xs[l - 1])
                if not d.is_zero_canonical():
                    dg[(l, i, j)] = dg[(l, j, i)] = d
    half = ONE / 2
    first = {}
    for l in range(1, n + 1):
        for i in range(1, n + 1):
            for j in range(i, n + 1):
                v = esum((dg.get((i, j, l), ZERO), dg.get((j, i, l), ZERO), -dg.get((l, i, j), ZERO)))
                if not v.is_zero_canonical():
                    first[(l, i, j)] = v * half
    gamma = {}
    for k in range(1, n + 1):
        for i in range(1, n + 1):
            for j in range(i, n + 1):
                v = esum(m.g_inv[k, l] * first[(l, i, j)] for l in range(1, n + 1) if (l, i, j) in first)
                if not v.is_zero_canonical():
                    gamma[(k, i, j)] = gamma[(k, j, i)] = v
    return Connection(m.chart, IndexedTensor._trusted(m.chart, (UP, DOWN, DOWN), gamma), levi_civita=True)


def riemann(c: Connection) -> IndexedTensor:
    """R^l_{ijk} as a (1,3) tensor, antisymmetric in (i, j)."""
    n, xs = c.dim, c.chart.coords
    G = c.gamma
    # Γ^l_{i m} grouped by (l, i) and Γ^m_{jk} grouped by (j, k)
    left: dict = {}
    right: dict = {}
    for (a, i, m), v in G.items():
        left.setdefault((a, i), []).append((m, v))
        right.setdefault((i, m), []).append((a, v))
    comps = {}
    for l in range(1, n + 1):
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                for k in range(1, n + 1):
                    terms = [derive(G[l, j, k], xs[i - 1]), -derive(G[l, i, k], xs[j - 1])]
                    rjk = dict(right.get((j, k), ()))
                    rik = dict(right.get((i, k), ()))
                    for m, v in left.get((l, i), ()):
                        if m in rjk:
                            terms.append(v * rjk[m])
                    for m, v in left.get((l, j), ()):
                        if m in rik:
                            terms.append(-(v * rik[m]))
                    val = esum(terms)
                    if not val.is_zero_canonical():
                        comps[(l, i, j, k)] = val
                        comps[(l, j, i, k)] = -val
    return IndexedTensor._trusted(c.chart, (UP, DOWN, DOWN, DOWN), comps)


def lower_riemann(riem: IndexedTensor, m: MetricStructure) -> IndexedTensor:
    """R_{ijkl} = g_{mk} R^m_{ijl} (lowered index placed third)."""
    return lower_index(riem, 1, m, target=3)


def ricci(
    riem: IndexedTensor,
    conv: RicciConvention = RicciConvention.STANDARD,
    check_symmetric: bool = False,
) -> IndexedTensor:
    """Ric_{jk} = sign · Σ_a R^a_{ajk}; sign is −1 in the paper convention."""
    conv = RicciConvention.parse(conv)
    groups: dict = {}
    for (a, b, j, k), v in riem.items():
        if a == b:
            groups.setdefault((j, k), []).append(v)
    comps = {}
    for key, vs in groups.items():
        s = esum(vs)
        comps[key] = s if conv.sign == 1 else -s
    ric = IndexedTensor._trusted(riem.chart, (DOWN, DOWN), comps)
    if check_symmetric:
        ric.check_symmetry(1, 2)
    return ric


def scalar_curvature(m: MetricStructure, ric: IndexedTensor) -> Expression:
    return esum(m.g_inv[j, k] * v for (j, k), v in ric.items())


def covariant_derivative(c: Connection, T: IndexedTensor) -> IndexedTensor:
    """∇_m T_{i1..ik} with the derivative slot appended last."""
    if any(v != DOWN for v in T.variance):
        raise ShapeError("covariant_derivative expects a fully covariant tensor")
    if T.chart != c.chart:
        raise ShapeError("tensor and connection live on different charts")
    n, xs, k = c.dim, c.chart.coords, T.rank
    groups: dict = {}
    for idx, v in T.items():
        for mm in range(1, n + 1):
            d = derive(v, xs[mm - 1])
            if not d.is_zero_canonical():
                groups.setdefault(idx + (mm,), []).append(d)
    by_upper = c.by_upper
    for idx, v in T.items():
        for s in range(k):
            for (i, mm), gam in by_upper.get(idx[s], ()):
                new = idx[:s] + (i,) + idx[s + 1:] + (mm,)
                groups.setdefault(new, []).append(-(gam * v))
    comps = {key: esum(vs) for key, vs in groups.items()}
    return IndexedTensor._trusted(c.chart, (DOWN,) * (k + 1), comps)


def laplacian(m: MetricStructure, c: Connection, T: IndexedTensor) -> IndexedTensor:
    """ΔT = g^{kl} ∇_l ∇_k T, contracting the two appended slots."""
    r = T.rank
    d2 = covariant_derivative(c, covariant_derivative(c, T))
    return contract_product(d2, m.g_inv, [(r + 1, 1), (r + 2, 2)])


def scalar_tensor(chart: Chart, value) -> IndexedTensor:
    return IndexedTensor.scalar(chart, value)


# ---------------------------------------------------------------------------
# bundled curvature of a metric
# ---------------------------------------------------------------------------

class Curvature:
    """Lazily computed curvature quantities of one metric under one convention."""

    def __init__(self, metric: MetricStructure, conv: RicciConvention = RicciConvention.STANDARD,
                 connection: Optional[Connection] = None):
        self.metric = metric
        self.conv = RicciConvention.parse(conv)
        self._connection = connection

    @cached_property
    def connection(self) -> Connection:
        return self._connection if self._connection is not None else self.metric.levi_civita

    @cached_property
    def riemann(self) -> IndexedTensor:
        return riemann(self.connection)

    @cached_property
    def riemann04(self) -> IndexedTensor:
        return lower_riemann(self.riemann, self.metric)

    @cached_property
    def ricci(self) -> IndexedTensor:
        return ricci(self.riemann, self.conv, check_symmetric=self.connection.levi_civita)

    @cached_property
    def scalar(self) -> Expression:
        return scalar_curvature(self.metric, self.ricci)
