import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from riemext.expr import Var, eval_float, parse_expression
from riemext.geometry import (
    Connection,
    Curvature,
    RicciConvention,
    SingularMetricError,
    christoffel,
    covariant_derivative,
    invert_metric,
    laplacian,
    metric_from_components,
    riemann,
)
from riemext.models import einstein_sphere, flat, hyperbolic, schwarzschild, sphere
from riemext.tensor import DOWN, UP, Chart, IndexedTensor, SymmetryError, contract_product, kronecker

P = parse_expression
STD, PAPER = RicciConvention.STANDARD, RicciConvention.PAPER


def warped():
    ch = Chart(("x", "y", "z"))
    return metric_from_components(ch, {(1, 1): P("1"), (2, 2): P("1 + x^2"), (3, 3): P("x^2")})


def skew():
    ch = Chart(("x", "y"))
    return metric_from_components(ch, {(1, 1): P("1 + y^2"), (1, 2): P("x/2"), (2, 2): P("2 + x^2")})


CORPUS = {
    "hyperbolic": lambda: hyperbolic(2),
    "sphere2": lambda: sphere(2),
    "sphere3": lambda: einstein_sphere(3),
    "hyperbolic3": lambda: hyperbolic(3, Fraction(-1, 2)),
    "warped": warped,
    "skew": skew,
}


def test_hyperbolic_christoffels():
    G = christoffel(hyperbolic(2)).gamma
    assert G[1, 1, 2] == P("-1/y") and G[1, 2, 1] == P("-1/y")
    assert G[2, 1, 1] == P("1/y")
    assert G[2, 2, 2] == P("-1/y")
    assert G[1, 1, 1].is_zero_canonical() and G[2, 1, 2].is_zero_canonical()


def test_hyperbolic_riemann_closed_form():
    # R^l_ijk = K (δ^l_i g_jk − δ^l_j g_ik) with K = −1
    m = hyperbolic(2)
    R = riemann(m.levi_civita)
    d = kronecker(m.chart)
    for l, i, j, k in itertools.product((1, 2), repeat=4):
        closed = -(d[l, i] * m.g[j, k] - d[l, j] * m.g[i, k])
        assert R[l, i, j, k] == closed
    assert R[1, 2, 1, 2] == P("1/y^2")
    assert R[1, 1, 2, 2] == P("-1/y^2")
    assert R[1, 1, 2, 1].is_zero_canonical()


def test_ricci_conventions_and_scalar():
    m = hyperbolic(2)
    std = Curvature(m, STD)
    pap = Curvature(m, PAPER)
    assert std.ricci[1, 1] == P("-1/y^2") and std.ricci[2, 2] == P("-1/y^2")
    assert pap.ricci[1, 1] == P("1/y^2") and pap.ricci[1, 2].is_zero_canonical()
    assert std.scalar == -2 and pap.scalar == 2


def test_sphere_scalar():
    assert Curvature(sphere(3), STD).scalar == 6
    assert Curvature(einstein_sphere(3), STD).scalar == 3


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_inverse_roundtrip(name):
    m = CORPUS[name]()
    prod = contract_product(m.g_inv, m.g, [(2, 1)])
    assert prod == kronecker(m.chart)


def test_singular_metric_rejected():
    ch = Chart(("x", "y"))
    with pytest.raises(SingularMetricError):
        metric_from_components(ch, {(1, 1): P("x"), (1, 2): P("x"), (2, 2): P("x")})


def test_connection_with_torsion_rejected():
    ch = Chart(("x", "y"))
    gamma = IndexedTensor(ch, (UP, DOWN, DOWN), {(1, 1, 2): P("x")})
    with pytest.raises(SymmetryError):
        Connection(ch, gamma)


def _num_metric(m, pt):
    n = m.dim
    return np.array([[eval_float(m.g[i, j], pt) for j in range(1, n + 1)] for i in range(1, n + 1)])


@pytest.mark.parametrize("name", ["hyperbolic", "sphere3", "warped", "skew"])
def test_christoffel_against_finite_differences(name):
    m = CORPUS[name]()
    G = christoffel(m).gamma
    coords = m.chart.coords
    n = m.dim
    rng = random.Random(3)
    h = 1e-6
    for _ in range(3):
        pt = {c: rng.uniform(0.5, 1.5) for c in coords}
        g = _num_metric(m, pt)
        ginv = np.linalg.inv(g)
        dg = np.zeros((n, n, n))  # dg[k, i, j] = ∂_k g_ij
        for k, c in enumerate(coords):
            hi, lo = dict(pt), dict(pt)
            hi[c] += h
            lo[c] -= h
            dg[k] = (_num_metric(m, hi) - _num_metric(m, lo)) / (2 * h)
        for k, i, j in itertools.product(range(n), repeat=3):
            ref = 0.5 * sum(ginv[k, l] * (dg[i, j, l] + dg[j, i, l] - dg[l, i, j]) for l in range(n))
            got = eval_float(G[k + 1, i + 1, j + 1], pt)
            assert got == pytest.approx(ref, rel=1e-6, abs=1e-7)


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_first_bianchi(name):
    R = riemann(CORPUS[name]().levi_civita)
    n = R.dim
    for l, i, j, k in itertools.product(range(1, n + 1), repeat=4):
        assert (R[l, i, j, k] + R[l, j, k, i] + R[l, k, i, j]).is_zero_canonical()


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_metric_compatibility(name):
    m = CORPUS[name]()
    assert covariant_derivative(m.levi_civita, m.g).is_zero_canonical()


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_riemann04_symmetries(name):
    cv = Curvature(CORPUS[name](), STD)
    R = cv.riemann04
    n = R.dim
    for i, j, k, l in itertools.product(range(1, n + 1), repeat=4):
        assert (R[i, j, k, l] + R[j, i, k, l]).is_zero_canonical()
        assert (R[i, j, k, l] + R[i, j, l, k]).is_zero_canonical()
        assert (R[i, j, k, l] - R[k, l, i, j]).is_zero_canonical()


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_ricci_symmetric(name):
    ric = Curvature(CORPUS[name](), STD).ricci
    n = ric.dim
    for i, j in itertools.product(range(1, n + 1), repeat=2):
        assert ric[i, j] == ric[j, i]


def test_schwarzschild_is_ricci_flat():
    cv = Curvature(schwarzschild(), STD)
    assert cv.ricci.is_zero_canonical()
    assert not cv.riemann.is_zero_canonical()


def test_flat_space_everything_vanishes():
    cv = Curvature(flat(3), STD)
    assert cv.connection.gamma.is_zero_canonical() and cv.riemann.is_zero_canonical()


def test_scalar_laplacian_by_hand():
    # Δf = g^ij(∂_i∂_j f − Γ^k_ij ∂_k f); on the hyperbolic plane Δx = 0 and Δ(y²) = 2y²
    m = hyperbolic(2)
    f = IndexedTensor.scalar(m.chart, Var("x"))
    assert laplacian(m, m.levi_civita, f).value().is_zero_canonical()
    f2 = IndexedTensor.scalar(m.chart, P("y^2"))
    assert laplacian(m, m.levi_civita, f2).value() == P("2*y^2")


def test_invert_metric_diagonal_fast_path():
    m = invert_metric(hyperbolic(2).g)
    assert m.g_inv[1, 1] == P("y^2") and m.g_inv[1, 2].is_zero_canonical()
