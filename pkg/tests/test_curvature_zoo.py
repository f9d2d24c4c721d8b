import random
from fractions import Fraction

import pytest

from riemext.curvature_zoo import (
    DimensionError,
    check_linear_relation,
    concircular,
    conharmonic,
    linear_relation_residual,
    weyl,
)
from riemext.expr import Var, Verdict, parse_expression
from riemext.extension import extend
from riemext.geometry import Curvature, RicciConvention, metric_from_components
from riemext.models import einstein_sphere, flat, hyperbolic, schwarzschild, sphere
from riemext.tensor import Chart, IndexedTensor, contract, raise_index

P = parse_expression
PAPER, STD = RicciConvention.PAPER, RicciConvention.STANDARD


def warped():
    return metric_from_components(Chart(("x", "y", "z")), {(1, 1): P("1"), (2, 2): P("1 + x^2"), (3, 3): P("x^2")})


CORPUS = {
    "sphere3": lambda: einstein_sphere(3),
    "hyperbolic3": lambda: hyperbolic(3, Fraction(-1, 2)),
    "warped": warped,
    "flat4": lambda: flat(4),
    "schwarzschild": schwarzschild,
    "hyperbolic-extension": lambda: extend(hyperbolic(2), omega_names=("P", "Q")).metric,
}


def zoo(m, conv):
    cv = Curvature(m, conv)
    R = cv.riemann04
    return cv, R, concircular(m, R, cv.scalar), conharmonic(m, R, cv.ricci), weyl(m, R, cv.ricci, cv.scalar)


@pytest.mark.parametrize("name", ["sphere3", "hyperbolic3"])
def test_constant_curvature_paper_mode(name):
    # concircular and Weyl vanish on constant curvature in the paper convention
    _, _, C, _, W = zoo(CORPUS[name](), PAPER)
    assert C.is_zero_canonical()
    assert W.is_zero_canonical()


def test_standard_mode_concircular_does_not_vanish():
    _, _, C, _, _ = zoo(einstein_sphere(3), STD)
    assert not C.is_zero_canonical()


@pytest.mark.parametrize("name", ["schwarzschild", "hyperbolic-extension"])
def test_concircular_equals_riemann_when_scalar_flat(name):
    cv, R, C, L, W = zoo(CORPUS[name](), PAPER)
    assert cv.scalar.is_zero_canonical()
    assert C == R


def test_schwarzschild_conharmonic_equals_weyl_equals_riemann():
    _, R, _, L, W = zoo(schwarzschild(), PAPER)
    assert L == R and W == R


@pytest.mark.parametrize("conv", [PAPER, STD])
@pytest.mark.parametrize("name", sorted(CORPUS))
def test_linear_relation(name, conv):
    m = CORPUS[name]()
    _, R, C, L, W = zoo(m, conv)
    assert linear_relation_residual(C, L, W, R, m.dim).is_zero_canonical()


@pytest.mark.parametrize("name", ["warped", "sphere3"])
def test_linear_relation_negative_control(name):
    m = CORPUS[name]()
    _, R, C, L, W = zoo(m, PAPER)
    comps = dict(C.nonzero())
    comps[(1, 2, 1, 2)] = comps.get((1, 2, 1, 2), P("0")) + Var("x") / 1000
    comps[(2, 1, 2, 1)] = comps[(1, 2, 1, 2)]
    bad = IndexedTensor(C.chart, C.variance, comps)
    v = check_linear_relation(bad, L, W, R, m.dim, rng=random.Random(0))
    assert v.verdict is Verdict.NONZERO
    assert v.witness is not None and v.where is not None


def test_weyl_trace_free_in_paper_convention():
    # with R_ijkl = g_mk R^m_ijl, paper-mode Ricci is the trace over slots 2 and 3
    m = warped()
    cv, R, _, _, W = zoo(m, PAPER)
    assert contract(raise_index(R, 2, m), 2, 3) == cv.ricci
    assert contract(raise_index(W, 2, m), 2, 4).is_zero_canonical()
    assert contract(raise_index(W, 2, m), 2, 3).is_zero_canonical()


def test_weyl_formula_not_trace_free_with_standard_ricci():
    m = warped()
    cv, R, _, _, W = zoo(m, STD)
    assert contract(raise_index(W, 2, m), 2, 4) == cv.ricci * 2


def test_dimension_errors():
    m = sphere(2)
    cv = Curvature(m, PAPER)
    R = cv.riemann04
    concircular(m, R, cv.scalar)
    with pytest.raises(DimensionError):
        conharmonic(m, R, cv.ricci)
    with pytest.raises(DimensionError):
        weyl(m, R, cv.ricci, cv.scalar)
    with pytest.raises(DimensionError):
        linear_relation_residual(R, R, R, R, 2)


def test_conharmonic_of_hyperbolic3_by_hand():
    # K = −1/2, n = 3, paper Ric = g.  R_1212 = g_11 R^1_122 = K g_11 g_22 and the
    # bracket is −g_11 R_22 − g_22 R_11 = −2 g_11², so L_1212 = (−1/2 + 2) g_11².
    m = hyperbolic(3, Fraction(-1, 2))
    _, R, _, L, _ = zoo(m, PAPER)
    g11 = m.g[1, 1]
    assert R[1, 2, 1, 2] == -(g11 * g11) / 2
    assert L[1, 2, 1, 2] == g11 * g11 * Fraction(3, 2)
