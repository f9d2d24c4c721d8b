import itertools
from fractions import Fraction

import pytest

from riemext.curvature_zoo import DimensionError
from riemext.expr import Exp, Var, Verdict, derive, eval_at, parse_expression, substitute
from riemext.extension import extend
from riemext.flow import (
    PreconditionError,
    TimeDependentMetric,
    ZeroScalarCurvatureError,
    b_tensor,
    constant_curvature_solution,
    einstein_families,
    flow_residual,
    flow_rhs,
    hyperbolic_printed_flow_discrepancy,
    is_flow_solution,
    ricci_evolution_residual,
    ricci_evolution_rhs,
    riemann_evolution_residual,
    riemann_evolution_rhs,
    scalar_evolution_residual,
    scalar_evolution_rhs,
    solve_extension_flow,
    theorem_concircular_rate_residual,
    theorem_weyl_conharmonic_rate_residual,
    theorem_weyl_rate_extension,
    theorem_weyl_rate_extension_residual,
    weyl_rate_extension_terms,
)
from riemext.geometry import Curvature, RicciConvention, metric_from_components
from riemext.models import einstein_sphere, hyperbolic, schwarzschild, sphere
from riemext.tensor import DOWN, Chart, IndexedTensor, map_components, tensor_is_zero

P = parse_expression
STD, PAPER = RicciConvention.STANDARD, RicciConvention.PAPER
t = Var("t")


def shrinking_sphere(n):
    return TimeDependentMetric(einstein_sphere(n).g * (1 - 2 * t), "t", STD)


def warped():
    return metric_from_components(Chart(("x", "y", "z")), {(1, 1): P("1"), (2, 2): P("1 + x^2"), (3, 3): P("x^2")})


@pytest.fixture(scope="module")
def hyp_flow():
    return solve_extension_flow(extend(hyperbolic(2), omega_names=("P", "Q")), PAPER)


# --- the flow equation ------------------------------------------------------------

@pytest.mark.parametrize("n", [2, 3])
def test_shrinking_sphere_is_solution(n):
    assert flow_residual(shrinking_sphere(n)).is_zero_canonical()


def test_exponential_scaling_is_not_a_solution():
    # Ric is scale invariant, so ∂_t(e^{−2t} g₀) + 2Ric = −2e^{−2t} g₀ + 2g₀ ≠ 0
    fam = TimeDependentMetric(hyperbolic(2, -1).g * Exp(-2 * t), "t", PAPER)
    v = is_flow_solution(fam)
    assert v.verdict is Verdict.NONZERO and v.witness is not None


def test_einstein_families():
    lam, expo, lin = einstein_families(hyperbolic(3, Fraction(-1, 2)), PAPER)
    assert lam == 1
    assert is_flow_solution(lin)
    assert not is_flow_solution(expo)


def test_non_einstein_rejected():
    with pytest.raises(PreconditionError):
        einstein_families(warped(), STD)


def test_time_symbol_collision():
    ch = Chart(("t", "y"))
    g = metric_from_components(ch, {(1, 1): P("1"), (2, 2): P("1")}).g
    with pytest.raises(ValueError):
        TimeDependentMetric(g, "t")


def test_schwarzschild_is_a_fixed_point():
    assert flow_rhs(schwarzschild(), STD).is_zero_canonical()
    assert flow_rhs(schwarzschild(), PAPER).is_zero_canonical()


# --- constant curvature families -----------------------------------------------------

@pytest.mark.parametrize("n", [2, 3])
def test_constant_curvature_paper_mode(n):
    cc = constant_curvature_solution("hyperbolic_n", n, PAPER)
    assert cc.einstein_constant == 1
    assert cc.family is cc.exponential
    rep = cc.report
    assert rep["exponential-family-solution"].status == "fail"
    assert rep["linear-family-solution"].status == "pass"
    scal = rep["riemann-scaling"]
    assert scal.status == "discrepancy" and scal.data["computed_exponents"] == [-2]


def test_constant_curvature_standard_mode():
    cc = constant_curvature_solution("sphere_n", 3, STD)
    assert cc.family is cc.linear
    assert cc.report["linear-family-solution"].status == "pass"


def test_constant_curvature_unknown_model():
    with pytest.raises(ValueError):
        constant_curvature_solution("torus", 2)


# --- evolution equations -------------------------------------------------------------

def test_b_tensor_constant_curvature():
    # for R_ijkl = K(g_ik g_jl − g_il g_jk): B_ijkl = K²((n−2) g_ij g_kl + g_ik g_jl)
    m = einstein_sphere(3)
    cv = Curvature(m, STD)
    K = Fraction(1, 2)
    B = b_tensor(m, cv.riemann04)
    g = m.g
    for i, j, k, l in itertools.product(range(1, 4), repeat=4):
        assert B[i, j, k, l] == (g[i, j] * g[k, l] + g[i, k] * g[j, l]) * (K * K)


@pytest.mark.parametrize("n", [2, 3])
def test_evolution_equations_on_shrinking_sphere(n):
    fam = shrinking_sphere(n)
    assert riemann_evolution_residual(fam).verdict is Verdict.ZERO
    assert ricci_evolution_residual(fam).verdict is Verdict.ZERO
    assert scalar_evolution_residual(fam).verdict is Verdict.ZERO


def test_evolution_equations_first_variation():
    # g₀ − 2t Ric(g₀) agrees with the flow to first order, so every evolution
    # equation must hold at t = 0 for any g₀
    g0 = warped()
    fam = TimeDependentMetric(g0.g - Curvature(g0, STD).ricci * (2 * t), "t", STD)
    cv = fam.curvature

    def at0(T):
        return map_components(T, lambda e: substitute(e, {"t": 0}))

    assert at0(flow_residual(fam)).is_zero_canonical()
    assert at0(fam.dt(cv.riemann04) - riemann_evolution_rhs(fam)).is_zero_canonical()
    assert at0(fam.dt(cv.ricci) - ricci_evolution_rhs(fam)).is_zero_canonical()
    assert substitute(derive(cv.scalar, "t") - scalar_evolution_rhs(fam), {"t": 0}).is_zero_canonical()
    # negative control: drop the quadratic B terms
    lap_only = at0(fam.dt(cv.riemann04) - riemann_evolution_rhs(fam) + b_tensor(fam.metric, cv.riemann04) * 2)
    assert not tensor_is_zero(lap_only)


def test_evolution_requires_solution():
    bad = TimeDependentMetric(einstein_sphere(3).g * (1 - 4 * t), "t", STD)
    with pytest.raises(PreconditionError):
        riemann_evolution_residual(bad)
    assert riemann_evolution_residual(bad, require_solution=False).verdict is Verdict.NONZERO
    assert scalar_evolution_residual(bad, require_solution=False).verdict is Verdict.NONZERO


def test_evolution_rejects_paper_convention():
    fam = TimeDependentMetric(einstein_sphere(3).g * (1 + 2 * t), "t", PAPER)
    with pytest.raises(PreconditionError):
        scalar_evolution_residual(fam)


# --- rate theorems -------------------------------------------------------------

def test_rate_theorems_on_shrinking_sphere():
    fam = shrinking_sphere(3)
    assert theorem_concircular_rate_residual(fam).verdict is Verdict.ZERO
    assert theorem_weyl_conharmonic_rate_residual(fam).verdict is Verdict.ZERO


def test_rate_theorems_hold_in_paper_convention():
    fam = TimeDependentMetric(hyperbolic(3, Fraction(-1, 2)).g * (1 - 2 * t), "t", PAPER)
    assert theorem_concircular_rate_residual(fam).verdict is Verdict.ZERO
    assert theorem_weyl_conharmonic_rate_residual(fam).verdict is Verdict.ZERO


@pytest.mark.parametrize("fn", [theorem_concircular_rate_residual, theorem_weyl_conharmonic_rate_residual])
def test_rate_theorem_negative_controls(fn):
    for factor in (1 - 4 * t, Exp(-2 * t)):
        bad = TimeDependentMetric(einstein_sphere(3).g * factor, "t", STD)
        v = fn(bad, require_solution=False)
        assert v.verdict is Verdict.NONZERO and v.witness is not None
        with pytest.raises(PreconditionError):
            fn(bad)


def test_rate_theorem_preconditions():
    flat_family = TimeDependentMetric(schwarzschild().g, "t", STD)
    with pytest.raises(ZeroScalarCurvatureError):
        theorem_concircular_rate_residual(flat_family)
    with pytest.raises(DimensionError):
        theorem_weyl_conharmonic_rate_residual(shrinking_sphere(2))


# --- extension flow -----------------------------------------------------------------

def test_extension_flow_bundle(hyp_flow):
    rep = hyp_flow.report
    for name in ("ricci-time-invariant", "flow-solution", "linear-in-time", "scalar-flat", "stays-extension",
                 "lemma-laplacian"):
        assert rep[name].status == "pass", rep.text()
    assert rep["printed-linear-coefficient"].status == "discrepancy"
    assert rep.ok


def test_extension_flow_components(hyp_flow):
    g = hyp_flow.family.g
    assert g[1, 1] == P("-2*Q/y - 4*t/y^2")
    assert g[2, 2] == P("2*Q/y - 4*t/y^2")
    assert g[1, 2] == P("2*P/y")
    assert hyp_flow.c_t[1, 1] == P("-4*t/y^2")
    assert hyperbolic_printed_flow_discrepancy(hyp_flow).status == "discrepancy"


def test_extension_flow_sphere_with_c():
    m = sphere(2)
    c = IndexedTensor(m.chart, (DOWN, DOWN), {(1, 1): P("x"), (1, 2): P("y"), (2, 1): P("y")})
    fl = solve_extension_flow(extend(m, c), STD)
    assert fl.report.ok, fl.report.text()


def test_weyl_rate_on_extension(hyp_flow):
    rep = theorem_weyl_rate_extension(hyp_flow)
    assert rep["starred-ricci-product"].status == "pass"
    assert rep["starred-weyl-rate"].status == "pass"
    assert rep["derived-relation"].status == "pass"
    assert rep["displayed-relation"].status == "discrepancy"
    assert theorem_weyl_rate_extension_residual(hyp_flow).verdict is Verdict.ZERO


def test_weyl_rate_point_value(hyp_flow):
    # at a sample point the Ricci-product term is non-zero, so the two signs really differ
    rate, prod, N = weyl_rate_extension_terms(hyp_flow)
    pt = {"x": 1, "y": 2, "P": 3, "Q": 5, "t": Fraction(1, 7)}
    assert eval_at(prod[1, 2, 2, 1], pt) != 0
    assert eval_at(rate[1, 2, 2, 1] - prod[1, 2, 2, 1] * 2, pt) == 0
