"""Ricci flow: right-hand sides, exact families, and symbolic residual checks.

Time derivatives are literal componentwise ∂/∂t of tensors computed from
g(t); no evolution equation is assumed when forming a left-hand side.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

from .curvature_zoo import DimensionError, concircular, conharmonic, weyl
from .expr import ONE, Const, Exp, Expression, Var, ZeroVerdict, derive, esum, is_zero, substitute
from .extension import ExtendedSpace, recognize_extension
from .geometry import (
    Curvature,
    MetricStructure,
    RicciConvention,
    covariant_derivative,
    invert_metric,
    laplacian,
)
from .models import einstein_sphere, hyperbolic, sphere
from .report import DISCREPANCY, INFO, SKIPPED, Check, Report
from .tensor import (
    DOWN,
    IndexedTensor,
    contract_product,
    map_components,
    permute,
    raise_index,
    tensor_is_zero,
)


class PreconditionError(ValueError):
    """Input does not meet a stated precondition (distinct from a failed residual)."""


class ZeroScalarCurvatureError(PreconditionError):
    pass


@dataclass(eq=False)
class TimeDependentMetric:
    """A metric family g(x, t) on a chart; ``t`` is not a chart coordinate."""

    g: IndexedTensor
    time: str = "t"
    conv: RicciConvention = RicciConvention.STANDARD

    def __post_init__(self):
        self.conv = RicciConvention.parse(self.conv)
        if self.time in self.g.chart.coords:
            raise ValueError(f"time symbol {self.time!r} collides with a chart coordinate")
        if self.g.variance != (DOWN, DOWN):
            raise ValueError("g(t) must be a (0,2) tensor")

    @property
    def chart(self):
        return self.g.chart

    @property
    def dim(self) -> int:
        return self.g.dim

    @cached_property
    def metric(self) -> MetricStructure:
        return invert_metric(self.g)

    @cached_property
    def curvature(self) -> Curvature:
        return Curvature(self.metric, self.conv)

    def dt(self, t: IndexedTensor) -> IndexedTensor:
        return map_components(t, lambda e: derive(e, self.time))

    def at(self, value) -> IndexedTensor:
        return map_components(self.g, lambda e: substitute(e, {self.time: value}))

    def with_convention(self, conv) -> "TimeDependentMetric":
        return TimeDependentMetric(self.g, self.time, conv)


# ---------------------------------------------------------------------------
# flow equation
# ---------------------------------------------------------------------------

def flow_rhs(m: MetricStructure, conv=RicciConvention.STANDARD) -> IndexedTensor:
    """−2 Ric(m)."""
    return Curvature(m, conv).ricci * (-2)


def flow_residual(tdm: TimeDependentMetric) -> IndexedTensor:
    return tdm.dt(tdm.g) + tdm.curvature.ricci * 2


def is_flow_solution(tdm: TimeDependentMetric, trials: int = 8, threshold: float = 1e-9,
                     rng: Optional[random.Random] = None) -> ZeroVerdict:
    """Verdict on ∂_t g + 2 Ric(g(t)) = 0."""
    return tensor_is_zero(flow_residual(tdm), trials, threshold, rng)


# ---------------------------------------------------------------------------
# evolution equations
# ---------------------------------------------------------------------------

def b_tensor(m: MetricStructure, riem04: IndexedTensor) -> IndexedTensor:
    """B_{ijkl} = g^{pr} g^{qs} R_{piqj} R_{rksl}."""
    up = raise_index(raise_index(riem04, 1, m), 3, m)  # U^r_i^s_j
    return contract_product(up, riem04, [(1, 1), (3, 3)])


def _ricci_action(riem04: IndexedTensor, ric_up: IndexedTensor, slot: int) -> IndexedTensor:
    """g^{pq} R_{..p..} R_{q i_slot}: contract ``slot`` of R with raised Ricci."""
    out = contract_product(riem04, ric_up, [(slot, 1)])
    order = [1, 2, 3]
    order.insert(slot - 1, 4)
    return permute(out, order)


def _scalar_laplacian(m: MetricStructure, cv: Curvature, f: Expression) -> Expression:
    t = IndexedTensor.scalar(m.chart, f)
    return laplacian(m, cv.connection, t).value()


def riemann_evolution_rhs(tdm: TimeDependentMetric) -> IndexedTensor:
    m, cv = tdm.metric, tdm.curvature
    R = cv.riemann04
    B = b_tensor(m, R)
    lap = laplacian(m, cv.connection, R)
    quad = B - permute(B, [1, 2, 4, 3]) - permute(B, [1, 3, 4, 2]) + permute(B, [1, 3, 2, 4])
    ric_up = raise_index(cv.ricci, 1, m)
    act = _ricci_action(R, ric_up, 1) + _ricci_action(R, ric_up, 2) + _ricci_action(R, ric_up, 3) \
        + _ricci_action(R, ric_up, 4)
    return lap + quad * 2 - act


def ricci_evolution_rhs(tdm: TimeDependentMetric) -> IndexedTensor:
    m, cv = tdm.metric, tdm.curvature
    R, Ric = cv.riemann04, cv.ricci
    up = raise_index(raise_index(R, 1, m), 3, m)
    t1 = contract_product(up, Ric, [(1, 1), (3, 2)])
    t2 = contract_product(raise_index(Ric, 1, m), Ric, [(1, 1)])
    return laplacian(m, cv.connection, Ric) + t1 * 2 - t2 * 2


def scalar_evolution_rhs(tdm: TimeDependentMetric) -> Expression:
    m, cv = tdm.metric, tdm.curvature
    Ric = cv.ricci
    ric_uu = raise_index(raise_index(Ric, 1, m), 2, m)
    norm2 = esum(ric_uu[idx] * v for idx, v in Ric.items())
    return _scalar_laplacian(m, cv, cv.scalar) + norm2 * 2


def _require_standard_solution(tdm: TimeDependentMetric, trials, threshold, rng):
    if tdm.conv is not RicciConvention.STANDARD:
        raise PreconditionError("evolution equations are checked under the standard convention")
    v = is_flow_solution(tdm, trials, threshold, rng)
    if not v.is_zero:
        raise PreconditionError(f"family is not a Ricci-flow solution ({v.verdict.value})")


def riemann_evolution_residual(tdm: TimeDependentMetric, require_solution: bool = True, trials: int = 8,
                               threshold: float = 1e-9, rng: Optional[random.Random] = None) -> ZeroVerdict:
    rng = rng if rng is not None else random.Random(0)
    if require_solution:
        _require_standard_solution(tdm, trials, threshold, rng)
    res = tdm.dt(tdm.curvature.riemann04) - riemann_evolution_rhs(tdm)
    return tensor_is_zero(res, trials, threshold, rng)


def ricci_evolution_residual(tdm: TimeDependentMetric, require_solution: bool = True, trials: int = 8,
                             threshold: float = 1e-9, rng: Optional[random.Random] = None) -> ZeroVerdict:
    rng = rng if rng is not None else random.Random(0)
    if require_solution:
        _require_standard_solution(tdm, trials, threshold, rng)
    res = tdm.dt(tdm.curvature.ricci) - ricci_evolution_rhs(tdm)
    return tensor_is_zero(res, trials, threshold, rng)


def scalar_evolution_residual(tdm: TimeDependentMetric, require_solution: bool = True, trials: int = 8,
                              threshold: float = 1e-9, rng: Optional[random.Random] = None) -> ZeroVerdict:
    rng = rng if rng is not None else random.Random(0)
    if require_solution:
        _require_standard_solution(tdm, trials, threshold, rng)
    res = derive(tdm.curvature.scalar, tdm.time) - scalar_evolution_rhs(tdm)
    return is_zero(res, trials, threshold, rng)


# ---------------------------------------------------------------------------
# exact families
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class ExtensionFlow:
    ext: ExtendedSpace
    family: TimeDependentMetric
    ricci0: IndexedTensor
    c_t: Optional[IndexedTensor]
    report: Report


def solve_extension_flow(ext: ExtendedSpace, conv=RicciConvention.PAPER, time: str = "t", trials: int = 8,
                         threshold: float = 1e-9, rng: Optional[random.Random] = None) -> ExtensionFlow:
    """g(t) = ḡ(0) − 2t R̄ with its verification bundle.

    Ric(ḡ) is time independent on extensions, so this is the solution of the
    flow equation through ḡ(0).
    """
    conv = RicciConvention.parse(conv)
    rng = rng if rng is not None else random.Random(0)
    t = Var(time)
    cv0 = ext.curvature(conv)
    ric0 = cv0.ricci
    g_t = ext.metric.g - ric0 * (2 * t)
    tdm = TimeDependentMetric(g_t, time, conv)
    rep = Report("extension-flow", conv.value)

    def add(name, identity, verdict, detail=None):
        return rep.add(Check.from_verdict(name, identity, verdict, detail))

    add("ricci-time-invariant", "Ric(g(t)) = Ric(ḡ(0))",
        tensor_is_zero(tdm.curvature.ricci - ric0, trials, threshold, rng))
    add("flow-solution", "∂_t g + 2 Ric(g(t)) = 0", is_flow_solution(tdm, trials, threshold, rng))
    add("linear-in-time", "∂²g/∂t² = 0", tensor_is_zero(tdm.dt(tdm.dt(g_t)), trials, threshold, rng))
    add("scalar-flat", "R(g(t)) = 0", is_zero(tdm.curvature.scalar, trials, threshold, rng))

    base_ric = ext.base.ricci(conv)
    expected_c = ext.c - (base_ric + _transpose(base_ric)) * (2 * t)
    c_t = recognize_extension(g_t, ext.base.connection)
    if c_t is None:
        rep.add(Check("stays-extension", "g(t) is a modified Riemann extension with c(t) = c(0) − 2t(R + Rᵀ)",
                      "fail", detail="block structure or ω-independence of c(t) fails"))
    else:
        add("stays-extension", "g(t) is a modified Riemann extension with c(t) = c(0) − 2t(R + Rᵀ)",
            tensor_is_zero(c_t - expected_c, trials, threshold, rng))
    add("lemma-laplacian", "Δ R̄_ij = 0 on ḡ(0)",
        tensor_is_zero(laplacian(ext.metric, cv0.connection, ric0), trials, threshold, rng))

    # printed closed form g(t) = R t + g(0)
    printed = TimeDependentMetric(ext.metric.g + ric0 * t, time, conv)
    pv = is_flow_solution(printed, trials, threshold, rng)
    rep.add(Check("printed-linear-coefficient", "g(t) = R̄ t + g(0) (as printed) solves ∂_t g = −2Ric",
                  INFO if pv.is_zero else DISCREPANCY, pv.witness_json(),
                  detail="the flow equation with time-invariant Ricci forces the coefficient −2"
                  if not pv.is_zero else "Ricci-flat: both coefficients give the static family"))
    return ExtensionFlow(ext, tdm, ric0, c_t, rep)


def hyperbolic_printed_flow_discrepancy(flow: ExtensionFlow) -> Check:
    """Compare g_11(t), g_22(t) of the hyperbolic extension flow with the printed
    ``2t/y² − 4Q/y``."""
    ext = flow.ext
    Q = Var(ext.omega[1])
    y = Var(ext.base.chart.coords[1])
    t = Var(flow.family.time)
    printed = 2 * t / y**2 - 4 * Q / y
    g = flow.family.g
    same = all((g[k, k] - printed).is_zero_canonical() for k in (1, 2))
    return Check("printed-hyperbolic-flow", "g_11 = g_22 = 2t/y² − 4Q/y (as printed)", INFO if same else DISCREPANCY,
                 detail=f"computed g_11(t) = {g[1, 1]}, g_22(t) = {g[2, 2]}")


def _transpose(t: IndexedTensor) -> IndexedTensor:
    return permute(t, [2, 1])


@dataclass(eq=False)
class ConstantCurvatureFlow:
    model: str
    conv: RicciConvention
    initial: MetricStructure
    einstein_constant: Expression
    exponential: TimeDependentMetric
    linear: TimeDependentMetric
    report: Report = field(default_factory=lambda: Report("constant-curvature", "standard"))

    @property
    def family(self) -> TimeDependentMetric:
        """The family the model is documented with: e^{−2λt} g₀ in paper mode,
        (1 − 2λt) g₀ in standard mode."""
        return self.exponential if self.conv is RicciConvention.PAPER else self.linear


def _einstein_constant(m: MetricStructure, conv) -> Expression:
    cv = Curvature(m, conv)
    lam = cv.scalar / m.dim
    if not (cv.ricci - m.g * lam).is_zero_canonical():
        raise PreconditionError("initial metric is not Einstein (Ric ≠ λ g)")
    if not lam.is_constant():
        raise PreconditionError("Einstein factor is not constant")
    return lam


def einstein_families(m: MetricStructure, conv, time: str = "t"):
    """(λ, e^{−2λt} g₀, (1 − 2λt) g₀) for an Einstein metric with Ric = λ g₀."""
    lam = _einstein_constant(m, conv)
    t = Var(time)
    expo = TimeDependentMetric(m.g * Exp(-2 * lam * t), time, conv)
    lin = TimeDependentMetric(m.g * (1 - 2 * lam * t), time, conv)
    return lam, expo, lin


def riemann_scaling(tdm: TimeDependentMetric, lam=1) -> dict:
    """Which law R_ijkl(t) = R_ijkl(0) e^{kλt} holds for k in {−4, −2, 0, 2}."""
    R_t = tdm.curvature.riemann04
    R_0 = map_components(R_t, lambda e: substitute(e, {tdm.time: 0}))
    t = Var(tdm.time)
    return {k: (R_t - R_0 * Exp(k * lam * t)).is_zero_canonical() for k in (-4, -2, 0, 2)}


def constant_curvature_solution(model: str, n: int = 2, conv=RicciConvention.STANDARD, time: str = "t",
                                trials: int = 8, threshold: float = 1e-9,
                                rng: Optional[random.Random] = None) -> ConstantCurvatureFlow:
    """Constant-curvature family and its checks.

    ``hyperbolic_n`` uses K = 1/(1−n); ``sphere_n`` uses K = 1/(n−1).  Both
    give |Ric| = g, i.e. Einstein constant ±1 depending on the convention.
    """
    conv = RicciConvention.parse(conv)
    rng = rng if rng is not None else random.Random(0)
    if n < 2:
        raise ValueError("model dimension must be >= 2")
    if model in ("hyperbolic_n", "hyperbolic"):
        g0 = hyperbolic(n, _frac(1, 1 - n))
        model = "hyperbolic_n"
    elif model in ("sphere_n", "sphere"):
        g0 = einstein_sphere(n)
        model = "sphere_n"
    else:
        raise ValueError(f"unknown model {model!r}; use 'sphere_n' or 'hyperbolic_n'")
    return einstein_flow(g0, conv, f"{model}:n={n}", time, trials, threshold, rng)


def einstein_flow(g0: MetricStructure, conv=RicciConvention.STANDARD, label: str = "einstein", time: str = "t",
                  trials: int = 8, threshold: float = 1e-9,
                  rng: Optional[random.Random] = None) -> ConstantCurvatureFlow:
    """Exact families through an Einstein metric, with the solution and scaling checks."""
    conv = RicciConvention.parse(conv)
    rng = rng if rng is not None else random.Random(0)
    lam, expo, lin = einstein_families(g0, conv, time)
    rep = Report(f"constant-curvature:{label}", conv.value)
    ev = is_flow_solution(expo, trials, threshold, rng)
    rep.add(Check.from_verdict("exponential-family-solution", "g(t) = g(0) e^{−2λt} solves ∂_t g = −2Ric", ev,
                               detail=f"λ = {lam}"))
    lv = is_flow_solution(lin, trials, threshold, rng)
    rep.add(Check.from_verdict("linear-family-solution", "g(t) = (1 − 2λt) g(0) solves ∂_t g = −2Ric", lv,
                               detail=f"λ = {lam}"))
    scal = riemann_scaling(expo, lam)
    exps = [k for k, ok in scal.items() if ok]
    rep.add(Check("riemann-scaling", "R_ijkl(t) = R_ijkl(0) e^{−4λt} along g(0) e^{−2λt} (as printed)",
                  INFO if -4 in exps else DISCREPANCY,
                  detail=f"engine: R_ijkl(t) = R_ijkl(0) e^{{{exps[0]}λt}}" if exps else "no pure exponential law",
                  data={"computed_exponents": exps, "printed_exponent": -4, "unit": "λt"}))
    return ConstantCurvatureFlow(label, conv, g0, lam, expo, lin, rep)


def _frac(a: int, b: int):
    from fractions import Fraction

    return Fraction(a, b)


# ---------------------------------------------------------------------------
# theorem residuals
# ---------------------------------------------------------------------------

def _theorem_inputs(tdm: TimeDependentMetric, require_solution: bool, trials, threshold, rng):
    n = tdm.dim
    cv = tdm.curvature
    if cv.scalar.is_zero_canonical():
        raise ZeroScalarCurvatureError("theorem needs non-zero scalar curvature")
    if n <= 2:
        raise DimensionError(f"conharmonic tensor is undefined in dimension {n}")
    if require_solution:
        v = is_flow_solution(tdm, trials, threshold, rng)
        if not v.is_zero:
            raise PreconditionError(f"family is not a Ricci-flow solution ({v.verdict.value})")
    m = tdm.metric
    R04 = cv.riemann04
    C = concircular(m, R04, cv.scalar)
    L = conharmonic(m, R04, cv.ricci)
    W = weyl(m, R04, cv.ricci, cv.scalar)
    return n, cv.scalar, R04, C, L, W


def concircular_rate_residual(tdm: TimeDependentMetric, require_solution: bool = True, trials: int = 8,
                              threshold: float = 1e-9, rng=None) -> IndexedTensor:
    """∂_t[(C − R)/R_s] − 2(n−2)/(n(n−1)) (R − L)."""
    n, s, R04, C, L, _ = _theorem_inputs(tdm, require_solution, trials, threshold, rng)
    lhs = tdm.dt((C - R04) * (ONE / s))
    return lhs - (R04 - L) * Const(_frac(2 * (n - 2), n * (n - 1)))


def weyl_conharmonic_rate_residual(tdm: TimeDependentMetric, require_solution: bool = True, trials: int = 8,
                                   threshold: float = 1e-9, rng=None) -> IndexedTensor:
    """∂_t[(W − L)/R_s] − 2/(n−1) (L − R)."""
    n, s, R04, _, L, W = _theorem_inputs(tdm, require_solution, trials, threshold, rng)
    lhs = tdm.dt((W - L) * (ONE / s))
    return lhs - (L - R04) * Const(_frac(2, n - 1))


def theorem_concircular_rate_residual(tdm: TimeDependentMetric, require_solution: bool = True, trials: int = 8,
                                      threshold: float = 1e-9,
                                      rng: Optional[random.Random] = None) -> ZeroVerdict:
    rng = rng if rng is not None else random.Random(0)
    res = concircular_rate_residual(tdm, require_solution, trials, threshold, rng)
    return tensor_is_zero(res, trials, threshold, rng)


def theorem_weyl_conharmonic_rate_residual(tdm: TimeDependentMetric, require_solution: bool = True,
                                           trials: int = 8, threshold: float = 1e-9,
                                           rng: Optional[random.Random] = None) -> ZeroVerdict:
    rng = rng if rng is not None else random.Random(0)
    res = weyl_conharmonic_rate_residual(tdm, require_solution, trials, threshold, rng)
    return tensor_is_zero(res, trials, threshold, rng)


def _starred_count(idx: tuple, n_base: int) -> int:
    return sum(1 for i in idx if i > n_base)


def weyl_rate_extension_terms(flow: ExtensionFlow):
    """(∂_t W − ∂_t R, Ricci product R_il R_jk − R_ik R_jl, N) on g(t)."""
    tdm = flow.family
    N = tdm.dim
    m, cv = tdm.metric, tdm.curvature
    W = weyl(m, cv.riemann04, cv.ricci, cv.scalar)
    rate = tdm.dt(W) - tdm.dt(cv.riemann04)
    Ric = cv.ricci
    comps = {}
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            for k in range(1, N + 1):
                for l in range(1, N + 1):
                    v = Ric[i, l] * Ric[j, k] - Ric[i, k] * Ric[j, l]
                    if not v.is_zero_canonical():
                        comps[(i, j, k, l)] = v
    prod = IndexedTensor._trusted(tdm.chart, (DOWN,) * 4, comps)
    return rate, prod, N


def theorem_weyl_rate_extension(flow: ExtensionFlow, trials: int = 8, threshold: float = 1e-9,
                                rng: Optional[random.Random] = None) -> Report:
    """Rate of change of the Weyl tensor along an extension flow.

    Checks, on the 2n-dimensional chart:

    * tuples with at least two starred slots: the Ricci product vanishes and
      ∂_t W = ∂_t R there;
    * the full relation as displayed, ∂_t W = ∂_t R − 4/(N−2)(R_il R_jk − R_ik R_jl);
    * the relation obtained by differentiating the Weyl tensor of the
      definition directly, ∂_t W = ∂_t R + 4/(N−2)(R_il R_jk − R_ik R_jl).
    """
    rng = rng if rng is not None else random.Random(0)
    rate, prod, N = weyl_rate_extension_terms(flow)
    n_base = N // 2
    conv = flow.family.conv
    rep = Report("thm45", conv.value)
    if N <= 2:
        rep.add(Check("weyl-rate", "∂_t W on extensions", SKIPPED, detail="Weyl tensor needs dimension >= 3"))
        return rep
    starred = [idx for idx in _all_indices(N) if _starred_count(idx, n_base) >= 2]
    sub_rate = {i: rate[i] for i in starred}
    sub_prod = {i: prod[i] for i in starred}
    rep.add(Check.from_verdict("starred-ricci-product", "R_il R_jk − R_ik R_jl = 0 with ≥2 starred indices",
                               _tensor_dict_verdict(sub_prod, trials, threshold, rng)))
    rep.add(Check.from_verdict("starred-weyl-rate", "∂_t W = ∂_t R with ≥2 starred indices",
                               _tensor_dict_verdict(sub_rate, trials, threshold, rng)))
    coef = Const(_frac(4, N - 2))
    displayed = rate + prod * coef
    derived = rate - prod * coef
    dv = tensor_is_zero(displayed, trials, threshold, rng)
    rep.add(Check.from_verdict("derived-relation", "∂_t W = ∂_t R + 4/(N−2)(R_il R_jk − R_ik R_jl)",
                               tensor_is_zero(derived, trials, threshold, rng)))
    rep.add(Check("displayed-relation", "∂_t W = ∂_t R − 4/(N−2)(R_il R_jk − R_ik R_jl) (as printed)",
                  INFO if dv.is_zero else DISCREPANCY, dv.witness_json(),
                  detail=None if dv.is_zero else "sign of the Ricci-product term differs from the Weyl definition"))
    return rep


def theorem_weyl_rate_extension_residual(flow: ExtensionFlow, trials: int = 8, threshold: float = 1e-9,
                                         rng: Optional[random.Random] = None) -> ZeroVerdict:
    """Verdict on the starred-tuple statement and the relation derived from the Weyl definition."""
    rep = theorem_weyl_rate_extension(flow, trials, threshold, rng)
    from .expr import Verdict

    for c in rep.checks:
        if c.status in ("fail", "unknown"):
            return ZeroVerdict(Verdict.NONZERO if c.status == "fail" else Verdict.UNKNOWN)
    return ZeroVerdict(Verdict.ZERO)


def _all_indices(N: int):
    import itertools

    return itertools.product(range(1, N + 1), repeat=4)


def _tensor_dict_verdict(d: dict, trials, threshold, rng) -> ZeroVerdict:
    from .expr import combine

    out = []
    for idx in sorted(d):
        v = is_zero(d[idx], trials, threshold, rng)
        out.append(v if v.is_zero else ZeroVerdict(v.verdict, v.witness, v.value, idx))
    return combine(out)
