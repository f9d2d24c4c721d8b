"""Named verification suites run by ``riemext verify``.

Each suite takes a parsed manifold file and returns a Report.  Suites whose
preconditions a file cannot meet (no metric, dimension too small, metric not
Einstein) report ``skipped`` rather than failing.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Optional

from .curvature_zoo import check_linear_relation, concircular, conharmonic, weyl
from .dsl import ManifoldFile
from .expr import Var, derive, is_zero, substitute
from .extension import ExtendedSpace, extend, hyperbolic_printed_metric_discrepancy, verify_extension_identities
from .flow import (
    PreconditionError,
    TimeDependentMetric,
    einstein_families,
    flow_residual,
    hyperbolic_printed_flow_discrepancy,
    is_flow_solution,
    ricci_evolution_rhs,
    riemann_evolution_rhs,
    scalar_evolution_rhs,
    solve_extension_flow,
    theorem_concircular_rate_residual,
    theorem_weyl_conharmonic_rate_residual,
    theorem_weyl_rate_extension,
)
from .geometry import Curvature, RicciConvention, laplacian
from .models import hyperbolic
from .report import SKIPPED, Check, Report
from .tensor import map_components, tensor_is_zero

STANDARD, PAPER = RicciConvention.STANDARD, RicciConvention.PAPER


@dataclass
class SuiteConfig:
    trials: int = 8
    threshold: float = 1e-9
    seed: int = 0
    convention: Optional[RicciConvention] = None

    def rng(self) -> random.Random:
        return random.Random(self.seed)


def fresh_time(mf: ManifoldFile) -> str:
    """A flow-time symbol not already used by the file."""
    used = set(mf.coords) | set(mf.params) | set(mf.omega or ())
    for cand in ("t", "tau", "s"):
        if cand not in used:
            return cand
    i = 1
    while f"t{i}" in used:
        i += 1
    return f"t{i}"


def _skip(rep: Report, name: str, why: str) -> Report:
    rep.add(Check(name, "precondition", SKIPPED, detail=why))
    return rep


def _conv(cfg: SuiteConfig, default: RicciConvention) -> RicciConvention:
    return cfg.convention or default


def _extension(mf: ManifoldFile) -> ExtendedSpace:
    return extend(mf.base_geometry(), mf.c_tensor(), mf.omega)


def _is_printed_hyperbolic(ext: ExtendedSpace) -> bool:
    m = ext.base.metric
    if m is None or m.dim != 2 or ext.c.nonzero():
        return False
    ref = hyperbolic(2, names=m.chart.coords)
    return (m.g - ref.g).is_zero_canonical()


def suite_extension_identities(mf: ManifoldFile, cfg: SuiteConfig) -> Report:
    conv = _conv(cfg, PAPER)
    ext = _extension(mf)
    rep = verify_extension_identities(ext, conv, cfg.trials, cfg.threshold, cfg.rng())
    rep.suite = "extension-identities"
    if _is_printed_hyperbolic(ext):
        rep.add(hyperbolic_printed_metric_discrepancy(ext))
    return rep


def suite_lemma_laplacian(mf: ManifoldFile, cfg: SuiteConfig) -> Report:
    conv = _conv(cfg, PAPER)
    ext = _extension(mf)
    cv = ext.curvature(conv)
    rep = Report("lemma-laplacian", conv.value)
    lap = laplacian(ext.metric, cv.connection, cv.ricci)
    rep.add(Check.from_verdict("laplacian-ricci", "Δ R̄_ij = 0 on the extension",
                               tensor_is_zero(lap, cfg.trials, cfg.threshold, cfg.rng())))
    return rep


def _extension_flow_report(mf: ManifoldFile, cfg: SuiteConfig, suite: str, names) -> Report:
    conv = _conv(cfg, PAPER)
    flow = solve_extension_flow(_extension(mf), conv, fresh_time(mf),
                                trials=cfg.trials, threshold=cfg.threshold, rng=cfg.rng())
    rep = Report(suite, conv.value)
    for c in flow.report.checks:
        if c.name in names:
            rep.add(c)
    if suite == "thm-linear-flow" and _is_printed_hyperbolic(flow.ext):
        rep.add(hyperbolic_printed_flow_discrepancy(flow))
    return rep


def suite_thm_ricci_invariant(mf: ManifoldFile, cfg: SuiteConfig) -> Report:
    return _extension_flow_report(mf, cfg, "thm-ricci-invariant",
                                  {"ricci-time-invariant", "flow-solution", "stays-extension", "scalar-flat"})


def suite_thm_linear_flow(mf: ManifoldFile, cfg: SuiteConfig) -> Report:
    return _extension_flow_report(mf, cfg, "thm-linear-flow",
                                  {"linear-in-time", "flow-solution", "printed-linear-coefficient"})


def _einstein_family(mf: ManifoldFile, conv) -> TimeDependentMetric:
    """(1 − 2λt) g₀ for an Einstein metric file."""
    if mf.metric is None:
        raise PreconditionError("file defines a connection only")
    _, _, lin = einstein_families(mf.metric_structure(), conv, fresh_time(mf))
    return lin


def _theorem_suite(mf: ManifoldFile, cfg: SuiteConfig, suite: str, fn, name: str, identity: str) -> Report:
    conv = _conv(cfg, STANDARD)
    rep = Report(suite, conv.value)
    if mf.dim < 3:
        return _skip(rep, name, f"conharmonic and Weyl tensors need dimension >= 3 (file has {mf.dim})")
    try:
        fam = _einstein_family(mf, conv)
        v = fn(fam, True, cfg.trials, cfg.threshold, cfg.rng())
    except PreconditionError as exc:
        return _skip(rep, name, str(exc))
    rep.add(Check.from_verdict(name, identity, v, detail="family (1 − 2λt) g₀"))
    return rep


def suite_thm31(mf: ManifoldFile, cfg: SuiteConfig) -> Report:
    return _theorem_suite(mf, cfg, "thm31", theorem_concircular_rate_residual, "concircular-rate",
                          "∂_t[(C − R)/R_s] = 2(n−2)/(n(n−1)) (R − L)")


def suite_thm33(mf: ManifoldFile, cfg: SuiteConfig) -> Report:
    return _theorem_suite(mf, cfg, "thm33", theorem_weyl_conharmonic_rate_residual, "weyl-conharmonic-rate",
                          "∂_t[(W − L)/R_s] = 2/(n−1) (L − R)")


def suite_thm45(mf: ManifoldFile, cfg: SuiteConfig) -> Report:
    conv = _conv(cfg, PAPER)
    flow = solve_extension_flow(_extension(mf), conv, fresh_time(mf),
                                trials=cfg.trials, threshold=cfg.threshold, rng=cfg.rng())
    return theorem_weyl_rate_extension(flow, cfg.trials, cfg.threshold, cfg.rng())


def suite_evolution_eqs(mf: ManifoldFile, cfg: SuiteConfig) -> Report:
    """Riemann, Ricci and scalar evolution equations.

    Einstein metrics are checked along the exact family (1 − 2λt) g₀ for all t.
    Other metrics are checked at t = 0 along g₀ − 2t Ric(g₀), which agrees with
    the flow to first order, so first time derivatives at t = 0 are exact.
    """
    conv = _conv(cfg, STANDARD)
    rep = Report("evolution-eqs", conv.value)
    if conv is not STANDARD:
        return _skip(rep, "evolution-equations", "the evolution equations are stated for the standard convention")
    if mf.metric is None:
        return _skip(rep, "evolution-equations", "file defines a connection only")
    g0 = mf.metric_structure()
    try:
        fam = _einstein_family(mf, conv)
        at = None
        how = "exact family (1 − 2λt) g₀"
    except PreconditionError:
        ric0 = Curvature(g0, conv).ricci
        tn = fresh_time(mf)
        fam = TimeDependentMetric(g0.g - ric0 * (2 * Var(tn)), tn, conv)
        at = {tn: 0}
        how = "first-order family g₀ − 2t Ric(g₀) at t = 0"
    rng = cfg.rng()

    def tz(t):
        if at is not None:
            t = map_components(t, lambda e: substitute(e, at))
        return tensor_is_zero(t, cfg.trials, cfg.threshold, rng)

    if at is None:
        sol = is_flow_solution(fam, cfg.trials, cfg.threshold, rng)
    else:
        sol = tz(flow_residual(fam))
    rep.add(Check.from_verdict("flow-solution", "∂_t g + 2 Ric = 0", sol, detail=how))
    cv = fam.curvature
    rep.add(Check.from_verdict("riemann-evolution",
                               "∂_t R_ijkl = ΔR_ijkl + 2(B_ijkl − B_ijlk − B_iljk + B_ikjl) − "
                               "g^pq(R_pjkl R_qi + R_ipkl R_qj + R_ijpl R_qk + R_ijkp R_ql)",
                               tz(fam.dt(cv.riemann04) - riemann_evolution_rhs(fam)), detail=how))
    rep.add(Check.from_verdict("ricci-evolution", "∂_t R_ij = ΔR_ij + 2 g^pr g^qs R_piqj R_rs − 2 g^pq R_pi R_qj",
                               tz(fam.dt(cv.ricci) - ricci_evolution_rhs(fam)), detail=how))
    sres = derive(cv.scalar, fam.time) - scalar_evolution_rhs(fam)
    if at is not None:
        sres = substitute(sres, at)
    rep.add(Check.from_verdict("scalar-evolution", "∂_t R = ΔR + 2|Ric|²",
                               is_zero(sres, cfg.trials, cfg.threshold, rng), detail=how))
    return rep


def suite_relation_eq17(mf: ManifoldFile, cfg: SuiteConfig) -> Report:
    conv = _conv(cfg, PAPER)
    rep = Report("relation-eq17", conv.value)
    if mf.metric is None:
        return _skip(rep, "linear-relation", "file defines a connection only")
    n = mf.dim
    if n < 3:
        return _skip(rep, "linear-relation", f"relation involves 1/(n−2); file has dimension {n}")
    m = mf.metric_structure()
    cv = Curvature(m, conv)
    R04 = cv.riemann04
    C = concircular(m, R04, cv.scalar)
    L = conharmonic(m, R04, cv.ricci)
    W = weyl(m, R04, cv.ricci, cv.scalar)
    rep.add(Check.from_verdict("linear-relation", "(W − L) + n/(n−2) (C − R) = 0",
                               check_linear_relation(C, L, W, R04, n, cfg.trials, cfg.threshold, cfg.rng())))
    return rep


SUITES: dict[str, Callable[[ManifoldFile, SuiteConfig], Report]] = {
    "extension-identities": suite_extension_identities,
    "lemma-laplacian": suite_lemma_laplacian,
    "thm-ricci-invariant": suite_thm_ricci_invariant,
    "thm-linear-flow": suite_thm_linear_flow,
    "thm31": suite_thm31,
    "thm33": suite_thm33,
    "thm45": suite_thm45,
    "evolution-eqs": suite_evolution_eqs,
    "relation-eq17": suite_relation_eq17,
}


def run_suite(name: str, mf: ManifoldFile, cfg: SuiteConfig) -> Report:
    if name == "all":
        rep = Report("all", cfg.convention.value if cfg.convention else "per-suite")
        for sub, fn in SUITES.items():
            r = fn(mf, cfg)
            for c in r.checks:
                c.name = f"{sub}/{c.name}"
                c.data = {**c.data, "convention": r.convention}
                rep.add(c)
        return rep
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join([*SUITES, 'all'])}") from None
    return fn(mf, cfg)
