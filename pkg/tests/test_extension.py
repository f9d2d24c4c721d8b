import pytest

from riemext.expr import Const, Var, parse_expression
from riemext.extension import (
    BaseGeometry,
    ExtensionError,
    extend,
    hyperbolic_printed_metric_discrepancy,
    recognize_extension,
    verify_extension_identities,
)
from riemext.geometry import Connection, RicciConvention
from riemext.models import flat, hyperbolic, sphere
from riemext.tensor import DOWN, UP, Chart, IndexedTensor, ShapeError

P = parse_expression
PAPER, STD = RicciConvention.PAPER, RicciConvention.STANDARD


@pytest.fixture(scope="module")
def hyp_ext():
    return extend(hyperbolic(2), omega_names=("P", "Q"))


def test_hyperbolic_extension_metric(hyp_ext):
    g = hyp_ext.metric.g
    assert g[1, 1] == P("-2*Q/y")
    assert g[1, 2] == P("2*P/y")
    assert g[2, 2] == P("2*Q/y")
    assert g[1, 3] == 1 and g[2, 4] == 1
    assert g[3, 3].is_zero_canonical() and g[3, 4].is_zero_canonical()
    assert hyp_ext.metric.det_g == 1


def test_hyperbolic_extension_ricci_paper_convention(hyp_ext):
    # R_11 = 2/y² = R_22, everything else zero
    ric = hyp_ext.curvature(PAPER).ricci
    assert ric.nonzero() == {(1, 1): P("2/y^2"), (2, 2): P("2/y^2")}


def test_standard_ricci_is_negated(hyp_ext):
    assert hyp_ext.curvature(STD).ricci == hyp_ext.curvature(PAPER).ricci * -1


@pytest.mark.parametrize("conv", [PAPER, STD])
def test_identities_hyperbolic(hyp_ext, conv):
    rep = verify_extension_identities(hyp_ext, conv)
    assert rep.ok, rep.text()
    assert all(c.status == "pass" for c in rep.checks), rep.text()


def test_identities_flat_constant_c():
    c = IndexedTensor(flat(2).chart, (DOWN, DOWN), {(1, 1): Const(3), (1, 2): P("1/2"), (2, 1): P("1/2"),
                                                    (2, 2): Const(-1)})
    ext = extend(flat(2), c)
    rep = verify_extension_identities(ext)
    assert all(c.status == "pass" for c in rep.checks), rep.text()
    assert ext.curvature(PAPER).riemann.is_zero_canonical()


def test_identities_sphere_with_variable_c():
    m = sphere(2)
    c = IndexedTensor(m.chart, (DOWN, DOWN), {(1, 1): P("x*y"), (2, 2): P("x")})
    rep = verify_extension_identities(extend(m, c))
    assert rep.ok, rep.text()


def test_identities_non_metric_connection():
    ch = Chart(("u", "v"))
    gamma = IndexedTensor(ch, (UP, DOWN, DOWN), {(1, 1, 1): P("u"), (2, 1, 2): P("v"), (2, 2, 1): P("v")})
    ext = extend(BaseGeometry.from_connection(Connection(ch, gamma)))
    rep = verify_extension_identities(ext)
    assert rep.ok, rep.text()


def test_printed_metric_is_a_discrepancy(hyp_ext):
    chk = hyperbolic_printed_metric_discrepancy(hyp_ext)
    assert chk.status == "discrepancy"


def test_recognize_roundtrip(hyp_ext):
    c = recognize_extension(hyp_ext.metric, hyp_ext.base.connection)
    assert c is not None and c.is_zero_canonical()
    m = sphere(2)
    c0 = IndexedTensor(m.chart, (DOWN, DOWN), {(1, 2): P("x"), (2, 1): P("x")})
    ext = extend(m, c0)
    assert recognize_extension(ext.metric, ext.base.connection) == c0


def test_recognize_rejects_non_extensions(hyp_ext):
    g = hyp_ext.metric.g
    comps = dict(g.nonzero())
    comps[(3, 3)] = Const(1)
    bad = IndexedTensor(g.chart, (DOWN, DOWN), comps)
    assert recognize_extension(bad, hyp_ext.base.connection) is None
    comps = dict(g.nonzero())
    comps[(1, 1)] = comps[(1, 1)] + Var("P") ** 2  # c would depend on a fibre coordinate
    bad = IndexedTensor(g.chart, (DOWN, DOWN), comps)
    assert recognize_extension(bad, hyp_ext.base.connection) is None


def test_recognize_odd_dimension():
    m = flat(3)
    with pytest.raises(ShapeError):
        recognize_extension(m, hyperbolic(2).levi_civita)


def test_extend_validation():
    with pytest.raises(ExtensionError):
        extend(hyperbolic(2), omega_names=("x", "Q"))
    with pytest.raises(ExtensionError):
        extend(hyperbolic(2), omega_names=("P",))
    m = hyperbolic(2)
    c = IndexedTensor(m.chart, (DOWN, DOWN), {(1, 1): P("P")})
    with pytest.raises(ExtensionError):
        extend(m, c, omega_names=("P", "Q"))
