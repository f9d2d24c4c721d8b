import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riemext.expr import ONE, Var, parse_expression
from riemext.models import hyperbolic, sphere
from riemext.tensor import (
    DOWN,
    UP,
    Chart,
    IndexedTensor,
    ShapeError,
    SymmetryError,
    contract,
    contract_product,
    kronecker,
    lower_index,
    permute,
    raise_index,
    tensor_is_zero,
    tensor_mul_outer,
)

P = parse_expression
CH = Chart(("x", "y"))


def test_missing_components_read_as_zero():
    t = IndexedTensor(CH, (DOWN, DOWN), {(1, 1): P("x")})
    assert t[1, 2].is_zero_canonical()
    assert t[1, 1] == Var("x")


def test_index_out_of_range():
    with pytest.raises(ShapeError):
        IndexedTensor(CH, (DOWN, DOWN), {(1, 3): ONE})
    t = IndexedTensor.zeros(CH, (DOWN,))
    with pytest.raises(IndexError):
        t[0]


def test_declared_symmetry_is_checked():
    with pytest.raises(SymmetryError):
        IndexedTensor(CH, (DOWN, DOWN), {(1, 2): ONE}, symmetries=[(1, 2, 1)])
    IndexedTensor(CH, (DOWN, DOWN), {(1, 2): ONE, (2, 1): -ONE}, symmetries=[(1, 2, -1)])


def test_contract_trace():
    t = IndexedTensor(CH, (UP, DOWN), {(1, 1): P("x"), (2, 2): P("y"), (1, 2): ONE})
    assert contract(t, 1, 2).value() == P("x + y")
    with pytest.raises(ShapeError):
        contract(IndexedTensor.zeros(CH, (DOWN, DOWN)), 1, 2)


def test_contract_product_matches_matrix_product():
    a = IndexedTensor(CH, (UP, DOWN), {(1, 1): P("x"), (1, 2): P("y"), (2, 1): ONE})
    b = IndexedTensor(CH, (UP, DOWN), {(1, 2): P("2"), (2, 2): P("x*y")})
    ab = contract_product(a, b, [(2, 1)])
    for i in (1, 2):
        for k in (1, 2):
            assert ab[i, k] == sum((a[i, j] * b[j, k] for j in (1, 2)), P("0"))


def test_permute_semantics():
    t = IndexedTensor(Chart(("x", "y", "z")), (DOWN,) * 3, {(1, 2, 3): ONE})
    # result slot i is input slot order[i]
    assert permute(t, [2, 3, 1])[2, 3, 1] == ONE
    assert permute(t, [3, 1, 2])[3, 1, 2] == ONE
    with pytest.raises(ShapeError):
        permute(t, [1, 1, 2])


@pytest.mark.parametrize("m", [hyperbolic(2), sphere(2)], ids=["hyperbolic", "sphere"])
def test_raise_lower_roundtrip(m):
    t = IndexedTensor(m.chart, (DOWN, DOWN), {(1, 1): P("x"), (1, 2): P("y^2"), (2, 2): ONE})
    assert lower_index(raise_index(t, 1, m), 1, m) == t
    assert raise_index(m.g, 1, m) == kronecker(m.chart)


def test_outer_and_scale():
    a = IndexedTensor(CH, (DOWN,), {(1,): P("x")})
    b = IndexedTensor(CH, (DOWN,), {(2,): P("y")})
    ab = tensor_mul_outer(a, b)
    assert ab.variance == (DOWN, DOWN) and ab[1, 2] == P("x*y") and ab[2, 1].is_zero_canonical()
    assert (ab * 2)[1, 2] == P("2*x*y")


def test_shape_mismatch_on_add():
    with pytest.raises(ShapeError):
        IndexedTensor.zeros(CH, (DOWN,)) + IndexedTensor.zeros(CH, (UP,))


comps = st.dictionaries(
    st.tuples(st.integers(1, 2), st.integers(1, 2)),
    st.sampled_from(["x", "1/y", "x*y - 3", "exp(-2*t)/y^2", "7/2"]),
    max_size=4,
)


@given(comps)
@settings(max_examples=50, deadline=None)
def test_json_dump_roundtrip(d):
    t = IndexedTensor(CH, (DOWN, UP), {k: P(v) for k, v in d.items()})
    doc = t.to_json()
    assert doc["dim"] == 2 and doc["variance"] == ["down", "up"]
    assert IndexedTensor.from_json(CH, doc) == t


def test_tensor_is_zero_reports_component():
    t = IndexedTensor(CH, (DOWN, DOWN), {(2, 1): P("x - y")})
    v = tensor_is_zero(t)
    assert not v and v.where == (2, 1)
    assert tensor_is_zero(IndexedTensor.zeros(CH, (DOWN,)))
