import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from fieldlab.errors import ShapeError
from fieldlab.linalg import (
    LinOp,
    Space,
    StateVec,
    comm,
    dagger,
    fit_scalar,
    from_coo_text,
    identity,
    inner,
    ket,
    bra,
    opnorm_max,
    root_of_unity,
    swap,
    tensor,
    tensor_space,
    to_coo_text,
    unit_roots,
)

reals = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
weights = st.floats(0.25, 4.0, allow_nan=False)


def complex_arrays(shape):
    return st.tuples(arrays(float, shape, elements=reals), arrays(float, shape, elements=reals)).map(lambda t: t[0] + 1j * t[1])


@st.composite
def weighted_op(draw, max_dim=4):
    n = draw(st.integers(1, max_dim))
    m = draw(st.integers(1, max_dim))
    dom = Space("D", draw(arrays(float, n, elements=weights)))
    cod = Space("C", draw(arrays(float, m, elements=weights)))
    return LinOp(draw(complex_arrays((m, n))), dom, cod)


@given(weighted_op(), st.data())
def test_dagger_is_weighted_adjoint(A, data):
    u = StateVec(A.cod, data.draw(complex_arrays(A.cod.dim)))
    v = StateVec(A.dom, data.draw(complex_arrays(A.dom.dim)))
    lhs = inner(dagger(A) @ u, v)
    rhs = inner(u, A @ v)
    assert abs(lhs - rhs) <= 1e-9 * (1 + abs(rhs))


@given(weighted_op())
def test_dagger_matches_entrywise_oracle(A):
    want = oracles.weighted_adjoint(A.dense(), A.dom.gram, A.cod.gram)
    assert np.allclose(dagger(A).dense(), want, atol=1e-12)


@given(weighted_op())
def test_dagger_involution_and_sparse_agreement(A):
    assert np.allclose(dagger(dagger(A)).dense(), A.dense(), atol=1e-12)
    assert np.allclose(dagger(A.as_sparse()).dense(), dagger(A).dense(), atol=1e-12)


@given(weighted_op(3), weighted_op(3))
def test_tensor_interchange_law(A, B):
    Ad, Bd = dagger(A), dagger(B)
    lhs = tensor(Ad, Bd) @ tensor(A, B)
    rhs = tensor(Ad @ A, Bd @ B)
    assert np.allclose(lhs.dense(), rhs.dense(), atol=1e-9)


@given(weighted_op(3), weighted_op(3))
def test_swap_is_natural(A, B):
    lhs = swap(A.cod, B.cod) @ tensor(A, B)
    rhs = tensor(B, A) @ swap(A.dom, B.dom)
    assert np.allclose(lhs.dense(), rhs.dense(), atol=1e-12)


@given(st.integers(1, 4), st.integers(1, 4))
def test_swap_involution(n, m):
    V, W = Space.uniform("V", n), Space.uniform("W", m)
    assert np.array_equal((swap(W, V) @ swap(V, W)).dense(), np.eye(n * m))


@given(weighted_op(4))
def test_sparse_and_dense_compose_agree(A):
    B = dagger(A)
    assert np.allclose((A.as_sparse() @ B).dense(), (A @ B).dense(), atol=1e-12)
    assert np.allclose((A + A.as_sparse()).dense(), 2 * A.dense())


@given(weighted_op(4))
def test_commutator_antisymmetry_and_jacobi(A):
    X, Y = dagger(A) @ A, dagger(A) @ A @ dagger(A) @ A
    Z = LinOp(np.triu(np.ones((A.dom.dim,) * 2)), A.dom, A.dom)
    assert np.allclose(comm(X, Z).dense(), -comm(Z, X).dense(), atol=1e-9)
    assert np.allclose(comm(X, Y).dense(), 0, atol=1e-8 * (1 + opnorm_max(Y)))
    jac = comm(X, comm(Z, Y)) + comm(Z, comm(Y, X)) + comm(Y, comm(X, Z))
    assert opnorm_max(jac) <= 1e-9 * (1 + opnorm_max(Y)) ** 2


@given(complex_arrays((3, 3)), st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_fit_scalar_recovers_multiple(R, lam):
    if np.abs(R).max() < 1e-3:
        return
    got, resid = fit_scalar(lam * R, R)
    assert abs(got - lam) <= 1e-9 * (1 + abs(lam))
    assert resid <= 1e-9 * (1 + abs(lam))


@given(weighted_op(5))
def test_coo_roundtrip(A):
    text = to_coo_text(A, "A")
    B = from_coo_text(text, A.dom, A.cod)
    assert np.array_equal(B.dense(), A.dense() * (A.dense() != 0))
    assert text == to_coo_text(A, "A")


@given(st.integers(1, 40), st.integers(-200, 200), st.integers(-200, 200))
def test_roots_of_unity_form_a_group(M, r, s):
    z = root_of_unity(r, M) * root_of_unity(s, M)
    assert abs(z - root_of_unity(r + s, M)) <= 1e-15 * 4
    assert root_of_unity(r + M, M) == root_of_unity(r, M)


def test_unit_roots_table_is_read_only():
    table = unit_roots(7)
    assert table[0] == 1
    with pytest.raises(ValueError):
        table[1] = 0


def test_tensor_space_gram_is_product():
    V = Space("V", np.array([1.0, 2.0]))
    W = Space("W", np.array([3.0, 5.0, 7.0]))
    assert np.array_equal(tensor_space(V, W).gram, np.kron(V.gram, W.gram))


def test_ket_bra_inner_product():
    V = Space("V", np.array([1.0, 3.0]))
    u = StateVec(V, [1, 1j])
    v = StateVec(V, [2, 1])
    assert abs((bra(u) @ ket(v)).entry(0, 0) - inner(u, v)) <= 1e-15


def test_shape_errors():
    V = Space.uniform("V", 2)
    W = Space.uniform("W", 3)
    with pytest.raises(ShapeError):
        LinOp(np.eye(2), V, W)
    with pytest.raises(ShapeError):
        identity(V) @ identity(W)
    with pytest.raises(ShapeError):
        StateVec(V, [1, 2, 3])


def test_lost_mask_propagates_through_composition():
    V = Space.uniform("V", 3)
    A = LinOp(sp.csr_array(np.eye(3)), V, V, lost=[False, True, False])
    B = LinOp(np.array([[0, 0, 0], [1, 0, 0], [0, 0, 1]]), V, V)
    assert (A @ B).lost.tolist() == [True, False, False]
    assert not (A @ LinOp(np.diag([1, 0, 1]), V, V)).truncated
    assert (A @ StateVec(V, [0, 1, 0])).truncated
    assert not (A @ StateVec(V, [1, 0, 0])).truncated
    assert dagger(A).lost.all()


@settings(max_examples=25)
@given(weighted_op(3))
def test_opnorm_max_is_largest_entry(A):
    assert opnorm_max(A) == np.abs(A.dense()).max()
    assert opnorm_max(A.as_sparse()) == pytest.approx(opnorm_max(A))
