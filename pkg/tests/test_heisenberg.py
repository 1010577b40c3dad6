import pytest

from ncphase import I, PhaseSpaceOperator, Q, TruncatedSeries, fock_apply, op_exponential_apply, op_multiply, polynomial
from ncphase.exceptions import StructuralError
from ncphase.heisenberg import EXACT
from ncphase.realization import unit_polynomial


@pytest.fixture
def ops():
    t = PhaseSpaceOperator.operator_table(2)
    X = [PhaseSpaceOperator.coordinate(t, 2, i) for i in range(2)]
    P = [PhaseSpaceOperator.momentum(t, 2, i) for i in range(2)]
    return t, X, P


def test_defining_relation(ops):
    t, X, P = ops
    # eta_00 = -1, so p0 x0 = x0 p0 + i
    assert op_multiply(P[0], X[0]) == X[0] * P[0] + PhaseSpaceOperator.scalar(t, 2, I)
    assert op_multiply(X[0], P[0]).render() == "x0*(p0)"
    assert op_multiply(P[1], X[1]) == X[1] * P[1] - PhaseSpaceOperator.scalar(t, 2, I)
    assert P[0].commutator(X[1]).is_zero()


def test_gl_relation(ops):
    t, X, P = ops
    L01 = X[0] * P[1]
    L10 = X[1] * P[0]
    # i(eta_00 x1 p1 - eta_11 x0 p0)
    i = PhaseSpaceOperator.scalar(t, 2, I)
    want = -(X[1] * P[1]) * i - (X[0] * P[0]) * i
    assert L01 * L10 - L10 * L01 == want


def test_fock_examples():
    t = PhaseSpaceOperator.operator_table(2)
    X = [PhaseSpaceOperator.coordinate(t, 2, i) for i in range(2)]
    P = [PhaseSpaceOperator.momentum(t, 2, i) for i in range(2)]
    x0 = polynomial(2, {(1, 0): 1})
    x1 = polynomial(2, {(0, 1): 1})
    assert fock_apply(X[0], x1) == polynomial(2, {(1, 1): 1}).with_order(2).embed(fock_apply(X[0], x1).table)
    assert fock_apply(P[0], x1).is_zero()
    assert fock_apply(P[0], x0) == TruncatedSeries.constant(fock_apply(P[0], x0).table, 2, I)
    assert fock_apply(X[0] * P[0], polynomial(2)).is_zero()


def test_fock_on_power():
    # p1 |> x1^3 = -i * 3 x1^2 (eta_11 = 1)
    t = PhaseSpaceOperator.operator_table(2)
    P1 = PhaseSpaceOperator.momentum(t, 2, 1)
    got = fock_apply(P1, polynomial(2, {(0, 3): 1}))
    assert got.render() == "-3*i*x1^2"


def test_exponential_of_ikx():
    t = PhaseSpaceOperator.operator_table(1, params=("k",), signature=(1,))
    kx = TruncatedSeries.var(t, 0, "k", 0, c=I) * TruncatedSeries.var(t, 0, "x", 0)
    out = op_exponential_apply(PhaseSpaceOperator(kx), unit_polynomial(t), cap=4)
    assert out.degree_in("x") == 4
    # coefficient of (k x)^3 is i^3/3! = -i/6
    key = [k for k in out.terms if sum(k[1:]) == 6]
    assert len(key) == 1 and out.terms[key[0]] == I * Q(-1, 6)


def test_mismatched_dimensions():
    A = PhaseSpaceOperator.coordinate(PhaseSpaceOperator.operator_table(2), 2, 0)
    B = PhaseSpaceOperator.coordinate(PhaseSpaceOperator.operator_table(3), 2, 0)
    with pytest.raises(StructuralError):
        op_multiply(A, B)


def test_polynomial_is_exact_order():
    assert polynomial(2, {(2, 1): Q(1, 3)}).order == EXACT


def test_normal_order_idempotent(ops):
    t, X, P = ops
    A = X[0] * X[1] * P[0] * P[1]
    assert PhaseSpaceOperator(A.series) == A
    assert op_multiply(PhaseSpaceOperator.scalar(t, 2, 1), A) == A
