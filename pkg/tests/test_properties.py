"""Algebraic laws on random exact inputs."""

import random

from hypothesis import given, settings, strategies as st

from ncphase import (
    PhaseSpaceOperator, Q, StarProduct, TruncatedSeries, VariableTable, check_leibniz, coproduct_from_d,
    d_function_ode, fock_apply, kappa_minkowski, op_multiply, weyl_realization,
)
from ncphase.series import invert_vector_series

import gen

seeds = st.integers(0, 2 ** 32 - 1)
laws = settings(max_examples=25, deadline=None, derandomize=True)

T = VariableTable(2, ("k", "q"))


@laws
@given(seeds)
def test_ring_axioms(seed):
    r = random.Random(seed)
    f, g, h = (gen.series(r, T, 3) for _ in range(3))
    zero, one = TruncatedSeries.zero(T, 3), TruncatedSeries.one(T, 3)
    assert (f + g) * h == f * h + g * h
    assert (f * g) * h == f * (g * h)
    assert f * g == g * f
    assert f + zero == f and f * one == f
    assert f - f == zero


@laws
@given(seeds, st.integers(0, 2))
def test_truncation_is_a_homomorphism(seed, low):
    r = random.Random(seed)
    f, g = gen.series(r, T, 3), gen.series(r, T, 3)
    assert (f * g).truncate(low) == f.truncate(low) * g.truncate(low)
    assert (f + g).truncate(low) == f.truncate(low) + g.truncate(low)


@laws
@given(seeds)
def test_exp_of_graded_series(seed):
    r = random.Random(seed)
    a = gen.series(r, T, 3) * TruncatedSeries.grading_power(T, 3)
    b = gen.series(r, T, 3) * TruncatedSeries.grading_power(T, 3)
    assert a.exp() * (-a).exp() == TruncatedSeries.one(T, 3)
    assert (a + b).exp() == a.exp() * b.exp()


@laws
@given(seeds)
def test_reciprocal(seed):
    r = random.Random(seed)
    f = TruncatedSeries.one(T, 3) + gen.series(r, T, 3) * TruncatedSeries.grading_power(T, 3)
    assert f * f.reciprocal() == TruncatedSeries.one(T, 3)


@laws
@given(seeds)
def test_vector_inverse_is_two_sided(seed):
    r = random.Random(seed)
    t = VariableTable(2, ("k",))
    k = TruncatedSeries.vector(t, 3, "k")
    lg = TruncatedSeries.grading_power(t, 3)
    K = [k[m] + lg * gen.series(r, t, 3, terms=2) * k[m] for m in range(2)]
    J = invert_vector_series(K, "k")
    assert [c.compose({"k": J}) for c in K] == k
    assert [c.compose({"k": K}) for c in J] == k


@laws
@given(seeds)
def test_operator_product_is_associative(seed):
    r = random.Random(seed)
    A, B, C = (gen.operator(r) for _ in range(3))
    assert op_multiply(op_multiply(A, B), C) == op_multiply(A, op_multiply(B, C))
    one = PhaseSpaceOperator.scalar(A.table, A.order, 1)
    assert op_multiply(one, A) == A == op_multiply(A, one)


@laws
@given(seeds)
def test_fock_module_law(seed):
    r = random.Random(seed)
    A, B = gen.operator(r), gen.operator(r)
    f = gen.polynomial(r)
    assert fock_apply(A, fock_apply(B, f)) == fock_apply(op_multiply(A, B), f).with_order(2)


@laws
@given(seeds)
def test_normal_order_is_idempotent(seed):
    A = gen.operator(random.Random(seed))
    assert PhaseSpaceOperator(A.series) == A
    assert PhaseSpaceOperator(PhaseSpaceOperator(A.series).series) == A


@laws
@given(seeds)
def test_commutator_is_a_derivation(seed):
    r = random.Random(seed)
    A, B, C = (gen.operator(r) for _ in range(3))
    assert A.commutator(B * C) == A.commutator(B) * C + B * A.commutator(C)


_kappa = kappa_minkowski([1, Q(1, 2)], order=2).structure
_W = weyl_realization(_kappa, 2)
_delta = coproduct_from_d(d_function_ode(_kappa, 2))
_star = StarProduct(_W)


@settings(max_examples=10, deadline=None, derandomize=True)
@given(seeds)
def test_leibniz_rule(seed):
    r = random.Random(seed)
    f, g = gen.polynomial(r, 2, 2, 2), gen.polynomial(r, 2, 2, 2)
    for mu in range(2):
        assert check_leibniz(_W, _delta, f, g, mu, star=_star).ok


@settings(max_examples=10, deadline=None, derandomize=True)
@given(seeds)
def test_star_product_is_associative(seed):
    r = random.Random(seed)
    f, g, h = (gen.polynomial(r, 2, 2, 1) for _ in range(3))
    assert _star(_star(f, g), h) == _star(f, _star(g, h))
