from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ncphase import (
    I, Q, StarProduct, StructureConstants, TruncatedSeries, VariableTable, check_associativity,
    d_function_diffop, d_function_ode, d_function_oracle, dilation_realization, kappa_minkowski, polynomial, snyder_symmetric, star_product,
    weyl_realization,
)
from ncphase.exceptions import DomainError, StructuralError
from ncphase.lie import c_matrix, psi_of_matrix
from ncphase.star import DFunction, d_table


def su2():
    return StructureConstants(3, {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1}, (1, 1, 1))


def kappa(a):
    return kappa_minkowski(a, order=1).structure


def mono(n, *exps):
    return polynomial(n, {tuple(exps): 1})


def test_zero_structure_all_solvers():
    C = StructureConstants(2, {})
    t = d_table(2)
    want = [a + b for a, b in zip(TruncatedSeries.vector(t, 3, "k"), TruncatedSeries.vector(t, 3, "q"))]
    assert list(d_function_ode(C, 3).components) == want
    assert list(d_function_diffop(weyl_realization(C, 3)).components) == want
    assert list(d_function_oracle(C, 3).components) == want


def _k_times(M, k, sig, n):
    out = []
    for mu in range(n):
        s = TruncatedSeries.zero(k[0].table, k[0].order)
        for a in range(n):
            t = k[a] * M[a][mu]
            s = s - t if sig[a] < 0 else s + t
        out.append(s)
    return out


def test_first_order_d():
    C = kappa([1, 2, 0])
    D = d_function_ode(C, 1)
    t, sig = D.table, D.table.signature
    k = TruncatedSeries.vector(t, 1, "k")
    q = TruncatedSeries.vector(t, 1, "q")
    kC = _k_times(c_matrix(C, t, 1, "q", graded=True), k, sig, 3)
    for mu in range(3):
        assert D[mu] == k[mu] + q[mu] + kC[mu].scale(Q(1, 2))


@pytest.mark.parametrize("C", [kappa([1, 0, 0]), su2()], ids=["kappa3", "su2"])
def test_d_boundary_values_and_linear_part(C):
    D = d_function_ode(C, 4)
    t = D.table
    k = TruncatedSeries.vector(t, 4, "k")
    q = TruncatedSeries.vector(t, 4, "q")
    zero = [TruncatedSeries.zero(t, 4)] * C.n
    for mu in range(C.n):
        assert D[mu].compose({"q": zero}) == k[mu]
        assert D[mu].compose({"k": zero}) == q[mu]
    # D - q - k psi(l C(q)) is at least quadratic in k
    lin = _k_times(psi_of_matrix(c_matrix(C, t, 4, "q", graded=True), 4), k, t.signature, C.n)
    for mu in range(C.n):
        rest = D[mu] - q[mu] - lin[mu]
        off = t.offset("k")
        assert all(sum(key[off:off + C.n]) >= 2 for key in rest.terms)


@pytest.mark.parametrize("C", [kappa([1, 0]), kappa([1, 0, 1]), su2()], ids=["kappa2", "kappa3", "su2"])
def test_opposite_d_swaps_arguments(C):
    D = d_function_ode(C, 4)
    Dop = d_function_ode(C.negated(), 4)
    t = D.table
    k = TruncatedSeries.vector(t, 4, "k")
    q = TruncatedSeries.vector(t, 4, "q")
    for mu in range(C.n):
        assert Dop[mu].compose({"k": q, "q": k}) == D[mu]


rationals = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@settings(max_examples=12, deadline=None, derandomize=True)
@given(st.lists(rationals, min_size=2, max_size=3))
def test_triple_solver_agreement_random_kappa(a):
    C = kappa([Q(v.numerator, v.denominator) for v in a])
    D = d_function_ode(C, 3)
    assert D == d_function_diffop(weyl_realization(C, 3))
    assert D == d_function_oracle(C, 3)
    assert check_associativity(D).ok


def test_trivial_d_is_associative():
    t = d_table(2)
    D = DFunction(tuple(a + b for a, b in zip(TruncatedSeries.vector(t, 3, "k"), TruncatedSeries.vector(t, 3, "q"))))
    assert check_associativity(D).ok


def test_snyder_d_is_curved_and_nonassociative():
    R = snyder_symmetric(2, n=3).realization
    D = d_function_diffop(R)
    t = D.table
    k = TruncatedSeries.vector(t, 2, "k")
    q = TruncatedSeries.vector(t, 2, "q")
    assert any((D[mu] - k[mu] - q[mu]).grading_part(1).terms for mu in range(3))
    rep = check_associativity(D)
    assert not rep.ok
    assert rep.witness()[1][0] == 1


def test_star_unit_and_commutator():
    C = kappa([1, 0, 0])
    R = weyl_realization(C, 3)
    star = StarProduct(R)
    one = polynomial(3)
    f = mono(3, 1, 2, 0)
    assert star(f, one) == star(one, f) == f.embed(star(f, one).table).with_order(3)
    for mu in range(3):
        for nu in range(3):
            e = [0, 0, 0]
            e[mu] += 1
            xm = polynomial(3, {tuple(e): 1})
            e2 = [0, 0, 0]
            e2[nu] += 1
            xn = polynomial(3, {tuple(e2): 1})
            comm = star(xm, xn) - star(xn, xm)
            t = comm.table
            want = TruncatedSeries.zero(t, 3)
            for a in range(3):
                c = C[mu, nu, a]
                if c:
                    term = TruncatedSeries.grading_power(t, 3, 1, c=I * c) * TruncatedSeries.var(t, 3, "x", a)
                    want = want - term if C.signature[a] < 0 else want + term
            assert comm == want


def test_star_known_value():
    R = weyl_realization(kappa([1, 0]), 3)
    got = star_product(R, mono(2, 1, 0), mono(2, 0, 1))
    assert got.render() == "x0*x1 + 1/2*i*l*x1"


@pytest.mark.parametrize("C", [kappa([1, 0]), su2()], ids=["kappa2", "su2"])
def test_star_associative_on_low_degree_monomials(C):
    R = weyl_realization(C, 3)
    star = StarProduct(R)
    n = C.n
    monos = [mono(n, *e) for e in ([1] + [0] * (n - 1), [0, 1] + [0] * (n - 2), [1, 1] + [0] * (n - 2))]
    for f in monos:
        for g in monos:
            for h in monos[:2]:
                assert star(star(f, g), h) == star(f, star(g, h))


def test_opposite_star_product():
    C = su2()
    star = StarProduct(weyl_realization(C, 3))
    star_op = StarProduct(weyl_realization(C.negated(), 3))
    f, g = mono(3, 1, 1, 0), mono(3, 0, 1, 1)
    assert star_op(f, g) == star(g, f)


def test_dfunction_needs_momenta():
    t = VariableTable(2, ("k",))
    with pytest.raises(StructuralError):
        DFunction((TruncatedSeries.one(t, 1),) * 2)


def test_diffop_rejects_quadratic_realizations():
    with pytest.raises(DomainError):
        d_function_diffop(dilation_realization([[0, 1], [-1, 0]], 1))


def test_fraction_inputs_accepted():
    C = kappa([Fraction(1, 2), 0])
    assert d_function_ode(C, 2) == d_function_oracle(C, 2)
