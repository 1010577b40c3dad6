import pytest

from ncphase import (
    I, PhaseSpaceOperator, Q, StarProduct, StructureConstants, TruncatedSeries, TwistOperator,
    canonical_theta, check_coassociativity, check_leibniz, coproduct_from_d, d_function_ode,
    extended_tensorial, kappa_minkowski, ln_twist, ln_twist_check, polynomial, snyder_symmetric,
    VariableTable, twist_apply, weyl_realization,
)
from ncphase.exceptions import StructuralError
from ncphase.lie import c_matrix, matmul
from ncphase.models import tensorial_coproduct_display, tensorial_index
from ncphase.star import d_function_diffop
from ncphase.twist import (
    DOUBLE_PAIRS, Coproduct, doubled_table, opposite_twist_inverse, realization_from_twist,
    weyl_twist_inverse,
)


def su2():
    return StructureConstants(3, {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1}, (1, 1, 1))


def kappa(a):
    return kappa_minkowski(a, order=1).structure


def x(n, i, sig=None):
    e = [0] * n
    e[i] = 1
    return polynomial(n, {tuple(e): 1}, signature=sig)


def test_undeformed_coproduct():
    delta = coproduct_from_d(d_function_ode(StructureConstants(2, {}), 3))
    assert delta.components == delta.primitive_part()
    assert check_coassociativity(delta).ok


@pytest.mark.parametrize("C", [kappa([1, 0, 0]), su2()], ids=["kappa3", "su2"])
def test_coproduct_through_second_order(C):
    # pL + pR + (l/2) pL C(pR) + (l^2/12)(pL C(pR)^2 + pR C(pL)^2)
    delta = coproduct_from_d(d_function_ode(C, 2))
    t, sig = delta.table, delta.table.signature
    pL = TruncatedSeries.vector(t, 2, "pL")
    pR = TruncatedSeries.vector(t, 2, "pR")
    CR = c_matrix(C, t, 2, "pR", graded=True)
    CL = c_matrix(C, t, 2, "pL", graded=True)
    CR2, CL2 = matmul(CR, CR, sig), matmul(CL, CL, sig)
    for mu in range(C.n):
        want = pL[mu] + pR[mu]
        for a in range(C.n):
            term = (pL[a] * CR[a][mu]).scale(Q(1, 2)) + (pL[a] * CR2[a][mu] + pR[a] * CL2[a][mu]).scale(Q(1, 12))
            want = want - term if sig[a] < 0 else want + term
        assert delta[mu] == want


@pytest.mark.parametrize("C", [kappa([1, 0]), kappa([0, 1, 1]), su2()], ids=["kappa2", "kappa3", "su2"])
def test_counit_and_antipode(C):
    delta = coproduct_from_d(d_function_ode(C, 3))
    t = delta.table
    pL = TruncatedSeries.vector(t, 3, "pL")
    zero = [TruncatedSeries.zero(t, 3)] * C.n
    for mu in range(C.n):
        assert delta[mu].compose({"pR": zero}) == pL[mu]
        assert delta[mu].compose({"pR": [-v for v in pL]}).is_zero()


def test_snyder_coproduct_is_not_coassociative():
    D = d_function_diffop(snyder_symmetric(2, n=3).realization)
    assert not check_coassociativity(coproduct_from_d(D)).ok


@pytest.mark.parametrize("C", [kappa([1, 0]), su2(), extended_tensorial(2, 1).structure],
                         ids=["kappa2", "su2", "tensorial"])
def test_leibniz_on_low_degree_monomials(C):
    R = weyl_realization(C, 2)
    delta = coproduct_from_d(d_function_ode(C, 2))
    star = StarProduct(R)
    n, sig = C.n, C.signature
    monos = [x(n, 0, sig), x(n, 1, sig), polynomial(n, {tuple([1, 1] + [0] * (n - 2)): 1}, signature=sig),
             polynomial(n, signature=sig)]
    for f in monos:
        for g in monos[:2]:
            for mu in range(n):
                assert check_leibniz(R, delta, f, g, mu, star=star).ok


def test_leibniz_trivial_inputs():
    C = kappa([1, 0])
    R = weyl_realization(C, 2)
    delta = coproduct_from_d(d_function_ode(C, 2))
    one = polynomial(2)
    rep = check_leibniz(R, delta, one, one, 0)
    assert rep.ok


def test_tensorial_literal_coproduct_breaks_leibniz():
    # the i l/2 reading of the tensorial coproduct is not compatible with the star product
    C = extended_tensorial(2, 2).structure
    R = weyl_realization(C, 2)
    shown = tensorial_coproduct_display(2, 2)
    x0, x1 = x(3, 0, C.signature), x(3, 1, C.signature)
    assert not check_leibniz(R, shown, x0, x1, 2).ok
    engine = coproduct_from_d(d_function_ode(C, 2))
    assert check_leibniz(R, engine, x0, x1, 2).ok


def test_identity_twist_is_pointwise():
    T = TwistOperator.identity(2, 2)
    f = polynomial(2, {(1, 1): 2, (0, 2): 1})
    g = polynomial(2, {(1, 0): Q(1, 3)})
    got = twist_apply(T, f, g)
    assert got == (f * g).embed(got.table).with_order(2)


@pytest.mark.parametrize("C", [kappa([1, 0]), su2()], ids=["kappa2", "su2"])
def test_weyl_twist_matches_star_product(C):
    R = weyl_realization(C, 2)
    T = weyl_twist_inverse(R)
    star = StarProduct(R)
    n = C.n
    for f in (x(n, 0), x(n, 1), polynomial(n, {tuple([1, 1] + [0] * (n - 2)): 1})):
        for g in (x(n, 0), x(n, 1)):
            assert twist_apply(T, f, g) == star(f, g)


def test_theta_twist_on_coordinates():
    th = [[0, 3], [-3, 0]]
    spec = canonical_theta(th, order=2)
    T = spec.expectations["twist"]
    got = twist_apply(T, x(2, 0), x(2, 1))
    t = got.table
    want = TruncatedSeries.var(t, 2, "x", 0) * TruncatedSeries.var(t, 2, "x", 1) \
        + TruncatedSeries.grading_power(t, 2, 1, c=I * Q(3, 2))
    assert got == want
    star = StarProduct(spec.realization)
    assert star(x(2, 0), x(2, 1)) == want


def test_identity_twist_realization():
    T = TwistOperator.identity(3, 2)
    for mu in range(3):
        op = realization_from_twist(T, mu)
        assert op.series == TruncatedSeries.var(op.table, 2, "x", mu)


def test_tensorial_twist_realization():
    n = 2
    spec = extended_tensorial(n, order=2)
    idx, sig = tensorial_index(n), spec.signature
    t = doubled_table(len(sig), signature=sig)
    xL = TruncatedSeries.vector(t, 2, "xL")
    pL = TruncatedSeries.vector(t, 2, "pL")
    pR = TruncatedSeries.vector(t, 2, "pR")
    e = TruncatedSeries.zero(t, 2)
    for a in range(n):
        for b in range(n):
            if a != b:
                xt = xL[idx[(a, b)]] if a < b else -xL[idx[(b, a)]]
                e = e + (xt * pL[a] * pR[b]).scale(sig[a] * sig[b])
    T = TwistOperator((PhaseSpaceOperator(e * TruncatedSeries.grading_power(t, 2, 1, c=-I * Q(1, 2)), DOUBLE_PAIRS),))
    for mu in range(len(sig)):
        assert realization_from_twist(T, mu).series == spec.realization[mu].series


@pytest.mark.parametrize("C", [kappa([1, 0]), su2()], ids=["kappa2", "su2"])
def test_twist_realizations(C):
    W = weyl_realization(C, 2)
    T = weyl_twist_inverse(W)
    for mu in range(C.n):
        assert realization_from_twist(T, mu).series == W[mu].series
    Top = opposite_twist_inverse(weyl_realization(C.negated(), 2))
    for mu in range(C.n):
        assert realization_from_twist(Top, mu, right_momentum_cap=3).series == W[mu].series


def test_ln_twist_zero_structure():
    assert ln_twist(StructureConstants(2, {}), 2).is_zero()


@pytest.mark.parametrize("C", [kappa([1, 0]), kappa([1, 1, 0]), su2()], ids=["kappa2", "kappa3", "su2"])
def test_ln_twist_expanded_form(C):
    assert ln_twist_check(C, 2, form="expanded").ok


def test_ln_twist_first_order_agrees_with_display():
    for C in (kappa([1, 0]), su2()):
        assert ln_twist_check(C, 1, form="display").ok


def test_coproduct_needs_both_legs():
    with pytest.raises(StructuralError):
        Coproduct((TruncatedSeries.one(VariableTable(2, ("pL",)), 1),) * 2)
