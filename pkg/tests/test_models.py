import pytest
import sympy
from hypothesis import given, settings, strategies as st

from ncphase import (
    I, Q, TruncatedSeries, canonical_theta, coproduct_from_d, d_function_ode, extended_tensorial,
    fock_apply, kappa_minkowski, snyder_family, snyder_symmetric, verify_model, weyl_realization,
)
from ncphase.exceptions import DomainError, StructuralError
from ncphase.models import (
    MODEL_NAMES, build_model, phi_s_series, snyder_lorentz, snyder_phi1, snyder_phi2,
    tensorial_index, univariate,
)
from ncphase.realization import unit_polynomial


def failed(reports):
    return [r.name for r in reports if not r.ok]


@pytest.mark.parametrize("a,order", [([1, 0], 4), ([1, 0, 0], 3), ([Q(1, 2), 0, 1], 3), ([0, 1], 4)])
def test_kappa_closed_forms(a, order):
    assert failed(verify_model(kappa_minkowski(a, order=order))) == []


def test_kappa_zero_vector_is_undeformed():
    spec = kappa_minkowski([0, 0, 0], order=3)
    x = TruncatedSeries.vector(spec.realization.table, 3, "x")
    assert [op.series for op in spec.realization.operators] == x
    assert spec.structure.is_zero()


def test_phi_s_coefficients():
    phi = phi_s_series(4)
    assert [phi.terms.get((j,), 0) for j in range(5)] == [1, Q(-1, 2), Q(1, 12), 0, Q(-1, 720)]


def _rescaled(series, lam):
    return TruncatedSeries(series.table, series.order, {k: c * lam ** k[0] for k, c in series.terms.items()})


@settings(max_examples=8, deadline=None, derandomize=True)
@given(st.fractions(min_value=-3, max_value=3, max_denominator=3).filter(lambda v: v != 0))
def test_kappa_rescaling_commutes_with_engines(lam):
    lam = Q(lam.numerator, lam.denominator)
    a = [1, Q(1, 2), 0]
    base = kappa_minkowski(a, order=3).structure
    scaled = kappa_minkowski([lam * v for v in a], order=3).structure
    D, Ds = d_function_ode(base, 3), d_function_ode(scaled, 3)
    assert all(_rescaled(D[m], lam) == Ds[m] for m in range(3))
    W, Ws = weyl_realization(base, 3), weyl_realization(scaled, 3)
    assert all(_rescaled(W[m].series, lam) == Ws[m].series for m in range(3))


@pytest.mark.parametrize("n", [2, 3])
def test_tensorial_model(n):
    spec = extended_tensorial(n, order=3)
    assert failed(verify_model(spec)) == []
    assert len(spec.labels) == n + n * (n - 1) // 2
    assert spec.labels[n] == "x(01)"


def test_tensorial_index_map():
    assert tensorial_index(3) == {(0, 1): 3, (0, 2): 4, (1, 2): 5}
    with pytest.raises(StructuralError):
        extended_tensorial(1)


def test_tensorial_vector_momenta_undeformed():
    spec = extended_tensorial(3, order=3)
    delta = coproduct_from_d(d_function_ode(spec.structure, 3))
    for mu in range(3):
        assert delta[mu] == delta.primitive_part()[mu]


def test_theta_model():
    spec = canonical_theta([[0, 1, 0], [-1, 0, Q(1, 2)], [0, Q(-1, 2), 0]], order=2)
    assert failed(verify_model(spec)) == []
    R = spec.realization
    # [xh_1, xh_2] = i l theta_12
    assert R[1].commutator(R[2]).series == TruncatedSeries.grading_power(R.table, 2, 1, c=I * Q(1, 2))


def test_theta_must_be_antisymmetric():
    with pytest.raises(StructuralError):
        canonical_theta([[0, 1], [1, 0]])
    with pytest.raises(StructuralError):
        canonical_theta([[0, 1, 0], [-1, 0, 0]])


def test_snyder_phi1_against_sqrt_cot():
    u = sympy.Symbol("u", positive=True)
    ref = sympy.series(sympy.sqrt(u) * sympy.cot(sympy.sqrt(u)), u, 0, 6).removeO()
    phi1 = snyder_phi1(5)
    for j in range(6):
        c = sympy.Rational(ref.coeff(u, j))
        assert phi1.terms.get((j,), 0) == Q(int(c.p), int(c.q))
    assert [phi1.terms.get((j,), 0) for j in range(4)] == [1, Q(-1, 3), Q(-1, 45), Q(-2, 945)]


def test_snyder_phi2_relation():
    phi1 = snyder_phi1(6)
    phi2 = snyder_phi2(phi1)
    u = TruncatedSeries.grading_power(phi2.table, phi2.order)
    one = TruncatedSeries.one(phi2.table, phi2.order)
    assert u * phi2 == (one - phi1.truncate(phi2.order))
    assert phi2.terms[(0,)] == Q(1, 3)


def test_snyder_phi2_domain():
    with pytest.raises(DomainError):
        snyder_phi2(univariate([2, 1], "u"))


def test_snyder_trivial_phi1():
    spec = snyder_family(univariate([1, 0, 0], "u"), 1, n=3)
    assert spec.expectations["phi2"].truncate(0) == TruncatedSeries.one(spec.expectations["phi2"].table, 0)
    R = spec.realization
    t, sig = R.table, R.table.signature
    x = TruncatedSeries.vector(t, 1, "x")
    p = TruncatedSeries.vector(t, 1, "p")
    beta = TruncatedSeries.grading_power(t, 1)
    xp = sum((x[a] * p[a]).scale(sig[a]) for a in range(3))
    for m in range(3):
        assert R[m].series == x[m] + beta * xp * p[m]


@pytest.mark.parametrize("order", [1, 2])
def test_snyder_symmetric_checks(order):
    assert failed(verify_model(snyder_symmetric(order, n=3))) == []


def test_snyder_family_checks_with_other_phi1():
    spec = snyder_family(univariate([1, Q(1, 5), 3], "u"), 2, n=3)
    assert failed(verify_model(spec)) == []


def test_lorentz_generators_annihilate_vacuum():
    R = snyder_symmetric(1, n=4).realization
    one = unit_polynomial(R.table, R.pairs)
    for m in range(4):
        for v in range(m + 1, 4):
            assert fock_apply(snyder_lorentz(R, m, v), one).is_zero()


def test_snyder_family_validation():
    with pytest.raises(StructuralError):
        snyder_family(univariate([1, 0], "u"), 0)
    with pytest.raises(StructuralError):
        snyder_family(univariate([1], "u"), 2)


def test_registry():
    assert MODEL_NAMES == ("kappa", "tensorial", "theta", "snyder")
    for name in MODEL_NAMES:
        spec = build_model(name, 1)
        assert spec.name == name
        assert failed(verify_model(spec)) == []


def test_snyder_order_one_keeps_beta_terms():
    spec = snyder_symmetric(1, n=3)
    R = spec.realization
    assert all(R[m].series == spec.expectations["first_order"][m].series for m in range(3))
