import pytest

from ncphase import (
    I, PhaseSpaceOperator, Q, StructureConstants, TruncatedSeries, canonical_theta,
    extended_tensorial, k_function, kappa_minkowski, verify_commutators, weyl_realization,
)
from ncphase.exceptions import DomainError, StructuralError
from ncphase.lie import c_matrix, matmul
from ncphase.realization import (
    Realization, exponential_action_residual, linear_realization, omega, symmetrize,
    weyl_property_residual,
)


def su2():
    return StructureConstants(3, {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1}, (1, 1, 1))


def kappa(a):
    return kappa_minkowski(a, order=1).structure


def test_zero_structure_gives_undeformed_coordinates():
    R = weyl_realization(StructureConstants(3, {}), 3)
    x = TruncatedSeries.vector(R.table, 3, "x")
    assert [op.series for op in R.operators] == x


@pytest.mark.parametrize("C", [kappa([1, 0, 0]), kappa([1, 2]), su2()], ids=["kappa3", "kappa2", "su2"])
def test_weyl_expansion_through_third_order(C):
    # x_mu + (l/2) x_a C(p)_{mu a} + (l^2/12) x_a (C(p)^2)_{mu a}, with no l^3 term
    R = weyl_realization(C, 3)
    t, sig = R.table, R.table.signature
    M = c_matrix(C, t, 3, graded=True)
    M2 = matmul(M, M, sig)
    x = TruncatedSeries.vector(t, 3, "x")
    for mu in range(C.n):
        want = x[mu]
        for a in range(C.n):
            term = x[a] * (M[mu][a].scale(Q(1, 2)) + M2[mu][a].scale(Q(1, 12)))
            want = want - term if sig[a] < 0 else want + term
        assert R[mu].series == want


@pytest.mark.parametrize("C", [kappa([1, 0, 0]), kappa([0, 1, 1]), su2(), extended_tensorial(2, 1).structure])
def test_weyl_commutators_close(C):
    assert verify_commutators(weyl_realization(C, 4), C) == {}


def test_tensorial_brackets_vanish_where_expected():
    spec = extended_tensorial(2, order=3)
    R = weyl_realization(spec.structure, 3)
    assert R[0].commutator(R[2]).is_zero() and R[1].commutator(R[2]).is_zero()
    il = PhaseSpaceOperator(TruncatedSeries.grading_power(R.table, 3, 1, c=I) * R[2].series)
    # slot 2 = x_(01) has metric eta_0 eta_1 = -1, so C_{01,(01)} eta = il x_(01)
    assert R[0].commutator(R[1]) == il


def test_weyl_property_low_n():
    R = weyl_realization(su2(), 3)
    for N in range(1, 5):
        assert weyl_property_residual(R, N).is_zero()


def test_k_function_weyl_is_identity():
    R = weyl_realization(kappa([1, 0, 0]), 3)
    kf = k_function(R)
    assert list(kf.K) == TruncatedSeries.vector(kf.K[0].table, 3, "k")
    assert kf.L is None or kf.L.is_zero()


def natural_kappa():
    # xh_0 = x_0 - l x_1 p_1, xh_1 = x_1 closes [xh_0, xh_1] = i l xh_1
    C = kappa([1, 0])
    t = PhaseSpaceOperator.operator_table(2)
    x = TruncatedSeries.vector(t, 3, "x")
    p = TruncatedSeries.vector(t, 3, "p")
    l = TruncatedSeries.grading_power(t, 3)
    R = Realization((PhaseSpaceOperator(x[0] - l * x[1] * p[1]), PhaseSpaceOperator(x[1])), "linear-in-x")
    return C, R


def test_non_weyl_kappa_has_deformed_k():
    C, R = natural_kappa()
    assert verify_commutators(R, C) == {}
    kf = k_function(R)
    k = TruncatedSeries.vector(kf.K[0].table, 3, "k")
    assert (kf.K[1] - k[1]).min_grading_degree() == 1
    assert not weyl_property_residual(R, 2).is_zero()


@pytest.mark.parametrize("which", ["natural", "weyl", "theta"])
def test_k_function_matches_exponential_action(which):
    if which == "natural":
        R = natural_kappa()[1]
    elif which == "weyl":
        R = weyl_realization(kappa([1, 1, 0]), 2)
    else:
        R = canonical_theta([[0, 1], [-1, 0]], order=2).realization
    assert exponential_action_residual(R, cap=4).is_zero()


def test_theta_k_and_phase():
    R = canonical_theta([[0, 2, 0], [-2, 0, 1], [0, -1, 0]], order=2).realization
    kf = k_function(R)
    assert list(kf.K) == TruncatedSeries.vector(kf.K[0].table, 2, "k")
    assert kf.L.is_zero()


def test_symmetrize_examples():
    assert symmetrize([0]) == [(1, (0,))]
    assert symmetrize([0, 1]) == [(Q(1, 2), (0, 1)), (Q(1, 2), (1, 0))]
    assert symmetrize([0, 0, 1]) == [(Q(1, 3), w) for w in ((0, 0, 1), (0, 1, 0), (1, 0, 0))]
    with pytest.raises(StructuralError):
        symmetrize([])


def test_omega_on_generators_and_commutators():
    C = su2()
    R = weyl_realization(C, 3)
    x = TruncatedSeries.vector(omega(R, [0]).table, 3, "x")
    for mu in range(3):
        assert omega(R, [mu]) == x[mu]
    for mu in range(3):
        for nu in range(3):
            want = TruncatedSeries.zero(x[0].table, 3)
            for a in range(3):
                if C[mu, nu, a]:
                    want = want + (TruncatedSeries.grading_power(x[0].table, 3, 1, c=I * C[mu, nu, a]) * x[a])
            assert omega(R, [mu, nu]) - omega(R, [nu, mu]) == want


def test_omega_inverts_symmetrization_for_weyl():
    R = weyl_realization(kappa([1, 0, 0]), 3)
    for word in ([0, 1], [0, 0, 2], [0, 1, 2, 2]):
        got = omega(R, symmetrize(word))
        mono = TruncatedSeries.monomial(got.table, 3, {"x": [word.count(i) for i in range(3)]})
        assert got == mono


@pytest.mark.parametrize("C", [kappa([1, 0]), kappa([1, 1, 0]), su2()], ids=["kappa2", "kappa3", "su2"])
def test_opposite_generators_commute(C):
    X = weyl_realization(C, 3)
    Y = weyl_realization(C.negated(), 3)
    for mu in range(C.n):
        for nu in range(C.n):
            assert X[mu].commutator(Y[nu]).is_zero()


def test_realization_validation():
    t = PhaseSpaceOperator.operator_table(2)
    x = TruncatedSeries.vector(t, 2, "x")
    with pytest.raises(StructuralError):
        Realization((PhaseSpaceOperator(x[1]), PhaseSpaceOperator(x[0])), "linear-in-x")
    with pytest.raises(StructuralError):
        Realization((PhaseSpaceOperator(x[0]),), "linear-in-x")


def test_k_function_rejects_quadratic_kind():
    t = PhaseSpaceOperator.operator_table(2, signature=(1, 1))
    x = TruncatedSeries.vector(t, 1, "x")
    p = TruncatedSeries.vector(t, 1, "p")
    l = TruncatedSeries.grading_power(t, 1)
    R = Realization((PhaseSpaceOperator(x[0] + l * x[0] * x[1] * p[1]), PhaseSpaceOperator(x[1])), "quadratic-in-x")
    with pytest.raises(DomainError):
        k_function(R)


def test_linear_realization_affine_kind():
    t = PhaseSpaceOperator.operator_table(2)
    eye = [[TruncatedSeries.one(t, 1) if a == m else TruncatedSeries.zero(t, 1) for m in range(2)] for a in range(2)]
    # the x_a R[a][mu] convention: R = identity gives xh = x without metric factors
    chi = [TruncatedSeries.grading_power(t, 1), TruncatedSeries.zero(t, 1)]
    assert linear_realization(eye, t, 1, chi).kind == "affine"
    assert linear_realization(eye, t, 1).kind == "linear-in-x"
