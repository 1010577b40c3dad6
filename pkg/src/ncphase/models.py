"""Concrete noncommutative spaces with closed-form expectations.

Each constructor returns a :class:`ModelSpec` whose ``expectations`` hold
exact series built from closed formulas, independently of the generic
engines.  :func:`verify_model` runs the engines and compares.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import factorial
from typing import Mapping, Sequence

from .exact import I, Q, as_rational
from .exceptions import DomainError, StructuralError
from .heisenberg import PhaseSpaceOperator, fock_apply
from .lie import StructureConstants, check_jacobi
from .realization import (Realization, k_function, linear_realization, unit_polynomial,
                          verify_commutators, weyl_realization)
from .report import Report
from .series import TruncatedSeries, VariableTable, minkowski
from .star import check_associativity, d_function_diffop, d_function_ode
from .twist import (DOUBLE_PAIRS, Coproduct, TwistOperator, check_coassociativity, coproduct_from_d,
                    doubled_table, twist_apply)

__all__ = [
    "ModelSpec",
    "kappa_minkowski",
    "extended_tensorial",
    "tensorial_index",
    "tensorial_coproduct_display",
    "canonical_theta",
    "snyder_family",
    "snyder_symmetric",
    "snyder_phi1",
    "univariate",
    "phi_s_series",
    "verify_model",
    "MODEL_NAMES",
    "build_model",
]


@dataclass(frozen=True)
class ModelSpec:
    name: str
    dimension: int
    order: int
    structure: StructureConstants | None = None
    realization: Realization | None = None
    expectations: Mapping[str, object] = field(default_factory=dict)
    labels: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def signature(self) -> tuple[int, ...]:
        if self.structure is not None:
            return self.structure.signature
        return self.realization.table.signature


# -- univariate helpers --------------------------------------------------------

def univariate(coeffs: Sequence, symbol: str = "t") -> TruncatedSeries:
    """``sum_j coeffs[j] symbol^j`` truncated at ``len(coeffs) - 1``."""
    t = VariableTable(1, (), symbol)
    return TruncatedSeries(t, len(coeffs) - 1, {(j,): c for j, c in enumerate(coeffs)})


def _coeffs(f: TruncatedSeries) -> list:
    out = [Q(0)] * (f.order + 1)
    for k, c in f.terms.items():
        out[k[0]] = c
    return out


def _substitute(f: TruncatedSeries, arg: TruncatedSeries) -> TruncatedSeries:
    """``f(arg)`` for univariate ``f``; ``arg`` must carry positive grading."""
    return f.compose({}, arg.table, grading=arg)


def phi_s_series(order: int) -> TruncatedSeries:
    """``t / (e^t - 1)`` by exact division of ``(e^t - 1)/t``."""
    return univariate([Q(1, factorial(j + 1)) for j in range(order + 1)]).reciprocal()


def _shift_down(f: TruncatedSeries) -> TruncatedSeries:
    """``(f - f(0)) / t``."""
    c = _coeffs(f)
    return univariate(c[1:] or [Q(0)], f.table.grading)


def _dot(u, v, sig, table, order):
    acc = TruncatedSeries.zero(table, order)
    for a in range(len(u)):
        term = u[a] * v[a]
        acc = acc - term if sig[a] < 0 else acc + term
    return acc


def _rationals(values, n=None, what="vector"):
    vals = [as_rational(v) for v in values]
    if n is not None and len(vals) != n:
        raise StructuralError(f"{what} needs {n} entries, got {len(vals)}")
    return vals


# -- kappa-Minkowski -------------------------------------------------------------

def kappa_structure(a: Sequence, signature=None) -> StructureConstants:
    a = _rationals(a)
    n = len(a)
    sig = minkowski(n) if signature is None else tuple(signature)
    entries = {}
    for mu in range(n):
        for nu in range(mu + 1, n):
            for lam in range(n):
                v = (a[mu] * sig[nu] if nu == lam else 0) - (a[nu] * sig[mu] if mu == lam else 0)
                if v:
                    entries[(mu, nu, lam)] = v
    return StructureConstants(n, entries, sig)


def kappa_minkowski(a: Sequence, n: int | None = None, order: int = 4, signature=None) -> ModelSpec:
    """``[xh_mu, xh_nu] = i l (a_mu xh_nu - a_nu xh_mu)`` with closed forms.

    With ``A = -l a.p`` and ``phi_S(A) = A/(e^A - 1)``:
    ``xh_mu = x_mu phi_S(A) - l a_mu (x.p) (1 - phi_S(A))/A``.
    """
    a = _rationals(a, n, "a")
    C = kappa_structure(a, signature)
    n = C.n
    sig = C.signature
    t = PhaseSpaceOperator.operator_table(n, signature=sig)
    x = TruncatedSeries.vector(t, order, "x")
    p = TruncatedSeries.vector(t, order, "p")
    la = [TruncatedSeries.grading_power(t, order, 1, c=v) for v in a]
    A = -_dot(la, p, sig, t, order)
    xp = _dot(x, p, sig, t, order)
    phi = phi_s_series(order + 1)
    phiA = _substitute(phi.truncate(order), A)
    gA = _substitute(_shift_down(-phi), A)  # (1 - phi_S(A))/A
    ops = tuple(PhaseSpaceOperator(x[mu] * phiA - la[mu] * xp * gA) for mu in range(n))
    closed = Realization(ops, "linear-in-x", "user")

    # [p_mu, xh_nu] = -i eta_{mu nu} phi_S(A) + i l a_nu p_mu (1 - phi_S(A))/A
    brackets = {}
    for mu in range(n):
        for nu in range(n):
            s = (la[nu] * p[mu] * gA).scale(I)
            if mu == nu:
                s = s - phiA.scale(I * sig[mu])
            brackets[(mu, nu)] = PhaseSpaceOperator(s)

    ct = VariableTable(n, ("pL", "pR"), "l", sig)
    pL = TruncatedSeries.vector(ct, order, "pL")
    pR = TruncatedSeries.vector(ct, order, "pR")
    laL = [TruncatedSeries.grading_power(ct, order, 1, c=v) for v in a]
    AL = -_dot(laL, pL, sig, ct, order)
    AR = -_dot(laL, pR, sig, ct, order)
    ph = phi.truncate(order)
    inv_ph = univariate([Q(1, factorial(j + 1)) for j in range(order + 1)])  # 1/phi_S
    coproduct = Coproduct(tuple(
        _substitute(ph, AL + AR) * pL[mu] * _substitute(inv_ph, AL)
        + _substitute(ph, -AL - AR) * pR[mu] * _substitute(inv_ph, -AR)
        for mu in range(n)))
    return ModelSpec(
        "kappa", n, order, C, closed,
        {"realization": closed, "momentum_brackets": brackets, "coproduct": coproduct},
        tuple(f"x{m}" for m in range(n)))


# -- extended tensorial coordinates ---------------------------------------------

def tensorial_index(n: int) -> dict[tuple[int, int], int]:
    """Flat index of ``x_(mu nu)`` for ``mu < nu``, placed after the ``n`` vector slots."""
    return {pair: n + j for j, pair in enumerate(combinations(range(n), 2))}


def _tensorial_signature(n, signature):
    sig = minkowski(n) if signature is None else tuple(signature)
    return sig + tuple(sig[m] * sig[v] for m, v in combinations(range(n), 2))


def extended_tensorial(n: int, order: int = 4, signature=None) -> ModelSpec:
    """Vector coordinates plus antisymmetric tensorial ones, ``[xh_mu, xh_nu] = i l xh_(mu nu)``.

    The tensorial slot ``(mu nu)`` carries metric ``eta_mu eta_nu``.  Summing the
    two orderings of ``C_{mu nu (ab)}`` doubles the 1/2, so the flattened
    constant is ``C_{mu nu, (mu nu)} = eta_mu eta_nu``.
    """
    if n < 2:
        raise StructuralError("extended tensorial space needs n >= 2")
    idx = tensorial_index(n)
    sig = _tensorial_signature(n, signature)
    N = len(sig)
    C = StructureConstants(N, {(m, v, k): sig[k] for (m, v), k in idx.items()}, sig)
    t = PhaseSpaceOperator.operator_table(N, signature=sig)
    x = TruncatedSeries.vector(t, order, "x")
    p = TruncatedSeries.vector(t, order, "p")
    half_l = TruncatedSeries.grading_power(t, order, 1, c=Q(-1, 2))
    ops = []
    for mu in range(N):
        s = x[mu]
        if mu < n:
            # -(l/2) x_{mu a} p_a, with x_{mu a} = -x_{a mu}
            for al in range(n):
                if al == mu:
                    continue
                xt = x[idx[(mu, al)]] if mu < al else -x[idx[(al, mu)]]
                term = half_l * xt * p[al]
                s = s - term if sig[al] < 0 else s + term
        ops.append(PhaseSpaceOperator(s))
    closed = Realization(tuple(ops), "linear-in-x", "user")

    ct = VariableTable(N, ("pL", "pR"), "l", sig)
    pL = TruncatedSeries.vector(ct, order, "pL")
    pR = TruncatedSeries.vector(ct, order, "pR")
    coproduct = []
    for A in range(N):
        s = pL[A] + pR[A]
        if A >= n:
            m, v = next(pair for pair, k in idx.items() if k == A)
            s = s + (pL[m] * pR[v] - pL[v] * pR[m]) * TruncatedSeries.grading_power(ct, order, 1, c=Q(-1, 2))
        coproduct.append(s)
    labels = tuple(f"x{m}" for m in range(n)) + tuple(f"x({m}{v})" for m, v in idx)
    return ModelSpec("tensorial", N, order, C, closed,
                     {"realization": closed, "coproduct": Coproduct(tuple(coproduct)), "base_dimension": n},
                     labels)


def tensorial_coproduct_display(n: int, order: int = 4, signature=None) -> Coproduct:
    """The tensorial coproduct with the literal coefficient ``i l/2``:
    ``Delta p_(mu nu) = p_(mu nu) (x) 1 + 1 (x) p_(mu nu) + (i l/2)(p_mu (x) p_nu - p_nu (x) p_mu)``."""
    idx = tensorial_index(n)
    sig = _tensorial_signature(n, signature)
    ct = VariableTable(len(sig), ("pL", "pR"), "l", sig)
    pL = TruncatedSeries.vector(ct, order, "pL")
    pR = TruncatedSeries.vector(ct, order, "pR")
    il2 = TruncatedSeries.grading_power(ct, order, 1, c=I * Q(1, 2))
    comps = [pL[A] + pR[A] for A in range(len(sig))]
    for (m, v), A in idx.items():
        comps[A] = comps[A] + il2 * (pL[m] * pR[v] - pL[v] * pR[m])
    return Coproduct(tuple(comps))


# -- canonical theta ------------------------------------------------------------

def canonical_theta(theta: Sequence[Sequence], order: int = 2, signature=None) -> ModelSpec:
    """Constant noncommutativity ``[xh_mu, xh_nu] = i l theta_{mu nu}``.

    ``l`` marks the powers of ``theta``.  Realization ``xh_mu = x_mu - (l/2) theta_{mu a} p_a``,
    twist ``F^{-1} = exp(-(i l/2) theta_{ab} p_a (x) p_b)``.
    """
    th = [_rationals(row) for row in theta]
    n = len(th)
    if any(len(row) != n for row in th):
        raise StructuralError("theta must be square")
    for m in range(n):
        for v in range(n):
            if th[m][v] != -th[v][m]:
                raise StructuralError(f"theta is not antisymmetric at ({m},{v})")
    sig = minkowski(n) if signature is None else tuple(signature)
    t = PhaseSpaceOperator.operator_table(n, signature=sig)
    p = TruncatedSeries.vector(t, order, "p")
    R = [[TruncatedSeries.one(t, order) if a == m else TruncatedSeries.zero(t, order) for m in range(n)]
         for a in range(n)]
    chi = []
    for m in range(n):
        s = TruncatedSeries.zero(t, order)
        for a in range(n):
            if th[m][a]:
                s = s + p[a].scale(Q(-1, 2) * th[m][a] * sig[a])
        chi.append(s * TruncatedSeries.grading_power(t, order, 1))
    closed = linear_realization(R, t, order, chi)
    dt = doubled_table(n, (), "l", sig)
    pL = TruncatedSeries.vector(dt, order, "pL")
    pR = TruncatedSeries.vector(dt, order, "pR")
    expo = TruncatedSeries.zero(dt, order)
    for a in range(n):
        for b in range(n):
            if th[a][b]:
                expo = expo + (pL[a] * pR[b]).scale(I * Q(-1, 2) * th[a][b] * sig[a] * sig[b])
    expo = expo * TruncatedSeries.grading_power(dt, order, 1)
    twist = TwistOperator((PhaseSpaceOperator(expo, DOUBLE_PAIRS),), "theta")
    brackets = {(m, v): th[m][v] for m in range(n) for v in range(m + 1, n)}
    return ModelSpec("theta", n, order, None, closed,
                     {"realization": closed, "twist": twist, "brackets": brackets, "theta": th},
                     tuple(f"x{m}" for m in range(n)))


# -- Snyder -------------------------------------------------------------------------

def _snyder_realization(phi1: TruncatedSeries, phi2: TruncatedSeries, n: int, order: int, signature):
    sig = minkowski(n) if signature is None else tuple(signature)
    t = PhaseSpaceOperator.operator_table(n, grading="beta", signature=sig)
    p = TruncatedSeries.vector(t, order, "p")
    beta = TruncatedSeries.grading_power(t, order, 1)
    u = beta * _dot(p, p, sig, t, order)
    f1 = _substitute(phi1.truncate(order), u)
    # phi2 is needed only to u^(order-1); the extra beta restores full precision
    low = _substitute(phi2.truncate(max(order - 1, 0)), u)
    f2 = beta * TruncatedSeries(t, order, low.terms)
    R = [[(f1 if a == m else TruncatedSeries.zero(t, order))
          + (f2 * p[a] * p[m]).scale(sig[a]) for m in range(n)] for a in range(n)]
    return linear_realization(R, t, order, source="user")


def snyder_phi2(phi1: TruncatedSeries) -> TruncatedSeries:
    """``phi2 = (1 + 2 phi1' phi1) / (phi1 - 2 u phi1')``; one order is lost to the derivative."""
    if phi1.constant_term() != 1:
        raise DomainError("phi1 must satisfy phi1(0) = 1")
    order = phi1.order - 1
    if order < 0:
        raise DomainError("phi1 needs at least one known order")
    f = phi1.truncate(order)
    d = phi1.grading_derivative().with_order(order)
    u = TruncatedSeries.grading_power(f.table, order, 1)
    one = TruncatedSeries.one(f.table, order)
    return (one + (d * f).scale(2)) / (f - (u * d).scale(2))


def snyder_family(phi1: TruncatedSeries, order: int, n: int = 4, signature=None) -> ModelSpec:
    """``xh_mu = x_mu phi1(beta p^2) + beta (x.p) p_mu phi2(beta p^2)``.

    ``phi1`` is a univariate series in ``u`` known to at least ``u^order``.
    """
    if phi1.table.n != 1 or phi1.table.vectors:
        raise StructuralError("phi1 must be a univariate series")
    if order < 1:
        raise StructuralError("Snyder realizations need order >= 1")
    if phi1.order < order:
        raise StructuralError(f"phi1 is known only to u^{phi1.order}")
    phi1 = phi1.truncate(order).regrade("u")
    phi2 = snyder_phi2(phi1)
    R = _snyder_realization(phi1, phi2, n, order, signature)
    return ModelSpec("snyder", n, order, None, R, {"phi1": phi1, "phi2": phi2, "realization": R},
                     tuple(f"x{m}" for m in range(n)))


def snyder_phi1(order: int) -> TruncatedSeries:
    """Order-by-order solution of ``2u phi1' = phi1 - phi1^2 - u``, ``phi1(0) = 1``.

    Comparing ``u^k``: ``(2k + 1) c_k = -sum_{0<i<k} c_i c_{k-i} - [k = 1]``.
    """
    c = [Q(1)]
    for k in range(1, order + 1):
        s = sum((c[i] * c[k - i] for i in range(1, k)), Q(0))
        c.append((-s - (1 if k == 1 else 0)) / (2 * k + 1))
    return univariate(c, "u")


def snyder_symmetric(order: int, n: int = 4, signature=None) -> ModelSpec:
    """Snyder realization for symmetric ordering (``K(k) = k``)."""
    phi1 = snyder_phi1(order + 1)
    phi2 = snyder_phi2(phi1)
    R = _snyder_realization(phi1, phi2, n, order, signature)
    t = R.table
    sig = t.signature
    x = TruncatedSeries.vector(t, order, "x")
    p = TruncatedSeries.vector(t, order, "p")
    b3 = TruncatedSeries.grading_power(t, order, 1, c=Q(1, 3))
    p2 = _dot(p, p, sig, t, order)
    xp = _dot(x, p, sig, t, order)
    first = tuple(PhaseSpaceOperator((x[m] - b3 * x[m] * p2 + b3 * xp * p[m]).truncate(min(order, 1)))
                  for m in range(n))
    return ModelSpec("snyder", n, order, None, R,
                     {"phi1": phi1.truncate(order), "phi2": phi2.truncate(max(order - 1, 0)),
                      "realization": R, "first_order": first},
                     tuple(f"x{m}" for m in range(n)))


def snyder_lorentz(R: Realization, mu: int, nu: int) -> PhaseSpaceOperator:
    """``M_{mu nu} = x_mu p_nu - x_nu p_mu`` in the phase space of ``R``."""
    t, o = R.table, R.order
    X = [PhaseSpaceOperator.coordinate(t, o, i, 0, R.pairs) for i in range(t.n)]
    P = [PhaseSpaceOperator.momentum(t, o, i, 0, R.pairs) for i in range(t.n)]
    return X[mu] * P[nu] - X[nu] * P[mu]


# -- golden comparisons ------------------------------------------------------------

def _diff_report(name, got, want):
    return Report(name, {i: g - w for i, (g, w) in enumerate(zip(got, want))})


def verify_model(spec: ModelSpec, order: int | None = None) -> list[Report]:
    """Run the generic engines on ``spec`` and compare with its closed forms."""
    order = spec.order if order is None else min(order, spec.order)
    out: list[Report] = []
    if spec.structure is not None:
        C = spec.structure
        out.append(Report("jacobi", {v: 1 for v in check_jacobi(C)}))
        W = weyl_realization(C, order)
        exp_R = spec.expectations["realization"]
        out.append(_diff_report("weyl-realization", [op.series for op in W.operators],
                                [op.series.truncate(order) for op in exp_R.operators]))
        out.append(Report("commutators", verify_commutators(W, C)))
        D = d_function_ode(C, order)
        out.append(_diff_report("d-function diffop", D.components, d_function_diffop(W).components))
        delta = coproduct_from_d(D)
        out.append(_diff_report("coproduct", delta.components,
                                [c.truncate(order) for c in spec.expectations["coproduct"].components]))
        out.append(check_associativity(D))
        out.append(check_coassociativity(delta))
        if "momentum_brackets" in spec.expectations:
            t = W.table
            res = {}
            for (mu, nu), want in spec.expectations["momentum_brackets"].items():
                got = PhaseSpaceOperator.momentum(t, order, mu).commutator(W[nu])
                d = got - want.truncate(order)
                if not d.is_zero():
                    res[(mu, nu)] = d
            out.append(Report("momentum-brackets", res))
    elif spec.name == "theta":
        R = spec.realization
        t = R.table
        res = {}
        for (m, v), th in spec.expectations["brackets"].items():
            d = R[m].commutator(R[v]) - PhaseSpaceOperator(TruncatedSeries.grading_power(t, order, 1, c=I * th))
            if not d.is_zero():
                res[(m, v)] = d
        out.append(Report("commutators", res))
        kf = k_function(R, order)
        kt = kf.K[0].table
        out.append(_diff_report("K=k", kf.K, TruncatedSeries.vector(kt, order, "k")))
        out.append(Report("L=0", {0: kf.L if kf.L is not None else TruncatedSeries.zero(kt, order)}))
        ct = R.table.without("p")
        res = {}
        for (m, v), th in spec.expectations["brackets"].items():
            xm, xv = TruncatedSeries.var(ct, order, "x", m), TruncatedSeries.var(ct, order, "x", v)
            T = spec.expectations["twist"]
            comm = twist_apply(T, xm, xv, order) - twist_apply(T, xv, xm, order)
            d = comm - TruncatedSeries.grading_power(comm.table, order, 1, c=I * th)
            if not d.is_zero():
                res[(m, v)] = d
        out.append(Report("twist-commutators", res))
    else:  # Snyder
        R = spec.realization
        t = R.table
        beta = TruncatedSeries.grading_power(t, order, 1, c=I)
        res = {}
        for m in range(R.n):
            for v in range(m + 1, R.n):
                d = R[m].commutator(R[v]).series - beta * snyder_lorentz(R, m, v).series
                d = d.truncate(min(order, 1))
                if not d.is_zero():
                    res[(m, v)] = d
        out.append(Report("snyder-commutators", res))
        one = unit_polynomial(t, R.pairs)
        out.append(Report("M|>1", {(m, v): fock_apply(snyder_lorentz(R, m, v), one)
                                   for m in range(R.n) for v in range(m + 1, R.n)}))
        if "first_order" in spec.expectations:
            out.append(_diff_report("first-order", [op.series.truncate(min(order, 1)) for op in R.operators],
                                    [op.series for op in spec.expectations["first_order"]]))
            kf = k_function(R, order)
            out.append(_diff_report("K=k", kf.K, TruncatedSeries.vector(kf.K[0].table, order, "k")))
    return out


MODEL_NAMES = ("kappa", "tensorial", "theta", "snyder")


def build_model(name: str, order: int, n: int | None = None, a: Sequence | None = None,
                theta: Sequence[Sequence] | None = None) -> ModelSpec:
    if name == "kappa":
        if a is None:
            a = [1] + [0] * ((n or 2) - 1)
        return kappa_minkowski(a, n, order)
    if name == "tensorial":
        return extended_tensorial(n or 2, order)
    if name == "theta":
        if theta is None:
            m = n or 2
            theta = [[0] * m for _ in range(m)]
            theta[0][1], theta[1][0] = 1, -1
        return canonical_theta(theta, order)
    if name == "snyder":
        return snyder_symmetric(order, n or 4)
    raise StructuralError(f"unknown model {name!r}; choose from {', '.join(MODEL_NAMES)}")
