"""Realizations of coordinate algebras inside the Heisenberg algebra.

A realization sends each generator ``xh_mu`` to a normal-ordered operator.
For the linear and affine kinds the operator has the shape
``xh_mu = sum_a x_a R_{a mu}(p) + chi_mu(p)``; ``R`` is stored as the raw
coefficient of ``x_a`` (no metric factor attached).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import permutations
from math import factorial
from typing import Sequence

from .exact import I, Q
from .exceptions import DomainError, StructuralError
from .heisenberg import EXACT, PhaseSpaceOperator, fock_apply, op_exponential_apply, op_multiply
from .lie import StructureConstants, c_matrix, psi_of_matrix
from .series import TruncatedSeries, VariableTable, series_exp

__all__ = [
    "Realization",
    "KFunction",
    "weyl_realization",
    "linear_realization",
    "verify_commutators",
    "k_function",
    "symmetrize",
    "omega",
    "SymmetricBasis",
    "unit_polynomial",
    "weyl_property_residual",
    "exponential_action_residual",
]

KINDS = ("linear-in-x", "affine", "quadratic-in-x")


def unit_polynomial(table: VariableTable, pairs=(("x", "p"),)) -> TruncatedSeries:
    """The polynomial ``1`` over the coordinate and parameter symbols of an operator table."""
    return TruncatedSeries.one(table.without(*(p for _, p in pairs)), EXACT)


@dataclass(frozen=True)
class Realization:
    operators: tuple[PhaseSpaceOperator, ...]
    kind: str = "linear-in-x"
    source: str = "user"

    def __post_init__(self):
        ops = tuple(self.operators)
        object.__setattr__(self, "operators", ops)
        if self.kind not in KINDS:
            raise StructuralError(f"unknown realization kind {self.kind!r}")
        if not ops:
            raise StructuralError("a realization needs at least one generator")
        t0, pr = ops[0].table, ops[0].pairs
        for op in ops:
            if op.table != t0 or op.pairs != pr:
                raise StructuralError("all generators must share one phase space")
        if len(ops) != t0.n:
            raise StructuralError("need one operator per coordinate")
        for mu, op in enumerate(ops):
            lead = op.series.grading_part(0)
            if lead != TruncatedSeries.var(t0, op.order, pr[0][0], mu):
                raise StructuralError(f"generator {mu} does not reduce to x_{mu} at zeroth order")

    @property
    def n(self) -> int:
        return self.table.n

    @property
    def table(self) -> VariableTable:
        return self.operators[0].table

    @property
    def order(self) -> int:
        return min(op.order for op in self.operators)

    @property
    def pairs(self):
        return self.operators[0].pairs

    def __getitem__(self, mu: int) -> PhaseSpaceOperator:
        return self.operators[mu]

    def linear_data(self):
        """``(R, chi)`` with ``R[a][mu]`` the coefficient of ``x_a`` in ``xh_mu``."""
        if self.kind == "quadratic-in-x":
            raise DomainError("quadratic-in-x realizations have no linear coefficient matrix")
        n, t = self.n, self.table
        R = [[TruncatedSeries.zero(t, self.order) for _ in range(n)] for _ in range(n)]
        chi = []
        for mu, op in enumerate(self.operators):
            c = TruncatedSeries.zero(t, self.order)
            for xe, s in op.x_terms().items():
                deg = sum(xe)
                if deg == 0:
                    c = s
                elif deg == 1 and len(xe) == n:
                    R[xe.index(1)][mu] = s
                else:
                    raise DomainError("realization is not linear in the coordinates")
            chi.append(c)
        return R, chi

    def embed(self, table: VariableTable) -> "Realization":
        return Realization(tuple(op.embed(table) for op in self.operators), self.kind, self.source)

    def to_json_dict(self) -> dict:
        return {"n": self.n, "kind": self.kind, "source": self.source, "order": self.order,
                "operators": [op.render() for op in self.operators]}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


@dataclass(frozen=True)
class KFunction:
    K: tuple[TruncatedSeries, ...]
    L: TruncatedSeries | None = None


def _params_of(C: StructureConstants) -> tuple[str, ...]:
    for v in C.entries.values():
        if isinstance(v, TruncatedSeries):
            return v.table.vectors
    return ()


def weyl_realization(C: StructureConstants, order: int, params: Sequence[str] = ()) -> Realization:
    """``xh_mu = x_a psi(l C(p))_{mu a}`` (contracted over ``a``)."""
    params = tuple(params) or _params_of(C)
    table = PhaseSpaceOperator.operator_table(C.n, params, signature=C.signature)
    psi = psi_of_matrix(c_matrix(C, table, order, "p", graded=True), order)
    sig = table.signature
    ops = []
    for mu in range(C.n):
        acc = TruncatedSeries.zero(table, order)
        for a in range(C.n):
            if psi[mu][a].terms:
                term = TruncatedSeries.var(table, order, "x", a) * psi[mu][a]
                acc = acc - term if sig[a] < 0 else acc + term
        ops.append(PhaseSpaceOperator(acc))
    return Realization(tuple(ops), "linear-in-x", "weyl")


def linear_realization(R, table: VariableTable, order: int, chi=None, source: str = "user") -> Realization:
    """Assemble ``xh_mu = sum_a x_a R[a][mu] + chi[mu]`` from momentum series over ``table``."""
    n = table.n
    ops = []
    for mu in range(n):
        acc = TruncatedSeries.zero(table, order)
        for a in range(n):
            if R[a][mu].terms:
                acc = acc + TruncatedSeries.var(table, order, "x", a) * R[a][mu]
        if chi is not None:
            acc = acc + chi[mu]
        ops.append(PhaseSpaceOperator(acc))
    kind = "affine" if chi is not None and any(c.terms for c in chi) else "linear-in-x"
    return Realization(tuple(ops), kind, source)


def verify_commutators(R: Realization, C: StructureConstants, order: int | None = None):
    """Residuals ``[xh_mu, xh_nu] - i l C_{mu nu a} eta_a xh_a`` for ``mu < nu`` (nonzero only)."""
    order = R.order if order is None else min(order, R.order)
    ops = [op.truncate(order) for op in R.operators]
    t = R.table
    il = TruncatedSeries.grading_power(t, order, 1, c=I)
    out = {}
    for mu in range(R.n):
        for nu in range(mu + 1, R.n):
            lhs = ops[mu].commutator(ops[nu])
            rhs = PhaseSpaceOperator.scalar(t, order, 0, R.pairs)
            for a in range(R.n):
                c = C[mu, nu, a]
                if isinstance(c, TruncatedSeries):
                    c = c.embed(t)
                    if not c.terms:
                        continue
                elif not c:
                    continue
                coef = il * c if isinstance(c, TruncatedSeries) else il.scale(c)
                if t.signature[a] < 0:
                    coef = -coef
                rhs = rhs + PhaseSpaceOperator(coef * ops[a].series, R.pairs)
            res = lhs - rhs
            if not res.is_zero():
                out[(mu, nu)] = res
    return out


def k_function(R: Realization, order: int | None = None) -> KFunction:
    """Solve ``E_k K_a = eta_a sum_mu eta_mu k_mu R_{a mu}(K)`` with ``K = k + O(l)``.

    ``E_k`` is the Euler operator in ``k``: the flow parameter of the exponential
    map has been absorbed into the degree in ``k``.  The affine part integrates
    to the scalar phase ``L`` with ``E_k L = sum_mu eta_mu k_mu chi_mu(K)``.
    """
    if R.kind == "quadratic-in-x":
        raise DomainError("the K-function needs a realization linear in the coordinates")
    order = R.order if order is None else min(order, R.order)
    Rm, chi = R.linear_data()
    n, sig = R.n, R.table.signature
    params = tuple(v for v in R.table.vectors if v not in {x for pr in R.pairs for x in pr})
    kt = VariableTable(n, ("k",) + params, R.table.grading, sig)
    kvec = TruncatedSeries.vector(kt, order, "k")

    def rhs(K, mats):
        out = []
        for a in range(n):
            acc = TruncatedSeries.zero(kt, order)
            for mu in range(n):
                s = mats[a][mu]
                if s.terms:
                    t = kvec[mu] * s.compose({"p": K}, kt)
                    acc = acc - t if sig[mu] < 0 else acc + t
            out.append(acc if sig[a] > 0 else -acc)
        return out

    Rt = [[s.with_order(order) for s in row] for row in Rm]
    K = list(kvec)
    for _ in range(order + 1):
        new = rhs(K, Rt)
        K = [kvec[a] + (new[a] - kvec[a]).euler_integrate("k") for a in range(n)]
    L = None
    if any(c.terms for c in chi):
        acc = TruncatedSeries.zero(kt, order)
        for mu in range(n):
            if chi[mu].terms:
                t = kvec[mu] * chi[mu].with_order(order).compose({"p": K}, kt)
                acc = acc - t if sig[mu] < 0 else acc + t
        L = acc.euler_integrate("k")
    return KFunction(tuple(K), L)


def symmetrize(word: Sequence[int]) -> list[tuple[object, tuple[int, ...]]]:
    """Distinct orderings of ``word`` with weight ``(multiplicities)! / N!``."""
    word = tuple(word)
    if not word:
        raise StructuralError("symmetrize needs a nonempty word")
    N = len(word)
    distinct = sorted(set(permutations(word)))
    w = Q(factorial(N) // len(distinct), factorial(N))
    return [(w, d) for d in distinct]


def _product(R: Realization, word: Sequence[int]) -> PhaseSpaceOperator:
    out = PhaseSpaceOperator.scalar(R.table, R.order, 1, R.pairs)
    for mu in word:
        out = op_multiply(out, R.operators[mu])
    return out


def omega(R: Realization, word) -> TruncatedSeries:
    """``Omega(word) = (xh_w1 ... xh_wN) |> 1``; accepts a word or a weighted word list."""
    one = unit_polynomial(R.table, R.pairs)
    if word and isinstance(word[0], tuple):
        total = None
        for w, wd in word:
            part = fock_apply(_product(R, wd), one).scale(w)
            total = part if total is None else total + part
        return total
    return fock_apply(_product(R, word), one)


class SymmetricBasis:
    """Memoized symmetrized monomials ``Sym(xh^m)`` as operators.

    Uses ``Sym(m) = sum_a (m_a / N) xh_a Sym(m - e_a)``: grouping the orderings
    by their first letter.
    """

    def __init__(self, R: Realization):
        self.R = R
        self._cache = {(0,) * R.n: PhaseSpaceOperator.scalar(R.table, R.order, 1, R.pairs)}

    def __call__(self, m: Sequence[int]) -> PhaseSpaceOperator:
        m = tuple(m)
        hit = self._cache.get(m)
        if hit is not None:
            return hit
        N = sum(m)
        total = None
        for a, e in enumerate(m):
            if e:
                rest = list(m)
                rest[a] -= 1
                part = op_multiply(self.R.operators[a], self(tuple(rest))).series.scale(Q(e, N))
                total = part if total is None else total + part
        op = PhaseSpaceOperator(total, self.R.pairs)
        self._cache[m] = op
        return op


def weyl_property_residual(R: Realization, N: int) -> TruncatedSeries:
    """``(k.xh)^N |> 1 - (k.x)^N`` with a symbolic vector ``k``."""
    t = R.table.extended("k")
    Re = R.embed(t)
    sig = t.signature
    kx_hat = PhaseSpaceOperator.scalar(t, R.order, 0, R.pairs)
    for mu in range(R.n):
        term = PhaseSpaceOperator(TruncatedSeries.var(t, R.order, "k", mu) * Re.operators[mu].series, R.pairs)
        kx_hat = kx_hat - term if sig[mu] < 0 else kx_hat + term
    f = unit_polynomial(t, R.pairs)
    for _ in range(N):
        f = fock_apply(kx_hat, f)
    ct = f.table
    kx = TruncatedSeries.zero(ct, EXACT)
    for mu in range(R.n):
        term = TruncatedSeries.var(ct, EXACT, "k", mu) * TruncatedSeries.var(ct, EXACT, "x", mu)
        kx = kx - term if sig[mu] < 0 else kx + term
    return f - kx ** N


def exponential_action_residual(R: Realization, cap: int, kf: KFunction | None = None) -> TruncatedSeries:
    """``exp(i k.xh) |> 1 - exp(i K(k).x + i L(k))`` through coordinate degree ``cap``."""
    kf = kf or k_function(R)
    t = R.table.extended("k")
    Re = R.embed(t)
    sig = t.signature
    A = PhaseSpaceOperator.scalar(t, R.order, 0, R.pairs)
    for mu in range(R.n):
        term = PhaseSpaceOperator(TruncatedSeries.var(t, R.order, "k", mu, c=I) * Re.operators[mu].series, R.pairs)
        A = A - term if sig[mu] < 0 else A + term
    lhs = op_exponential_apply(A, unit_polynomial(t, R.pairs), cap=cap)
    ct = lhs.table
    phase = TruncatedSeries.zero(ct, R.order)
    for mu in range(R.n):
        term = TruncatedSeries.var(ct, R.order, "x", mu, c=I) * kf.K[mu].embed(ct)
        phase = phase - term if sig[mu] < 0 else phase + term
    if kf.L is not None:
        phase = phase + kf.L.embed(ct).scale(I)
    rhs = series_exp(phase, cap=cap, cap_vectors=("x",))
    return lhs - rhs
