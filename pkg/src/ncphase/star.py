"""Star products and the deformed momentum addition ``D(k, q)``.

``D`` is defined by ``e^{ikx} * e^{iqx} = e^{iD(k,q)x}``.  Three independent
routes are provided: the flow equation in ``k``, the exponentiated vector
field acting on ``q``, and the logarithm of ``e^{ik.xh} e^{iq.xh}`` in the
PBW-normalized enveloping algebra.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .exact import I
from .exceptions import DomainError, StructuralError
from .heisenberg import PhaseSpaceOperator, fock_apply
from .lie import StructureConstants, bernoulli_psi_coefficients, c_matrix
from .pbw import PBWAlgebra
from .realization import Realization, SymmetricBasis, k_function, unit_polynomial
from .report import Report
from .series import TruncatedSeries, VariableTable, apply_diff_operator, invert_vector_series

__all__ = [
    "DFunction",
    "d_table",
    "d_function_ode",
    "d_function_diffop",
    "d_function_oracle",
    "check_associativity",
    "compose_d",
    "StarProduct",
    "star_product",
]

SOURCES = ("ode-solver", "diff-operator", "free-algebra-oracle", "user")


@dataclass(frozen=True)
class DFunction:
    components: tuple[TruncatedSeries, ...]
    source: str = "user"

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if self.source not in SOURCES:
            raise StructuralError(f"unknown D-function source {self.source!r}")
        t = self.table
        for c in self.components:
            if c.table != t:
                raise StructuralError("D components must share a table")
        for v in ("k", "q"):
            if v not in t.vectors:
                raise StructuralError(f"D-function table lacks the momentum vector {v!r}")

    @property
    def table(self) -> VariableTable:
        return self.components[0].table

    @property
    def n(self) -> int:
        return self.table.n

    @property
    def order(self) -> int:
        return min(c.order for c in self.components)

    def __getitem__(self, mu):
        return self.components[mu]

    def __eq__(self, other):
        if not isinstance(other, DFunction):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def render(self) -> str:
        return "\n".join(f"D{m}: {c.render()}" for m, c in enumerate(self.components))


def d_table(n: int, params: Sequence[str] = (), grading: str = "l", signature=None) -> VariableTable:
    return VariableTable(n, ("k", "q") + tuple(params), grading, signature)


def _params(C: StructureConstants):
    for v in C.entries.values():
        if isinstance(v, TruncatedSeries):
            return v.table.vectors
    return ()


def d_function_ode(C: StructureConstants, order: int) -> DFunction:
    """Solve ``E_k D_mu = (k o psi(l C(D)))_mu`` with ``D(0, q) = q``.

    ``E_k`` is the Euler operator in ``k``; the flow parameter of the
    differential equation in ``t`` is absorbed into the ``k``-degree.
    """
    t = d_table(C.n, _params(C), signature=C.signature)
    sig = t.signature
    n = C.n
    k = TruncatedSeries.vector(t, order, "k")
    q = TruncatedSeries.vector(t, order, "q")
    b = bernoulli_psi_coefficients(order)
    D = [k[m] + q[m] for m in range(n)]
    for _ in range(order + 1):
        M = c_matrix(C, t, order, graded=True, momenta=D)
        v = list(k)
        acc = list(k)
        for m in range(1, order + 1):
            nv = []
            for nu in range(n):
                s = TruncatedSeries.zero(t, order)
                for a in range(n):
                    if v[a].terms and M[a][nu].terms:
                        term = v[a] * M[a][nu]
                        s = s - term if sig[a] < 0 else s + term
                nv.append(s)
            v = nv
            if all(not x.terms for x in v):
                break
            if b[m]:
                acc = [acc[nu] + v[nu].scale(b[m]) for nu in range(n)]
        D = [q[m] + acc[m].euler_integrate("k") for m in range(n)]
    return DFunction(tuple(D), "ode-solver")


def d_function_diffop(R: Realization, order: int | None = None) -> DFunction:
    """``D_mu(k, q) = exp(w_a(k, q) d/dq_a) q_mu`` for a linear realization.

    ``w_a = eta_a sum_mu eta_mu Kinv_mu(k) R_{a mu}(q)`` where ``R_{a mu}`` is
    the coefficient of ``x_a`` in ``xh_mu``.  For the Weyl realization ``Kinv``
    is the identity.
    """
    if R.kind != "linear-in-x":
        raise DomainError(f"the vector-field formula needs a linear realization, not {R.kind}")
    order = R.order if order is None else min(order, R.order)
    n, sig = R.n, R.table.signature
    params = tuple(v for v in R.table.vectors if v not in {s for pr in R.pairs for s in pr})
    t = d_table(n, params, R.table.grading, sig)
    Rm, _ = R.linear_data()
    q = TruncatedSeries.vector(t, order, "q")
    if R.source == "weyl":
        kinv = TruncatedSeries.vector(t, order, "k")
    else:
        K = k_function(R, order).K
        kinv = [c.embed(t) for c in invert_vector_series(K, "k")]
    Rq = [[s.with_order(order).compose({"p": q}, t) if s.terms else TruncatedSeries.zero(t, order)
           for s in row] for row in Rm]
    w = []
    for a in range(n):
        acc = TruncatedSeries.zero(t, order)
        for mu in range(n):
            if Rq[a][mu].terms:
                term = kinv[mu] * Rq[a][mu]
                acc = acc - term if sig[mu] < 0 else acc + term
        w.append(acc if sig[a] > 0 else -acc)
    D = [apply_diff_operator(w, "q", q[m], "exp") for m in range(n)]
    return DFunction(tuple(D), "diff-operator")


def d_function_oracle(C: StructureConstants, order: int) -> DFunction:
    """Read ``D`` off ``log(e^{ik.xh} e^{iq.xh})`` computed in the PBW basis."""
    t = d_table(C.n, signature=C.signature)
    alg = PBWAlgebra(C, t, order)
    k = [c.scale(I) for c in TruncatedSeries.vector(t, order, "k")]
    q = [c.scale(I) for c in TruncatedSeries.vector(t, order, "q")]
    Z = alg.log(alg.mul(alg.exp(alg.generator_combination(k)), alg.exp(alg.generator_combination(q))))
    stray = [w for w in Z if len(w) != 1]
    if stray:
        raise DomainError(f"BCH logarithm did not reduce to generators: {stray[:3]}")
    sig = t.signature
    D = []
    for a in range(C.n):
        z = Z.get((a,), TruncatedSeries.zero(t, order))
        D.append(z.scale(-I) if sig[a] > 0 else z.scale(I))
    return DFunction(tuple(D), "free-algebra-oracle")


def compose_d(D: DFunction, first: Sequence[TruncatedSeries], second: Sequence[TruncatedSeries],
              table: VariableTable) -> list[TruncatedSeries]:
    return [c.compose({"k": list(first), "q": list(second)}, table) for c in D.components]


def check_associativity(D: DFunction, order: int | None = None) -> Report:
    """Residual of ``D(D(k1, k2), k3) - D(k1, D(k2, k3))`` per component."""
    order = D.order if order is None else min(order, D.order)
    comps = [c.with_order(order) for c in D.components]
    D = DFunction(tuple(comps), D.source)
    params = tuple(v for v in D.table.vectors if v not in ("k", "q"))
    t3 = VariableTable(D.n, ("k1", "k2", "k3") + params, D.table.grading, D.table.signature)
    k1, k2, k3 = (TruncatedSeries.vector(t3, order, v) for v in ("k1", "k2", "k3"))
    d12 = compose_d(D, k1, k2, t3)
    d23 = compose_d(D, k2, k3, t3)
    lhs = compose_d(D, d12, k3, t3)
    rhs = compose_d(D, k1, d23, t3)
    return Report("associativity", {m: lhs[m] - rhs[m] for m in range(D.n)})


class StarProduct:
    """``f * g = Omega^{-1}(f) |> g`` for a given realization.

    ``Omega^{-1}`` is built as ``S (1 + Rem)^{-1}`` where ``S`` is symmetric
    ordering and ``Omega S = 1 + Rem`` with ``Rem`` raising the grading degree;
    for the Weyl realization ``Rem`` vanishes.
    """

    def __init__(self, R: Realization):
        self.R = R
        self.basis = SymmetricBasis(R)
        self.coord_table = R.table.without(*(p for _, p in R.pairs))
        self._one = unit_polynomial(R.table, R.pairs)

    def _coerce(self, f: TruncatedSeries) -> TruncatedSeries:
        if f.table != self.coord_table:
            try:
                f = f.embed(self.coord_table)
            except StructuralError as exc:
                raise StructuralError(f"polynomial does not fit the realization: {exc}") from exc
        return f

    def symmetric_operator(self, f: TruncatedSeries) -> PhaseSpaceOperator:
        f = self._coerce(f)
        t = self.R.table
        xs = self.R.pairs[0][0]
        total = PhaseSpaceOperator.scalar(t, self.R.order, 0, self.R.pairs)
        for m, c in sorted(f.split_by(xs).items()):
            total = total + PhaseSpaceOperator(c.embed(t).with_order(min(c.order, self.R.order))
                                               * self.basis(m).series, self.R.pairs)
        return total

    def omega_inverse(self, f: TruncatedSeries) -> PhaseSpaceOperator:
        # h_{j+1} = h_j - Omega(S h_j) telescopes to Omega(sum_j S h_j) = f
        h = self._coerce(f)
        total = None
        for _ in range(self.R.order + 2):
            op = self.symmetric_operator(h)
            total = op if total is None else total + op
            h = h.with_order(min(h.order, op.order)) - fock_apply(op, self._one)
            if h.is_zero():
                return total
        raise DomainError("Omega is not invertible at the required order")

    def __call__(self, f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
        return fock_apply(self.omega_inverse(f), self._coerce(g))


def star_product(R: Realization, f: TruncatedSeries, g: TruncatedSeries, order: int | None = None) -> TruncatedSeries:
    out = StarProduct(R)(f, g)
    return out if order is None else out.truncate(order)
