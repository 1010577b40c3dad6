"""Coproducts of momenta, the Leibniz rule, and twists acting on function pairs.

Tensor legs are modelled by doubling the phase space: the left leg uses the
pair ``(xL, pL)`` and the right leg ``(xR, pR)``.  Operators on different legs
commute, so a product of exponentials of leg-sums is an ordinary operator in
the doubled Heisenberg algebra; its action on ``f(xL) g(xR)`` followed by the
merge ``xL, xR -> x`` is the multiplication ``m``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .exact import I, Q
from .exceptions import DomainError, StructuralError
from .heisenberg import PhaseSpaceOperator, fock_apply, op_exponential_apply, op_multiply
from .lie import StructureConstants, c_matrix, matmul
from .realization import Realization, weyl_realization
from .report import Report
from .series import TruncatedSeries, VariableTable
from .star import DFunction, StarProduct

__all__ = [
    "Coproduct",
    "coproduct_from_d",
    "check_coassociativity",
    "check_leibniz",
    "TwistOperator",
    "DOUBLE_PAIRS",
    "doubled_table",
    "weyl_twist_inverse",
    "opposite_twist_inverse",
    "twist_apply",
    "realization_from_twist",
    "ln_twist",
    "ln_twist_expected",
    "ln_twist_check",
    "ln_twist_expanded",
]

DOUBLE_PAIRS = (("xL", "pL"), ("xR", "pR"))


@dataclass(frozen=True)
class Coproduct:
    """``Delta(p_mu)`` as series in ``pL`` (``p (x) 1``) and ``pR`` (``1 (x) p``)."""

    components: tuple[TruncatedSeries, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        t = self.table
        for v in ("pL", "pR"):
            if v not in t.vectors:
                raise StructuralError(f"coproduct table lacks {v!r}")

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
        return isinstance(other, Coproduct) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def primitive_part(self) -> tuple[TruncatedSeries, ...]:
        return tuple(c.grading_part(0) for c in self.components)

    def render(self) -> str:
        return "\n".join(f"Delta(p{m}): {c.render()}" for m, c in enumerate(self.components))


def coproduct_from_d(D: DFunction) -> Coproduct:
    """``Delta p_mu = D_mu(p (x) 1, 1 (x) p)``."""
    mapping = {"k": "pL", "q": "pR"}
    return Coproduct(tuple(c.rename(mapping) for c in D.components))


def check_coassociativity(delta: Coproduct, order: int | None = None) -> Report:
    """``(Delta (x) id) Delta - (id (x) Delta) Delta`` through substitution."""
    order = delta.order if order is None else min(order, delta.order)
    params = tuple(v for v in delta.table.vectors if v not in ("pL", "pR"))
    t3 = VariableTable(delta.n, ("p1", "p2", "p3") + params, delta.table.grading, delta.table.signature)
    p1, p2, p3 = (TruncatedSeries.vector(t3, order, v) for v in ("p1", "p2", "p3"))
    comps = [c.with_order(order) for c in delta.components]
    d12 = [c.compose({"pL": p1, "pR": p2}, t3) for c in comps]
    d23 = [c.compose({"pL": p2, "pR": p3}, t3) for c in comps]
    left = [c.compose({"pL": d12, "pR": p3}, t3) for c in comps]
    right = [c.compose({"pL": p1, "pR": d23}, t3) for c in comps]
    return Report("coassociativity", {m: left[m] - right[m] for m in range(delta.n)})


def _momentum_monomial(table: VariableTable, order: int, exps, pairs) -> PhaseSpaceOperator:
    return PhaseSpaceOperator(TruncatedSeries.monomial(table, order, {pairs[0][1]: exps}), pairs)


def check_leibniz(R: Realization, delta: Coproduct, f: TruncatedSeries, g: TruncatedSeries, mu: int,
                  order: int | None = None, star: StarProduct | None = None) -> Report:
    """``m_*(Delta(p_mu) (|> (x) |>)(f (x) g)) - p_mu |> (f * g)``."""
    order = min(R.order, delta.order) if order is None else min(order, R.order, delta.order)
    star = star or StarProduct(R)
    t = R.table
    ct = star.coord_table
    lhs = TruncatedSeries.zero(ct, order)
    for a, part in delta.components[mu].with_order(order).split_by("pL").items():
        fa = fock_apply(_momentum_monomial(t, order, a, R.pairs), f)
        if fa.is_zero():
            continue
        for b, coeff in part.split_by("pR").items():
            gb = fock_apply(_momentum_monomial(t, order, b, R.pairs), g)
            if gb.is_zero():
                continue
            lhs = lhs + coeff.embed(ct) * star(fa, gb).with_order(order)
    rhs = fock_apply(PhaseSpaceOperator.momentum(t, order, mu, 0, R.pairs), star(f, g)).with_order(order)
    return Report(f"leibniz[{mu}]", {mu: lhs - rhs})


# -- twists -----------------------------------------------------------------

def doubled_table(n: int, params: Sequence[str] = (), grading: str = "l", signature=None) -> VariableTable:
    return VariableTable(n, ("xL", "pL", "xR", "pR") + tuple(params), grading, signature)


@dataclass(frozen=True)
class TwistOperator:
    """Product of exponentials ``exp(A_1) exp(A_2) ...`` over the doubled phase space.

    Each exponent is a :class:`PhaseSpaceOperator` with pairs ``DOUBLE_PAIRS``;
    the rightmost factor acts first.
    """

    exponents: tuple[PhaseSpaceOperator, ...]
    source: str = "user"

    def __post_init__(self):
        exps = tuple(self.exponents)
        object.__setattr__(self, "exponents", exps)
        for e in exps:
            if e.pairs != DOUBLE_PAIRS:
                raise StructuralError("twist exponents must live in the doubled phase space")
            if e.table != exps[0].table:
                raise StructuralError("twist exponents must share a table")

    @property
    def table(self) -> VariableTable:
        return self.exponents[0].table

    @property
    def order(self) -> int:
        return min(e.order for e in self.exponents)

    @classmethod
    def identity(cls, n: int, order: int, signature=None) -> "TwistOperator":
        t = doubled_table(n, signature=signature)
        return cls((PhaseSpaceOperator.scalar(t, order, 0, DOUBLE_PAIRS),), "identity")


def _leg(R: Realization, table: VariableTable, side: str) -> list[TruncatedSeries]:
    """Realization operators re-expressed on one leg of the doubled space."""
    mapping = {"x": "x" + side, "p": "p" + side}
    return [op.series.rename(mapping, table) for op in R.operators]


def _contract_leg(table, order, coeffs, ops):
    sig = table.signature
    acc = TruncatedSeries.zero(table, order)
    for a in range(table.n):
        term = coeffs[a] * ops[a]
        acc = acc - term if sig[a] < 0 else acc + term
    return acc


def weyl_twist_inverse(R: Realization) -> TwistOperator:
    """``F^{-1} = exp(-i p_a (x) x_a) exp(i p_b (x) xh_b)`` for the realization ``R``."""
    params = tuple(v for v in R.table.vectors if v not in ("x", "p"))
    t = doubled_table(R.n, params, R.table.grading, R.table.signature)
    order = R.order
    pL = [c.scale(I) for c in TruncatedSeries.vector(t, order, "pL")]
    xR = TruncatedSeries.vector(t, order, "xR")
    first = _contract_leg(t, order, pL, xR).scale(-1)
    second = _contract_leg(t, order, pL, _leg(R, t, "R"))
    return TwistOperator((PhaseSpaceOperator(first, DOUBLE_PAIRS), PhaseSpaceOperator(second, DOUBLE_PAIRS)),
                         "weyl")


def opposite_twist_inverse(R: Realization) -> TwistOperator:
    """``exp(-i x_a (x) p_a) exp(i yh_b (x) p_b)`` with ``yh`` given by ``R`` on the left leg.

    With ``R`` the Weyl realization of ``C`` this is the inverse of the
    opposite twist and produces the right-handed generators; with ``R`` the
    Weyl realization of ``-C`` it reproduces the Weyl realization of ``C``.
    """
    params = tuple(v for v in R.table.vectors if v not in ("x", "p"))
    t = doubled_table(R.n, params, R.table.grading, R.table.signature)
    order = R.order
    pR = [c.scale(I) for c in TruncatedSeries.vector(t, order, "pR")]
    xL = TruncatedSeries.vector(t, order, "xL")
    first = _contract_leg(t, order, pR, xL).scale(-1)
    second = _contract_leg(t, order, pR, _leg(R, t, "L"))
    return TwistOperator((PhaseSpaceOperator(first, DOUBLE_PAIRS), PhaseSpaceOperator(second, DOUBLE_PAIRS)),
                         "opposite")


_WEIGHT_CHOICES = ({"xL": 1, "xR": 1}, {"xL": 2, "xR": 1}, {"xL": 1, "xR": 2})


def _lowering_weights(A: PhaseSpaceOperator) -> Mapping[str, int]:
    t = A.table
    n = t.n
    spans = [(t.offset(x), t.offset(p), x) for x, p in A.pairs]
    ungraded = [k for k in A.series.terms if k[0] == 0]
    if not ungraded:
        return _WEIGHT_CHOICES[0]
    for w in _WEIGHT_CHOICES:
        nets = [sum(w[x] * (sum(k[xo:xo + n]) - sum(k[po:po + n])) for xo, po, x in spans) for k in ungraded]
        if all(v < 0 for v in nets):
            return w
    raise DomainError("twist exponent has an ungraded part that does not terminate on polynomials")


def _merge(series: TruncatedSeries, target: VariableTable, order: int) -> TruncatedSeries:
    mapping = {}
    for side in ("L", "R"):
        for base in ("x", "p"):
            v = base + side
            if v in series.table.vectors:
                mapping[v] = TruncatedSeries.vector(target, order, base)
    return series.compose(mapping, target)


def twist_apply(T: TwistOperator, f: TruncatedSeries, g: TruncatedSeries, order: int | None = None) -> TruncatedSeries:
    """``m(T |> (f (x) g))`` with ``f`` on the left leg and ``g`` on the right."""
    order = T.order if order is None else min(order, T.order)
    t = T.table
    params = tuple(v for v in t.vectors if v not in ("xL", "pL", "xR", "pR"))
    coords = VariableTable(t.n, ("xL", "xR") + params, t.grading, t.signature)
    h = f.rename({"x": "xL"}, coords) * g.rename({"x": "xR"}, coords)
    h = h.with_order(min(h.order, order))
    for A in reversed(T.exponents):
        A = A.truncate(order)
        if A.is_zero():
            continue
        h = op_exponential_apply(A, h, weights=_lowering_weights(A))
    out_t = VariableTable(t.n, ("x",) + params, t.grading, t.signature)
    return _merge(h, out_t, order)


def _drop_left_momenta(op: PhaseSpaceOperator) -> PhaseSpaceOperator:
    a, b = op.table.offset("pL"), op.table.offset("pL") + op.table.n
    return PhaseSpaceOperator(TruncatedSeries._raw(
        op.table, op.order, {k: c for k, c in op.series.terms.items() if not any(k[a:b])}), op.pairs)


def realization_from_twist(T: TwistOperator, mu: int, order: int | None = None,
                           right_momentum_cap: int | None = None) -> PhaseSpaceOperator:
    """``m(T (|> (x) id)(x_mu (x) 1))``: left legs act on ``x_mu``, right legs stay operators.

    ``right_momentum_cap`` drops right-leg momentum degrees above the cap; it is
    exact when no exponent carries right-leg coordinates (right momenta then
    only accumulate), as for the opposite twist.
    """
    order = T.order if order is None else min(order, T.order)
    t = T.table
    state = PhaseSpaceOperator(TruncatedSeries.var(t, order, "xL", mu), DOUBLE_PAIRS)
    pr = (t.offset("pR"), t.offset("pR") + t.n)

    def prune(op):
        if right_momentum_cap is None:
            return op
        return PhaseSpaceOperator(TruncatedSeries._raw(
            op.table, op.order,
            {k: c for k, c in op.series.terms.items() if sum(k[pr[0]:pr[1]]) <= right_momentum_cap}), op.pairs)

    for A in reversed(T.exponents):
        A = A.truncate(order)
        if A.is_zero():
            continue
        total, term = state, state
        limit = 4 * (order + 2) + 2 * (right_momentum_cap or 0) + 8
        for j in range(1, limit + 1):
            term = prune(_drop_left_momenta(op_multiply(A, term))).series.scale(Q(1, j))
            term = PhaseSpaceOperator(term, DOUBLE_PAIRS)
            if term.is_zero():
                break
            total = total + term
        else:
            raise DomainError("twist exponential did not terminate; pass right_momentum_cap")
        state = total
    params = tuple(v for v in t.vectors if v not in ("xL", "pL", "xR", "pR"))
    out_t = VariableTable(t.n, ("x", "p") + params, t.grading, t.signature)
    return PhaseSpaceOperator(_merge(state.series, out_t, order))


# -- logarithm of the Weyl twist ---------------------------------------------

def _capped_exp(A: PhaseSpaceOperator, vector: str, cap: int) -> PhaseSpaceOperator:
    one = PhaseSpaceOperator.scalar(A.table, A.order, 1, A.pairs)
    total, term = one, one
    for j in range(1, cap + 1):
        term = PhaseSpaceOperator(op_multiply(term, A).series.truncate_degree([vector], cap).scale(Q(1, j)), A.pairs)
        if term.is_zero():
            break
        total = total + term
    return total


def _capped_log(Z: PhaseSpaceOperator, vector: str, cap: int) -> PhaseSpaceOperator:
    W = Z - 1
    total = PhaseSpaceOperator.scalar(Z.table, Z.order, 0, Z.pairs)
    power = W
    for j in range(1, cap + 1):
        total = total + PhaseSpaceOperator(power.series.scale(Q((-1) ** (j + 1), j)), Z.pairs)
        power = PhaseSpaceOperator(op_multiply(power, W).series.truncate_degree([vector], cap), Z.pairs)
        if power.is_zero():
            break
    return total


def ln_twist(C: StructureConstants, order: int = 2) -> PhaseSpaceOperator:
    """``ln F`` for ``F = exp(-i p_b (x) xh_b) exp(i p_a (x) x_a)`` and the Weyl ``xh``.

    The left leg only carries momenta, which commute with everything on the
    right leg; they are kept as the commuting parameter vector ``pL``.  Every
    term of the exponents has positive ``pL``-degree and the degree adds under
    products, so truncating at ``pL``-degree ``order + 1`` is exact for the
    retained grading orders.
    """
    R = weyl_realization(C, order)
    t = PhaseSpaceOperator.operator_table(C.n, ("pL",), signature=C.signature)
    xh = [op.series.embed(t) for op in R.operators]
    x = TruncatedSeries.vector(t, order, "x")
    pL = [c.scale(I) for c in TruncatedSeries.vector(t, order, "pL")]
    X = PhaseSpaceOperator(_contract_leg(t, order, pL, xh).scale(-1))
    Y = PhaseSpaceOperator(_contract_leg(t, order, pL, x))
    cap = order + 1
    log = _capped_log(op_multiply(_capped_exp(X, "pL", cap), _capped_exp(Y, "pL", cap)), "pL", cap)
    return PhaseSpaceOperator(log.series.truncate_degree(["pL"], order))


def ln_twist_expected(C: StructureConstants, order: int = 2) -> PhaseSpaceOperator:
    """The closed second-order form with left-leg momenta written as ``pL``.

    ``(il/2) C(pL)_{gb} L_{bg} + (il^2/12) C(pL)_{gd} L_{bg} C(p)_{bd}
    - (il^2/24) (C(pL)^2)_{lg} L_{gl}`` with ``L_{bg} = x_b p_g``.
    """
    t = PhaseSpaceOperator.operator_table(C.n, ("pL",), signature=C.signature)
    sig = t.signature
    n = C.n
    CL = c_matrix(C, t, order, "pL")
    CR = c_matrix(C, t, order, "p")
    CL2 = matmul(CL, CL, sig)
    x = TruncatedSeries.vector(t, order, "x")
    p = TruncatedSeries.vector(t, order, "p")
    l1 = TruncatedSeries.grading_power(t, order, 1, c=I * Q(1, 2))
    l2a = TruncatedSeries.grading_power(t, order, 2, c=I * Q(1, 12))
    l2b = TruncatedSeries.grading_power(t, order, 2, c=I * Q(-1, 24))
    total = TruncatedSeries.zero(t, order)
    for g in range(n):
        for b in range(n):
            s = sig[g] * sig[b]
            L = x[b] * p[g]
            total = total + (l1 * CL[g][b] * L).scale(s)
            total = total + (l2b * CL2[b][g] * x[g] * p[b]).scale(s)
            for d in range(n):
                if CL[g][d].terms and CR[b][d].terms:
                    total = total + (l2a * CL[g][d] * L * CR[b][d]).scale(s * sig[d])
    return PhaseSpaceOperator(total)


def ln_twist_expanded(C: StructureConstants, order: int = 2) -> PhaseSpaceOperator:
    """Unsimplified second-order form of ``ln F``.

    ``-i p_a (x) (1/2 x_b lC(p)_{ab} + 1/12 x_b (lC(p))^2_{ab})
    + (l^2/2) p_a p_b (x) (i/12) x_g C(p)_{bd} C_{d a g}``.
    """
    t = PhaseSpaceOperator.operator_table(C.n, ("pL",), signature=C.signature)
    sig = t.signature
    n = C.n
    CR = c_matrix(C, t, order, "p")
    CR2 = matmul(CR, CR, sig)
    x = TruncatedSeries.vector(t, order, "x")
    pL = TruncatedSeries.vector(t, order, "pL")
    l1 = TruncatedSeries.grading_power(t, order, 1, c=-I * Q(1, 2))
    l2a = TruncatedSeries.grading_power(t, order, 2, c=-I * Q(1, 12))
    l2b = TruncatedSeries.grading_power(t, order, 2, c=I * Q(1, 24))
    total = TruncatedSeries.zero(t, order)
    for a in range(n):
        for b in range(n):
            s = sig[a] * sig[b]
            total = total + (l1 * pL[a] * x[b] * CR[a][b]).scale(s)
            total = total + (l2a * pL[a] * x[b] * CR2[a][b]).scale(s)
            for g in range(n):
                for d in range(n):
                    c = C[d, a, g]
                    if c and CR[b][d].terms:
                        total = total + (l2b * pL[a] * pL[b] * x[g] * CR[b][d]).scale(s * sig[g] * sig[d] * c)
    return PhaseSpaceOperator(total)


def ln_twist_check(C: StructureConstants, order: int = 2, form: str = "display") -> Report:
    """Compare ``ln F`` with the closed second-order form.

    ``form="display"`` uses the simplified form with coefficients 1/2, 1/12,
    -1/24 (:func:`ln_twist_expected`); ``form="expanded"`` the unsimplified
    one (:func:`ln_twist_expanded`).
    """
    want = {"display": ln_twist_expected, "expanded": ln_twist_expanded}
    if form not in want:
        raise ValueError(f"unknown form {form!r}")
    got = ln_twist(C, order)
    return Report(f"ln-twist[{form}]", {"lnF": got - want[form](C, order)})
