"""Normal-ordered calculus in the undeformed phase space and its Fock action.

An operator is stored as a :class:`~ncphase.series.TruncatedSeries` whose
monomials are read in normal order: every coordinate factor stands to the left
of every momentum factor.  Coordinates and momenta come in conjugate pairs of
vector symbols, by default ``("x", "p")``, with ``[p_mu, x_nu] = -i eta_{mu nu}``.
Every other vector symbol in the table is a commuting parameter.

Polynomials (elements of the symmetric algebra) are series over the
coordinate symbols only; polynomial-valued series may also carry parameters
and the grading symbol.
"""

from __future__ import annotations

from itertools import product as _cartesian
from math import comb, factorial
from operator import add as _add
from typing import Mapping, Sequence

from .exact import I, Q
from .exceptions import DomainError, StructuralError
from .series import TruncatedSeries, VariableTable

__all__ = [
    "EXACT",
    "PhaseSpaceOperator",
    "polynomial",
    "op_multiply",
    "fock_apply",
    "op_exponential_apply",
    "merge_tables",
]

#: Order used for exact objects (polynomials) that carry no truncation.
EXACT = 1 << 30

DEFAULT_PAIRS = (("x", "p"),)


def merge_tables(first: VariableTable, *others: VariableTable) -> VariableTable:
    table = first
    for t in others:
        if t.n != first.n or t.signature != first.signature or t.grading != first.grading:
            raise StructuralError(f"incompatible tables {first} and {t}")
        table = table.extended(*t.vectors)
    return table


def polynomial(n_or_table, terms: Mapping[Sequence[int], object] | None = None, *,
               vector: str = "x", signature=None) -> TruncatedSeries:
    """Exact polynomial in the coordinate vector ``vector``.

    ``terms`` maps exponent tuples of length ``n`` to coefficients; ``None``
    gives the unit polynomial.
    """
    if isinstance(n_or_table, VariableTable):
        table = n_or_table
    else:
        table = VariableTable(n_or_table, (vector,), signature=signature)
    if terms is None:
        return TruncatedSeries.one(table, EXACT)
    off = table.offset(vector)
    out = {}
    for exps, c in terms.items():
        key = [0] * table.size
        key[off:off + table.n] = exps
        out[tuple(key)] = c
    return TruncatedSeries(table, EXACT, out)


def _commutator_powers(signature):
    """``c_nu^j`` for ``c_nu = [p_nu, x_nu] = -i eta_nu``."""
    base = {1: -I, -1: I}
    cache = {}

    def power(s, j):
        key = (s, j)
        if key not in cache:
            cache[key] = base[s] ** j
        return cache[key]

    return power


class PhaseSpaceOperator:
    """Element of the Heisenberg algebra in normal order (x left, p right)."""

    __slots__ = ("series", "pairs")

    def __init__(self, series: TruncatedSeries, pairs: Sequence[tuple[str, str]] = DEFAULT_PAIRS):
        pairs = tuple(tuple(p) for p in pairs)
        for xs, ps in pairs:
            series.table.offset(xs)
            series.table.offset(ps)
        self.series = series
        self.pairs = pairs

    # -- construction ------------------------------------------------------
    @classmethod
    def operator_table(cls, n: int, params: Sequence[str] = (), grading: str = "l", signature=None,
                       pairs: Sequence[tuple[str, str]] = DEFAULT_PAIRS) -> VariableTable:
        vectors = [v for pair in pairs for v in pair] + list(params)
        return VariableTable(n, tuple(vectors), grading, signature)

    @classmethod
    def coordinate(cls, table: VariableTable, order: int, i: int, pair: int = 0,
                   pairs=DEFAULT_PAIRS) -> "PhaseSpaceOperator":
        return cls(TruncatedSeries.var(table, order, pairs[pair][0], i), pairs)

    @classmethod
    def momentum(cls, table: VariableTable, order: int, i: int, pair: int = 0,
                 pairs=DEFAULT_PAIRS) -> "PhaseSpaceOperator":
        return cls(TruncatedSeries.var(table, order, pairs[pair][1], i), pairs)

    @classmethod
    def scalar(cls, table: VariableTable, order: int, c=1, pairs=DEFAULT_PAIRS) -> "PhaseSpaceOperator":
        return cls(TruncatedSeries.constant(table, order, c), pairs)

    @property
    def table(self) -> VariableTable:
        return self.series.table

    @property
    def order(self) -> int:
        return self.series.order

    @property
    def x_vectors(self):
        return tuple(x for x, _ in self.pairs)

    @property
    def p_vectors(self):
        return tuple(p for _, p in self.pairs)

    def _wrap(self, series):
        return PhaseSpaceOperator(series, self.pairs)

    def _same(self, other: "PhaseSpaceOperator"):
        if other.pairs != self.pairs or other.table != self.table:
            raise StructuralError("operators live in different phase spaces")

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, PhaseSpaceOperator):
            self._same(other)
            return self._wrap(self.series + other.series)
        return self._wrap(self.series + other)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(-self.series)

    def __sub__(self, other):
        if isinstance(other, PhaseSpaceOperator):
            self._same(other)
            return self._wrap(self.series - other.series)
        return self._wrap(self.series - other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, PhaseSpaceOperator):
            return op_multiply(self, other)
        if isinstance(other, TruncatedSeries):
            self._check_central(other)
            return self._wrap(self.series * other)
        return self._wrap(self.series.scale(other))

    def __rmul__(self, other):
        if isinstance(other, TruncatedSeries):
            self._check_central(other)
            return self._wrap(other * self.series)
        return self._wrap(self.series.scale(other))

    def _check_central(self, s: TruncatedSeries):
        for v in self.x_vectors + self.p_vectors:
            if s.depends_on(v):
                raise StructuralError("only parameter series commute with operators; use op_multiply")

    def __pow__(self, k: int):
        out = PhaseSpaceOperator.scalar(self.table, self.order, 1, self.pairs)
        for _ in range(k):
            out = op_multiply(out, self)
        return out

    def commutator(self, other: "PhaseSpaceOperator") -> "PhaseSpaceOperator":
        return op_multiply(self, other) - op_multiply(other, self)

    def __eq__(self, other):
        if isinstance(other, PhaseSpaceOperator):
            return self.pairs == other.pairs and self.series == other.series
        return self.series == other

    def __hash__(self):
        return hash((self.pairs, self.series))

    def is_zero(self) -> bool:
        return self.series.is_zero()

    def truncate(self, order: int) -> "PhaseSpaceOperator":
        return self._wrap(self.series.truncate(order))

    def embed(self, table: VariableTable) -> "PhaseSpaceOperator":
        return self._wrap(self.series.embed(table))

    # -- structure ---------------------------------------------------------
    def x_degree(self) -> int:
        return self.series.degree_in(*self.x_vectors)

    def x_terms(self) -> dict[tuple[int, ...], TruncatedSeries]:
        """Map from coordinate exponents (all pairs concatenated) to momentum series."""
        t = self.table
        spans = [(t.offset(x), t.offset(x) + t.n) for x in self.x_vectors]
        groups: dict = {}
        for k, c in self.series.terms.items():
            xe = tuple(e for a, b in spans for e in k[a:b])
            nk = list(k)
            for a, b in spans:
                nk[a:b] = [0] * (b - a)
            groups.setdefault(xe, {})[tuple(nk)] = c
        return {xe: TruncatedSeries._raw(t, self.order, g) for xe, g in groups.items()}

    def render(self) -> str:
        """x-monomials printed left of their momentum series."""
        if self.series.is_zero():
            return "0"
        t = self.table
        names = [f"{x}{i}" for x in self.x_vectors for i in range(t.n)]
        chunks = []
        for xe, s in sorted(self.x_terms().items()):
            mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, xe) if e)
            body = s.render()
            if not mono:
                chunks.append(f"({body})")
            elif body == "1":
                chunks.append(mono)
            else:
                chunks.append(f"{mono}*({body})")
        return " + ".join(chunks)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"PhaseSpaceOperator({self.render()})"


def _pair_positions(table: VariableTable, pairs):
    out = []
    for xs, ps in pairs:
        xo, po = table.offset(xs), table.offset(ps)
        for i in range(table.n):
            out.append((xo + i, po + i, table.signature[i]))
    return out


def op_multiply(A: PhaseSpaceOperator, B: PhaseSpaceOperator) -> PhaseSpaceOperator:
    """Normal-ordered product using ``p^a x^b = sum_j j! C(a,j) C(b,j) c^j x^(b-j) p^(a-j)``."""
    A._same(B)
    table = A.table
    order = min(A.order, B.order)
    positions = _pair_positions(table, A.pairs)
    cpow = _commutator_powers(table.signature)
    b_items = sorted(B.series.terms.items(), key=lambda kv: kv[0][0])
    b_x = [[(xp, pp, s) for xp, pp, s in positions if kb[xp]] for kb, _ in b_items]
    out: dict = {}
    get = out.get
    for ka, ca in A.series.terms.items():
        budget = order - ka[0]
        if budget < 0:
            continue
        a_p = {pp for _, pp, _ in positions if ka[pp]}
        for (kb, cb), bx in zip(b_items, b_x):
            if kb[0] > budget:
                break
            base = tuple(map(_add, ka, kb))
            coeff = ca * cb
            cands = [(xp, pp, s, ka[pp], kb[xp]) for xp, pp, s in bx if pp in a_p]
            if not cands:
                prev = get(base)
                out[base] = coeff if prev is None else prev + coeff
                continue
            for js in _cartesian(*(range(min(a, b) + 1) for _, _, _, a, b in cands)):
                key = list(base)
                c = coeff
                for j, (xp, pp, s, a, b) in zip(js, cands):
                    if j:
                        key[xp] -= j
                        key[pp] -= j
                        c = c * (cpow(s, j) * (factorial(j) * comb(a, j) * comb(b, j)))
                key = tuple(key)
                prev = get(key)
                out[key] = c if prev is None else prev + c
    return PhaseSpaceOperator(TruncatedSeries._raw(table, order, {k: c for k, c in out.items() if c}), A.pairs)


def fock_apply(A: PhaseSpaceOperator, f: TruncatedSeries) -> TruncatedSeries:
    """``A |> f``: coordinates multiply, ``p_mu |> f = -i eta_mu d f / d x_mu``.

    The result lives over the coordinate and parameter symbols of both inputs.
    """
    a_table = A.table
    out_table = merge_tables(a_table.without(*A.p_vectors), f.table)
    if any(p in f.table.vectors for p in A.p_vectors):
        raise StructuralError("the acted-on polynomial must not contain momenta")
    order = min(A.order, f.order)
    cpow = _commutator_powers(a_table.signature)
    n = a_table.n
    # layout maps into the output table
    a_moves = [(a_table.offset(v), out_table.offset(v)) for v in a_table.vectors if v not in A.p_vectors]
    f_moves = [(f.table.offset(v), out_table.offset(v)) for v in f.table.vectors]
    pair_moves = []
    for xs, ps in A.pairs:
        po = a_table.offset(ps)
        xo_out = out_table.offset(xs)
        xo_f = f.table.offset(xs) if xs in f.table.vectors else None
        for i in range(n):
            pair_moves.append((po + i, None if xo_f is None else xo_f + i, xo_out + i, a_table.signature[i]))
    f_items = sorted(f.terms.items(), key=lambda kv: kv[0][0])
    f_keys = []
    for kf, cf in f_items:
        key = [0] * out_table.size
        key[0] = kf[0]
        for src, dst in f_moves:
            key[dst:dst + n] = kf[src:src + n]
        f_keys.append((kf, key, cf))
    out: dict = {}
    get = out.get
    for ka, ca in A.series.terms.items():
        budget = order - ka[0]
        if budget < 0:
            continue
        akey = [0] * out_table.size
        akey[0] = ka[0]
        for src, dst in a_moves:
            for i in range(n):
                akey[dst + i] += ka[src + i]
        needs = [(pp, fx, xo, s, ka[pp]) for pp, fx, xo, s in pair_moves if ka[pp]]
        for kf, fkey, cf in f_keys:
            if kf[0] > budget:
                break
            c = ca * cf
            key = list(map(_add, akey, fkey))
            ok = True
            for pp, fx, xo, s, a in needs:
                b = kf[fx] if fx is not None else 0
                if b < a:
                    ok = False
                    break
                key[xo] -= a
                c = c * (cpow(s, a) * (factorial(b) // factorial(b - a)))
            if not ok:
                continue
            key = tuple(key)
            prev = get(key)
            out[key] = c if prev is None else prev + c
    return TruncatedSeries._raw(out_table, order, {k: c for k, c in out.items() if c})


def _weighted_profile(A: PhaseSpaceOperator, weights: Mapping[str, int]):
    t = A.table
    spans = [(t.offset(x), t.offset(p), weights.get(x, 1)) for x, p in A.pairs]
    n = t.n
    for k in A.series.terms:
        net = 0
        for xo, po, w in spans:
            net += w * (sum(k[xo:xo + n]) - sum(k[po:po + n]))
        yield k[0], net


def op_exponential_apply(A: PhaseSpaceOperator, f: TruncatedSeries, cap: int | None = None,
                         weights: Mapping[str, int] | None = None) -> TruncatedSeries:
    """``exp(A) |> f`` truncated in the grading symbol.

    Termination is judged on the weighted coordinate degree (``weights`` maps
    coordinate symbols to positive weights, default 1).  The ungraded part of
    ``A`` must either strictly lower it, or strictly raise it; in the raising
    case the result is exact up to coordinate degree ``cap`` and higher
    degrees are dropped.  Without ungraded terms the sum terminates on its own.
    """
    weights = dict(weights or {})
    raising = lowering = False
    slack = 0
    for lg, net in _weighted_profile(A, weights):
        if lg == 0:
            if net > 0:
                raising = True
            elif net < 0:
                lowering = True
            else:
                raise DomainError("ungraded part preserves the coordinate degree; exp does not terminate")
        elif net < 0:
            slack = max(slack, -(-(-net) // lg))
    if raising and lowering:
        raise DomainError("ungraded part both raises and lowers the coordinate degree")
    if raising and cap is None:
        raise DomainError("ungraded exponent raises the coordinate degree; pass a cap")
    order = min(A.order, f.order)
    xs = A.x_vectors

    def weighted_degree(table):
        spans = [(table.offset(v), table.offset(v) + table.n, weights.get(v, 1)) for v in xs if v in table.vectors]
        return lambda k: sum(w * sum(k[a:b]) for a, b, w in spans)

    def prune(g):
        if not raising:
            return g
        deg = weighted_degree(g.table)
        return TruncatedSeries._raw(
            g.table, g.order, {k: c for k, c in g.terms.items() if deg(k) <= cap + (order - k[0]) * slack})

    term = prune(f.with_order(order) if f.order > order else f)
    total = term
    start = weighted_degree(f.table)
    phi0 = max((start(k) for k in f.terms), default=0)
    limit = (cap or 0) + phi0 + order * (max(weights.values(), default=1) * 8 + slack + 1) + 16
    j = 0
    while True:
        j += 1
        term = prune(fock_apply(A, term)).scale(Q(1, j))
        if term.is_zero():
            break
        if total.table != term.table:
            total = total.embed(term.table)
        total = total + term
        if j > limit:
            raise DomainError("operator exponential failed to terminate")
    if raising:
        deg = weighted_degree(total.table)
        total = TruncatedSeries._raw(total.table, total.order,
                                     {k: c for k, c in total.terms.items() if deg(k) <= cap})
    return total
