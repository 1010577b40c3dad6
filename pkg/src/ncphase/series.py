"""Truncated multivariate formal power series with exact coefficients.

A series lives over a :class:`VariableTable`: a dimension ``n``, an ordered
list of vector symbols (each contributing ``n`` scalar variables such as
``k0, k1, ...``) and one grading symbol (``l`` by default).  Only the degree in
the grading symbol is truncated; momentum degrees are unbounded but every
series is a finite sparse map, so all constructions stay polynomial at each
retained order.

Exponent keys are tuples ``(grading_degree, v0_0, ..., v0_{n-1}, v1_0, ...)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from operator import add as _add
from typing import Iterable, Mapping, Sequence

from .exact import ONE, ZERO, ExactComplex, Q
from .exceptions import DomainError, StructuralError

__all__ = [
    "VariableTable",
    "TruncatedSeries",
    "series_arith",
    "series_exp",
    "apply_diff_operator",
    "invert_vector_series",
    "contract",
    "render_vector",
]


def minkowski(n: int) -> tuple[int, ...]:
    return (-1,) + (1,) * (n - 1)


@dataclass(frozen=True)
class VariableTable:
    """Variables of a series: ``n`` components per vector symbol plus a grading symbol."""

    n: int
    vectors: tuple[str, ...] = ()
    grading: str = "l"
    signature: tuple[int, ...] = field(default=None)

    def __post_init__(self):
        if self.n < 1:
            raise StructuralError("dimension must be positive")
        object.__setattr__(self, "vectors", tuple(self.vectors))
        sig = minkowski(self.n) if self.signature is None else tuple(int(s) for s in self.signature)
        if len(sig) != self.n or any(s not in (1, -1) for s in sig):
            raise StructuralError(f"signature must be {self.n} entries of +-1, got {sig}")
        object.__setattr__(self, "signature", sig)
        if len(set(self.vectors)) != len(self.vectors):
            raise StructuralError(f"duplicate vector symbols in {self.vectors}")
        if self.grading in self.vectors:
            raise StructuralError("grading symbol collides with a vector symbol")

    @property
    def size(self) -> int:
        return 1 + self.n * len(self.vectors)

    def offset(self, vector: str) -> int:
        try:
            return 1 + self.vectors.index(vector) * self.n
        except ValueError:
            raise StructuralError(f"vector symbol {vector!r} not in table {self.vectors}") from None

    def index(self, vector: str, i: int) -> int:
        if not 0 <= i < self.n:
            raise StructuralError(f"component {i} out of range for n={self.n}")
        return self.offset(vector) + i

    def with_vectors(self, *vectors: str) -> "VariableTable":
        return VariableTable(self.n, tuple(vectors), self.grading, self.signature)

    def extended(self, *vectors: str) -> "VariableTable":
        extra = tuple(v for v in vectors if v not in self.vectors)
        return self.with_vectors(*(self.vectors + extra))

    def without(self, *vectors: str) -> "VariableTable":
        return self.with_vectors(*(v for v in self.vectors if v not in vectors))

    def with_grading(self, grading: str) -> "VariableTable":
        return VariableTable(self.n, self.vectors, grading, self.signature)

    def variable_names(self) -> list[str]:
        names = [self.grading]
        for v in self.vectors:
            names.extend(f"{v}{i}" for i in range(self.n))
        return names


def _coerce_coeff(c) -> ExactComplex:
    return c if isinstance(c, ExactComplex) else ExactComplex.coerce(c)


class TruncatedSeries:
    """Sparse exact series truncated in the grading symbol.

    Instances are treated as immutable; every operation returns a new series.
    ``a == b`` compares the two series up to the smaller of their orders.
    """

    __slots__ = ("table", "order", "terms")

    def __init__(self, table: VariableTable, order: int, terms: Mapping | None = None):
        if order < 0:
            raise StructuralError("truncation order must be non-negative")
        self.table = table
        self.order = order
        clean = {}
        size = table.size
        for key, c in (terms or {}).items():
            key = tuple(key)
            if len(key) != size:
                raise StructuralError(f"exponent {key} does not match table of size {size}")
            if key[0] > order:
                continue
            c = _coerce_coeff(c)
            if c:
                clean[key] = c
        self.terms = clean

    @classmethod
    def _raw(cls, table, order, terms):
        obj = object.__new__(cls)
        obj.table = table
        obj.order = order
        obj.terms = terms
        return obj

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, table: VariableTable, order: int) -> "TruncatedSeries":
        return cls._raw(table, order, {})

    @classmethod
    def constant(cls, table: VariableTable, order: int, c=1) -> "TruncatedSeries":
        c = _coerce_coeff(c)
        if not c:
            return cls.zero(table, order)
        return cls._raw(table, order, {(0,) * table.size: c})

    @classmethod
    def one(cls, table: VariableTable, order: int) -> "TruncatedSeries":
        return cls.constant(table, order, ONE)

    @classmethod
    def var(cls, table: VariableTable, order: int, vector: str, i: int, c=1) -> "TruncatedSeries":
        key = [0] * table.size
        key[table.index(vector, i)] = 1
        return cls(table, order, {tuple(key): c})

    @classmethod
    def vector(cls, table: VariableTable, order: int, vector: str) -> list["TruncatedSeries"]:
        return [cls.var(table, order, vector, i) for i in range(table.n)]

    @classmethod
    def grading_power(cls, table: VariableTable, order: int, power: int = 1, c=1) -> "TruncatedSeries":
        key = [0] * table.size
        key[0] = power
        return cls(table, order, {tuple(key): c})

    @classmethod
    def monomial(cls, table, order, exponents: Mapping[str, Sequence[int]], grading: int = 0, c=1):
        key = [0] * table.size
        key[0] = grading
        for vec, exps in exponents.items():
            off = table.offset(vec)
            for i, e in enumerate(exps):
                key[off + i] = e
        return cls(table, order, {tuple(key): c})

    # -- basic queries -----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def items(self):
        return self.terms.items()

    def constant_term(self) -> ExactComplex:
        return self.terms.get((0,) * self.table.size, ZERO)

    def grading_degrees(self) -> set[int]:
        return {k[0] for k in self.terms}

    def min_grading_degree(self) -> int | None:
        return min((k[0] for k in self.terms), default=None)

    def degree_in(self, *vectors: str) -> int:
        """Maximal total degree in the given vector symbols."""
        spans = [self._span(v) for v in vectors]
        return max((sum(sum(k[a:b]) for a, b in spans) for k in self.terms), default=0)

    def _span(self, vector):
        off = self.table.offset(vector)
        return off, off + self.table.n

    def depends_on(self, vector: str) -> bool:
        if vector not in self.table.vectors:
            return False
        a, b = self._span(vector)
        return any(any(k[a:b]) for k in self.terms)

    def grading_part(self, degree: int) -> "TruncatedSeries":
        return TruncatedSeries._raw(self.table, self.order, {k: c for k, c in self.terms.items() if k[0] == degree})

    # -- arithmetic --------------------------------------------------------
    def _check(self, other: "TruncatedSeries"):
        if self.table != other.table:
            raise StructuralError(f"mismatched variable tables: {self.table} vs {other.table}")

    def _lift(self, other):
        if isinstance(other, TruncatedSeries):
            self._check(other)
            return other
        return TruncatedSeries.constant(self.table, self.order, other)

    def __add__(self, other):
        other = self._lift(other)
        order = min(self.order, other.order)
        out = {k: c for k, c in self.terms.items() if k[0] <= order}
        for k, c in other.terms.items():
            if k[0] > order:
                continue
            prev = out.get(k)
            if prev is None:
                out[k] = c
            else:
                s = prev + c
                if s:
                    out[k] = s
                else:
                    del out[k]
        return TruncatedSeries._raw(self.table, order, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries._raw(self.table, self.order, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, c) -> "TruncatedSeries":
        c = _coerce_coeff(c)
        if not c:
            return TruncatedSeries.zero(self.table, self.order)
        return TruncatedSeries._raw(self.table, self.order, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        self._check(other)
        order = min(self.order, other.order)
        return TruncatedSeries._raw(self.table, order, _mul_terms(self.terms, other.terms, order))

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * other.reciprocal()
        return self.scale(ONE / _coerce_coeff(other))

    def __pow__(self, k: int):
        if k < 0:
            return self.reciprocal() ** (-k)
        out = TruncatedSeries.one(self.table, self.order)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            if self.table != other.table:
                return False
            if self.order == other.order:
                return self.terms == other.terms
            order = min(self.order, other.order)
            return self.truncate(order).terms == other.truncate(order).terms
        try:
            return self.terms == TruncatedSeries.constant(self.table, self.order, other).terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.table, frozenset(self.terms.items())))

    # -- truncations and views ---------------------------------------------
    def truncate(self, order: int) -> "TruncatedSeries":
        if order >= self.order and all(k[0] <= order for k in self.terms):
            return TruncatedSeries._raw(self.table, order if order <= self.order else self.order, self.terms)
        return TruncatedSeries._raw(self.table, min(order, self.order),
                                    {k: c for k, c in self.terms.items() if k[0] <= order})

    def with_order(self, order: int) -> "TruncatedSeries":
        """Same terms, truncated (never extended in precision) to ``order``."""
        return TruncatedSeries._raw(self.table, order, {k: c for k, c in self.terms.items() if k[0] <= order})

    def truncate_degree(self, vectors: Iterable[str], cap: int) -> "TruncatedSeries":
        spans = [self._span(v) for v in vectors if v in self.table.vectors]
        return TruncatedSeries._raw(
            self.table, self.order,
            {k: c for k, c in self.terms.items() if sum(sum(k[a:b]) for a, b in spans) <= cap})

    def set_zero(self, *vectors: str) -> "TruncatedSeries":
        """Evaluate at the origin of the given vector symbols (table unchanged)."""
        spans = [self._span(v) for v in vectors]
        return TruncatedSeries._raw(
            self.table, self.order,
            {k: c for k, c in self.terms.items() if not any(any(k[a:b]) for a, b in spans)})

    def embed(self, table: VariableTable) -> "TruncatedSeries":
        """Re-express over ``table`` (matching vectors by name)."""
        if table == self.table:
            return self
        if table.n != self.table.n:
            raise StructuralError("cannot embed across dimensions")
        moves = []
        for v in self.table.vectors:
            src = self.table.offset(v)
            if v in table.vectors:
                moves.append((src, table.offset(v)))
            elif self.depends_on(v):
                raise StructuralError(f"series depends on {v!r}, absent from target table")
        n = self.table.n
        out = {}
        for k, c in self.terms.items():
            nk = [0] * table.size
            nk[0] = k[0]
            for src, dst in moves:
                nk[dst:dst + n] = k[src:src + n]
            out[tuple(nk)] = c
        return TruncatedSeries._raw(table, self.order, out)

    def rename(self, mapping: Mapping[str, str], table: VariableTable | None = None) -> "TruncatedSeries":
        new_vectors = tuple(mapping.get(v, v) for v in self.table.vectors)
        renamed = TruncatedSeries._raw(self.table.with_vectors(*new_vectors), self.order, self.terms)
        return renamed if table is None else renamed.embed(table)

    def regrade(self, grading: str) -> "TruncatedSeries":
        return TruncatedSeries._raw(self.table.with_grading(grading), self.order, self.terms)

    def split_by(self, vector: str) -> dict[tuple[int, ...], "TruncatedSeries"]:
        """Group terms by their exponents in ``vector``; values have those exponents zeroed."""
        a, b = self._span(vector)
        zero = (0,) * (b - a)
        groups: dict = {}
        for k, c in self.terms.items():
            groups.setdefault(k[a:b], {})[k[:a] + zero + k[b:]] = c
        return {e: TruncatedSeries._raw(self.table, self.order, t) for e, t in groups.items()}

    # -- calculus ----------------------------------------------------------
    def derivative(self, vector: str, i: int) -> "TruncatedSeries":
        pos = self.table.index(vector, i)
        out = {}
        for k, c in self.terms.items():
            e = k[pos]
            if e:
                nk = list(k)
                nk[pos] = e - 1
                out[tuple(nk)] = c * e
        return TruncatedSeries._raw(self.table, self.order, out)

    def grading_derivative(self) -> "TruncatedSeries":
        out = {}
        for k, c in self.terms.items():
            if k[0]:
                out[(k[0] - 1,) + k[1:]] = c * k[0]
        return TruncatedSeries._raw(self.table, self.order, out)

    def euler_integrate(self, *vectors: str) -> "TruncatedSeries":
        """Divide every term by its total degree in ``vectors``.

        This is the formal integral ``int_0^1 dt/t`` of the series with the
        given vectors scaled by ``t``; terms of degree zero have no preimage.
        """
        spans = [self._span(v) for v in vectors]
        out = {}
        for k, c in self.terms.items():
            d = sum(sum(k[a:b]) for a, b in spans)
            if d == 0:
                raise DomainError("term of degree zero cannot be Euler-integrated")
            out[k] = c / d
        return TruncatedSeries._raw(self.table, self.order, out)

    def compose(self, mapping: Mapping[str, Sequence["TruncatedSeries"]],
                table: VariableTable | None = None, grading: "TruncatedSeries | None" = None) -> "TruncatedSeries":
        """Substitute series for the components of vector symbols.

        ``mapping`` sends a vector symbol of ``self.table`` to ``n`` series over
        ``table``; unmapped vectors are carried over by name.  ``grading``
        optionally replaces the grading symbol itself.
        """
        table = table or self.table
        n = self.table.n
        subs = []
        order = self.order
        for vec, comps in mapping.items():
            comps = list(comps)
            if len(comps) != n:
                raise StructuralError(f"substitution for {vec!r} needs {n} components")
            for s in comps:
                if s.table != table:
                    raise StructuralError("substituted series must live over the target table")
                order = min(order, s.order)
            subs.append((self.table.offset(vec), comps))
        if grading is not None:
            order = min(order, grading.order)
        keep = []
        for v in self.table.vectors:
            if v in mapping:
                continue
            if v in table.vectors:
                keep.append((self.table.offset(v), table.offset(v)))
            elif self.depends_on(v):
                raise StructuralError(f"vector {v!r} is neither substituted nor present in target")
        cache: dict = {}

        def power(pos, comp, e):
            key = (pos, e)
            hit = cache.get(key)
            if hit is None:
                hit = comp if e == 1 else power(pos, comp, e - 1) * comp
                cache[key] = hit
            return hit

        total: dict = {}
        for k, c in self.terms.items():
            if grading is None and k[0] > order:
                continue
            base = [0] * table.size
            base[0] = k[0] if grading is None else 0
            for src, dst in keep:
                base[dst:dst + n] = k[src:src + n]
            term = TruncatedSeries._raw(table, order, {tuple(base): c})
            if grading is not None and k[0]:
                term = term * power(-1, grading, k[0])
            for off, comps in subs:
                for i in range(n):
                    e = k[off + i]
                    if e:
                        term = term * power(off + i, comps[i], e)
                        if not term.terms:
                            break
            for kk, cc in term.terms.items():
                prev = total.get(kk)
                total[kk] = cc if prev is None else prev + cc
        return TruncatedSeries._raw(table, order, {k: c for k, c in total.items() if c})

    def reciprocal(self) -> "TruncatedSeries":
        """Exact inverse of a series whose constant term is an invertible scalar
        and whose remaining l^0 part vanishes."""
        c0 = self.constant_term()
        if not c0:
            raise DomainError("series without constant term is not invertible")
        rest = self - c0
        if any(k[0] == 0 for k in rest.terms):
            raise DomainError("non-constant ungraded part: inverse does not terminate")
        u = rest.scale(ONE / c0)
        out = TruncatedSeries.one(self.table, self.order)
        term = out
        for _ in range(self.order):
            term = -(term * u)
            if not term.terms:
                break
            out = out + term
        return out.scale(ONE / c0)

    def exp(self, cap: int | None = None, cap_vectors: Sequence[str] = ()) -> "TruncatedSeries":
        return series_exp(self, cap=cap, cap_vectors=cap_vectors)

    # -- rendering ---------------------------------------------------------
    def monomial_str(self, key) -> str:
        t = self.table
        parts = []
        if key[0]:
            parts.append(t.grading if key[0] == 1 else f"{t.grading}^{key[0]}")
        for vi, v in enumerate(t.vectors):
            off = 1 + vi * t.n
            for i in range(t.n):
                e = key[off + i]
                if e:
                    parts.append(f"{v}{i}" if e == 1 else f"{v}{i}^{e}")
        return "*".join(parts)

    def render(self) -> str:
        """Canonical text: terms sorted by (grading degree, multi-index)."""
        if not self.terms:
            return "0"
        chunks = []
        for key in sorted(self.terms):
            c = self.terms[key]
            mono = self.monomial_str(key)
            cs = str(c)
            if not mono:
                chunks.append(cs)
            elif cs == "1":
                chunks.append(mono)
            elif cs == "-1":
                chunks.append("-" + mono)
            else:
                chunks.append(f"{cs}*{mono}")
        text = chunks[0]
        for ch in chunks[1:]:
            text += " - " + ch[1:] if ch.startswith("-") else " + " + ch
        return text

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"TruncatedSeries(O={self.order}, {self.render()})"


def _mul_terms(a: dict, b: dict, order: int) -> dict:
    if len(a) > len(b):
        a, b = b, a
    b_items = sorted(b.items(), key=lambda kv: kv[0][0])
    out: dict = {}
    get = out.get
    for ka, ca in a.items():
        budget = order - ka[0]
        if budget < 0:
            continue
        for kb, cb in b_items:
            if kb[0] > budget:
                break
            key = tuple(map(_add, ka, kb))
            prev = get(key)
            out[key] = ca * cb if prev is None else prev + ca * cb
    return {k: c for k, c in out.items() if c}


# -- module-level operations ------------------------------------------------

def series_arith(a: TruncatedSeries, b, op: str) -> TruncatedSeries:
    """Dispatch ``add``, ``sub``, ``mul`` or ``scalar-mul`` on two operands."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        if not isinstance(b, TruncatedSeries):
            raise StructuralError("mul expects two series; use scalar-mul")
        return a * b
    if op == "scalar-mul":
        return a.scale(b)
    raise ValueError(f"unknown series operation {op!r}")


def series_exp(a: TruncatedSeries, cap: int | None = None, cap_vectors: Sequence[str] = ()) -> TruncatedSeries:
    """Exponential of a series that is nilpotent under truncation.

    Ungraded terms are only allowed when a degree ``cap`` on ``cap_vectors`` is
    given and every such term has positive degree in those vectors.
    """
    if a.constant_term():
        raise DomainError("exp of a series with nonzero constant term is not exact")
    ungraded = a.grading_part(0)
    if ungraded.terms:
        if cap is None:
            raise DomainError("ungraded part makes exp non-terminating; pass a degree cap")
        spans = [a._span(v) for v in cap_vectors]
        for k in ungraded.terms:
            if sum(sum(k[s:e]) for s, e in spans) == 0:
                raise DomainError("ungraded term without capped variables: exp does not terminate")
    out = TruncatedSeries.one(a.table, a.order)
    term = out
    j = 0
    while True:
        j += 1
        term = (term * a).scale(Q(1, j))
        if cap is not None:
            term = term.truncate_degree(cap_vectors, cap)
        if not term.terms:
            return out
        out = out + term


def contract(u: Sequence[TruncatedSeries], v: Sequence[TruncatedSeries], signature: Sequence[int]):
    """Metric contraction ``u_a v_a = sum_a eta_aa u_a v_a``."""
    total = None
    for s, ua, va in zip(signature, u, v):
        t = ua * va
        if s < 0:
            t = -t
        total = t if total is None else total + t
    return total


def apply_diff_operator(op_coeffs: Sequence[TruncatedSeries], target: str, body: TruncatedSeries,
                        repetitions: int | str = 1) -> TruncatedSeries:
    """Apply ``X = sum_a c_a d/d(target)_a`` (``repetitions`` times, or ``exp(X)``).

    In ``"exp"`` mode the ungraded part of each coefficient must not depend on
    the target vector.  Such a part is a pure translation, which lowers the
    target degree of a polynomial, so the Taylor sum of ``exp(X)`` terminates at
    every retained order.
    """
    n = body.table.n
    coeffs = list(op_coeffs)
    if len(coeffs) != n:
        raise StructuralError(f"operator needs {n} coefficients")
    for c in coeffs:
        if c.table != body.table:
            raise StructuralError("operator coefficients and body must share a table")

    def X(f):
        total = TruncatedSeries.zero(f.table, min(f.order, *(c.order for c in coeffs)))
        for a in range(n):
            d = f.derivative(target, a)
            if d.terms and coeffs[a].terms:
                total = total + coeffs[a] * d
        return total

    if repetitions != "exp":
        f = body
        for _ in range(int(repetitions)):
            f = X(f)
        return f
    for c in coeffs:
        if c.grading_part(0).depends_on(target):
            raise DomainError("ungraded coefficient depends on the target: exp(X) does not terminate")
    order = min([body.order] + [c.order for c in coeffs])
    raise_by = max([max(0, c.degree_in(target) - 1) for c in coeffs] + [0])
    bound = body.degree_in(target) + order * (raise_by + 1) + order + 2
    out = body.with_order(order)
    term = out
    for j in range(1, bound + 1):
        term = X(term).scale(Q(1, j))
        if not term.terms:
            return out
        out = out + term
    raise DomainError("operator exponential failed to terminate")


def invert_vector_series(K: Sequence[TruncatedSeries], vector: str) -> list[TruncatedSeries]:
    """Compositional inverse of ``K(k) = k + O(l)`` to the truncation order."""
    K = list(K)
    table = K[0].table
    order = min(c.order for c in K)
    ident = TruncatedSeries.vector(table, order, vector)
    G = [K[m] - ident[m] for m in range(table.n)]
    for g in G:
        if g.grading_part(0).terms:
            raise DomainError("leading part of K is not the identity map")
    J = ident
    for _ in range(order):
        J = [ident[m] - G[m].compose({vector: J}) for m in range(table.n)]
    return J


def render_vector(components: Sequence[TruncatedSeries], label: str = "") -> str:
    return "\n".join(f"{label}{m}: {c.render()}" for m, c in enumerate(components))

