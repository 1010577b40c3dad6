"""Quadratic deformations: ``[xh_mu, xh_nu] = theta_{mu nu g d} xh_g xh_d``.

Indices are 0-based internally; q symbols render 1-based (``q12`` is the
symbol for the pair of generators 0 and 1).  The quadratic relations are
plain sums without metric factors, and all operators here live in the
Euclidean Heisenberg algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from math import factorial
from typing import Mapping, Sequence

from .exact import I, Q, as_rational
from .exceptions import StructuralError
from .heisenberg import PhaseSpaceOperator, fock_apply
from .realization import Realization, unit_polynomial
from .report import Report
from .series import TruncatedSeries

__all__ = [
    "QuadraticStructure",
    "quadratic_jacobi_check",
    "relation_rank",
    "dilation_theta",
    "LaurentQ",
    "q_word_normal_order",
    "q_multinomial",
    "distinct_words",
    "dilation_realization",
    "generalized_weyl_first_order",
    "q_commutation_residual",
    "quadratic_commutator_residual",
    "word_action",
    "classical_multinomial",
]


def _theta_dict(theta) -> dict[tuple[int, int, int, int], object]:
    if isinstance(theta, Mapping):
        return {tuple(k): as_rational(v) for k, v in theta.items() if as_rational(v)}
    out = {}
    n = len(theta)
    for k in product(range(n), repeat=4):
        v = as_rational(theta[k[0]][k[1]][k[2]][k[3]])
        if v:
            out[k] = v
    return out


def _antisymmetry_violations(th):
    return sorted(k for k, v in th.items() if th.get((k[1], k[0], k[2], k[3]), 0) != -v)


def relation_rank(n: int, theta) -> int:
    """Rank of ``{x_mu x_nu - x_nu x_mu - theta_{mu nu g d} x_g x_d : mu < nu}`` in ``T^2(V)``."""
    th = _theta_dict(theta)
    rows = []
    for m, v in combinations(range(n), 2):
        row = [Q(0)] * (n * n)
        row[m * n + v] += 1
        row[v * n + m] -= 1
        for (a, b, g, d), c in th.items():
            if (a, b) == (m, v):
                row[g * n + d] -= c
        rows.append(row)
    rank, col = 0, 0
    while rank < len(rows) and col < n * n:
        piv = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                f = rows[r][col] / rows[rank][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
        col += 1
    return rank


def quadratic_jacobi_check(theta, n: int | None = None) -> Report:
    """Six-term quadratic Jacobi identity for every ``(mu, nu, tau; rho, sigma, delta)``.

    ``theta`` is a nested ``n^4`` array or a sparse ``{(mu, nu, g, d): value}`` map.
    Residual keys are the index sextuples with a nonzero sum.
    """
    th = _theta_dict(theta)
    if n is None:
        n = len(theta) if not isinstance(theta, Mapping) else 1 + max((max(k) for k in th), default=0)
    bad = _antisymmetry_violations(th)
    if bad:
        raise StructuralError(f"theta is not antisymmetric in its first index pair at {bad[0]}")

    def T(*k):
        return th.get(k, 0)

    res = {}
    for m, v, t, r, s, d in product(range(n), repeat=6):
        total = 0
        for g in range(n):
            total += (T(m, v, g, d) * T(g, t, r, s) + T(m, v, r, g) * T(g, t, s, d)
                      + T(v, t, g, d) * T(g, m, r, s) + T(v, t, r, g) * T(g, m, s, d)
                      + T(t, m, g, d) * T(g, v, r, s) + T(t, m, r, g) * T(g, v, s, d))
        if total:
            res[(m, v, t, r, s, d)] = Q(total)
    return Report("quadratic-jacobi", res)


@dataclass(frozen=True)
class QuadraticStructure:
    n: int
    theta: Mapping[tuple[int, int, int, int], object] = field(default_factory=dict)
    nondegenerate: bool = True
    validate: bool = True

    def __post_init__(self):
        th = _theta_dict(self.theta)
        object.__setattr__(self, "theta", th)
        if any(not 0 <= i < self.n for k in th for i in k):
            raise StructuralError("theta index out of range")
        bad = _antisymmetry_violations(th)
        if bad:
            raise StructuralError(f"theta is not antisymmetric in its first index pair at {bad[0]}")
        full = relation_rank(self.n, th) == self.n * (self.n - 1) // 2
        object.__setattr__(self, "nondegenerate", full)
        if self.validate:
            if not full:
                raise StructuralError("quadratic relations do not span a space of maximal dimension")
            rep = quadratic_jacobi_check(th, self.n)
            if not rep.ok:
                raise StructuralError(f"quadratic Jacobi identity fails at {next(iter(rep.nonzero()))}")

    def __getitem__(self, k):
        return self.theta.get(tuple(k), Q(0))

    def __hash__(self):
        return hash((self.n, tuple(sorted(self.theta.items()))))


def dilation_theta(q2: Mapping[tuple[int, int], object]) -> dict:
    """theta of ``xh_a xh_b = q2_{ab} xh_b xh_a`` (``a < b``): ``theta_{ab ba} = q2 - 1`` and its antisymmetric partner."""
    th = {}
    for (a, b), v in q2.items():
        if a >= b:
            raise StructuralError("pairs must be given with a < b")
        c = as_rational(v) - 1
        if c:
            th[(a, b, b, a)] = c
            th[(b, a, b, a)] = -c
    return th


# -- Laurent polynomials in the pair symbols ------------------------------------

def _pairs(n):
    return list(combinations(range(n), 2))


class LaurentQ:
    """Laurent polynomial in ``q_{ab}`` (``a < b``), with ``q_{ba} = q_{ab}^{-1}`` and ``q_{aa} = 1``."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[tuple[int, ...], object] | None = None):
        self.n = n
        size = len(_pairs(n))
        clean = {}
        for k, c in (terms or {}).items():
            k = tuple(k)
            if len(k) != size:
                raise StructuralError(f"exponent vector {k} needs {size} entries")
            c = as_rational(c)
            if c:
                clean[k] = clean.get(k, 0) + c
        self.terms = {k: c for k, c in clean.items() if c}

    @classmethod
    def one(cls, n: int, c=1) -> "LaurentQ":
        return cls(n, {(0,) * len(_pairs(n)): c})

    @classmethod
    def symbol(cls, n: int, a: int, b: int) -> "LaurentQ":
        if a == b:
            return cls.one(n)
        e = [0] * len(_pairs(n))
        e[_pairs(n).index((min(a, b), max(a, b)))] = 1 if a < b else -1
        return cls(n, {tuple(e): 1})

    def _same(self, other):
        if isinstance(other, LaurentQ):
            if other.n != self.n:
                raise StructuralError("Laurent polynomials over different generator counts")
            return other
        return LaurentQ.one(self.n, other)

    def __add__(self, other):
        other = self._same(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return LaurentQ(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentQ(self.n, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._same(other))

    def __mul__(self, other):
        other = self._same(other)
        out = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0) + c1 * c2
        return LaurentQ(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = LaurentQ.one(self.n)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, type(Q(0)))):
            other = LaurentQ.one(self.n, other)
        if not isinstance(other, LaurentQ):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, tuple(sorted(self.terms.items()))))

    def inverted(self) -> "LaurentQ":
        """Substitute ``q_{ab} -> q_{ab}^{-1}``."""
        return LaurentQ(self.n, {tuple(-e for e in k): c for k, c in self.terms.items()})

    def at_one(self):
        return sum(self.terms.values(), Q(0))

    def collapse(self) -> dict[int, object]:
        """All ``q_{ab}`` (``a < b``) set to one symbol ``q``: ``{power: coefficient}``."""
        out: dict[int, object] = {}
        for k, c in self.terms.items():
            s = sum(k)
            out[s] = out.get(s, 0) + c
        return {k: c for k, c in out.items() if c}

    def to_series(self, a, table, order: int) -> TruncatedSeries:
        """Evaluate at ``q_{ab} = exp(l a[a][b])`` as a series over ``table``."""
        pairs = _pairs(self.n)
        total = TruncatedSeries.zero(table, order)
        for k, c in self.terms.items():
            w = sum((as_rational(a[p][q]) * e for (p, q), e in zip(pairs, k)), Q(0))
            total = total + TruncatedSeries.grading_power(table, order, 1, c=w).exp().scale(c)
        return total

    def _mono(self, k) -> str:
        parts = []
        for (a, b), e in zip(_pairs(self.n), k):
            if e:
                sym = f"q{a + 1}{b + 1}" if self.n <= 9 else f"q{a + 1}_{b + 1}"
                parts.append(sym if e == 1 else f"{sym}^{e}")
        return "*".join(parts)

    def render(self) -> str:
        """Terms in decreasing exponent order, e.g. ``q12^2 + 1 + q12^-2``."""
        if not self.terms:
            return "0"
        chunks = []
        for k in sorted(self.terms, reverse=True):
            c = self.terms[k]
            mono = self._mono(k)
            cs = str(c)
            if not mono:
                chunks.append(cs)
            elif c == 1:
                chunks.append(mono)
            elif c == -1:
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
        return f"LaurentQ({self.render()})"


def q_word_normal_order(word: Sequence[int], n: int) -> tuple[LaurentQ, tuple[int, ...]]:
    """``xh_{w_1} ... xh_{w_N} |> 1 = prod_{k<l} q_{w_k w_l} x^m`` for the dilation realization."""
    for w in word:
        if not 0 <= w < n:
            raise StructuralError(f"generator index {w} out of range for n={n}")
    pairs = _pairs(n)
    e = [0] * len(pairs)
    for i in range(len(word)):
        for j in range(i + 1, len(word)):
            a, b = word[i], word[j]
            if a != b:
                e[pairs.index((min(a, b), max(a, b)))] += 1 if a < b else -1
    m = [0] * n
    for w in word:
        m[w] += 1
    return LaurentQ(n, {tuple(e): 1}), tuple(m)


def distinct_words(exponents: Sequence[int]):
    """All distinct words with letter ``a`` used ``exponents[a]`` times, in lexicographic order."""
    counts = list(exponents)
    if any(c < 0 for c in counts):
        raise StructuralError("exponents must be non-negative")
    total = sum(counts)
    word: list[int] = []

    def rec():
        if len(word) == total:
            yield tuple(word)
            return
        for a, c in enumerate(counts):
            if c:
                counts[a] -= 1
                word.append(a)
                yield from rec()
                word.pop()
                counts[a] += 1

    yield from rec()


def q_multinomial(exponents: Sequence[int]) -> LaurentQ:
    """Coefficient of ``prod (k_a x_a)^{m_a}`` in ``(k.xh)^N |> 1`` under q-commutation."""
    n = len(exponents)
    total = LaurentQ(n)
    for w in distinct_words(exponents):
        total = total + q_word_normal_order(w, n)[0]
    return total


def classical_multinomial(exponents: Sequence[int]) -> int:
    out = factorial(sum(exponents))
    for m in exponents:
        out //= factorial(m)
    return out


# -- realizations ------------------------------------------------------------------

def _antisymmetric(a):
    a = [[as_rational(v) for v in row] for row in a]
    n = len(a)
    if any(len(row) != n for row in a):
        raise StructuralError("matrix must be square")
    for i in range(n):
        for j in range(n):
            if a[i][j] != -a[j][i]:
                raise StructuralError(f"matrix is not antisymmetric at ({i},{j})")
    return a


def dilation_realization(a, order: int) -> Realization:
    """``xh_alpha = x_alpha exp(i l sum_b a_{alpha b} D_b)``, ``D_b = x_b p_b``.

    ``l`` grades the powers of ``a``; on monomials the exponential rescales
    ``x_b`` by ``q_{alpha b} = e^{l a_{alpha b}}``.
    """
    a = _antisymmetric(a)
    n = len(a)
    t = PhaseSpaceOperator.operator_table(n, signature=(1,) * n)
    X = [PhaseSpaceOperator.coordinate(t, order, i) for i in range(n)]
    P = [PhaseSpaceOperator.momentum(t, order, i) for i in range(n)]
    il = TruncatedSeries.grading_power(t, order, 1, c=I)
    ops = []
    for al in range(n):
        A = PhaseSpaceOperator.scalar(t, order, 0)
        for b in range(n):
            if a[al][b]:
                A = A + (X[b] * P[b]) * il.scale(a[al][b])
        total = term = PhaseSpaceOperator.scalar(t, order, 1)
        for j in range(1, order + 1):
            term = (term * A) * TruncatedSeries.constant(t, order, Q(1, j))
            if term.is_zero():
                break
            total = total + term
        ops.append(X[al] * total)
    return Realization(tuple(ops), "quadratic-in-x", "user")


def q_commutation_residual(R: Realization, a, order: int | None = None) -> Report:
    """``xh_a xh_b - e^{2 l a_{ab}} xh_b xh_a`` for ``a < b``."""
    order = R.order if order is None else min(order, R.order)
    a = _antisymmetric(a)
    t = R.table
    res = {}
    for i, j in _pairs(R.n):
        q2 = TruncatedSeries.grading_power(t, order, 1, c=2 * a[i][j]).exp()
        d = (R[i] * R[j]).series.truncate(order) - q2 * (R[j] * R[i]).series.truncate(order)
        if not d.is_zero():
            res[(i, j)] = d
    return Report("q-commutation", res)


def generalized_weyl_first_order(theta: QuadraticStructure | Mapping, n: int | None = None,
                                 order: int = 1) -> Realization:
    """``xh_mu = x_mu + (i l/2) theta_{mu g b a} x_a x_b p_g``; ``l`` marks powers of theta."""
    if isinstance(theta, QuadraticStructure):
        n, th = theta.n, theta.theta
    else:
        th = _theta_dict(theta)
        if n is None:
            raise StructuralError("dimension required for a raw theta map")
    t = PhaseSpaceOperator.operator_table(n, signature=(1,) * n)
    x = TruncatedSeries.vector(t, order, "x")
    p = TruncatedSeries.vector(t, order, "p")
    il2 = TruncatedSeries.grading_power(t, order, 1, c=I * Q(1, 2))
    series = list(x)
    for (mu, g, b, al), c in th.items():
        series[mu] = series[mu] + (il2 * x[al] * x[b] * p[g]).scale(c)
    return Realization(tuple(PhaseSpaceOperator(s) for s in series), "quadratic-in-x", "user")


def quadratic_commutator_residual(R: Realization, theta: QuadraticStructure | Mapping, order: int = 1) -> Report:
    """``[xh_mu, xh_nu] - l theta_{mu nu g d} x_g x_d`` through ``l^order``."""
    th = theta.theta if isinstance(theta, QuadraticStructure) else _theta_dict(theta)
    t = R.table
    x = TruncatedSeries.vector(t, order, "x")
    l1 = TruncatedSeries.grading_power(t, order, 1)
    res = {}
    for mu, nu in _pairs(R.n):
        want = TruncatedSeries.zero(t, order)
        for (m, v, g, d), c in th.items():
            if (m, v) == (mu, nu):
                want = want + (l1 * x[g] * x[d]).scale(c)
        diff = R[mu].commutator(R[nu]).series.truncate(order) - want
        if not diff.is_zero():
            res[(mu, nu)] = diff
    return Report("quadratic-commutators", res)


def word_action(R: Realization, word: Sequence[int]) -> TruncatedSeries:
    """``xh_{w_1} ... xh_{w_N} |> 1``."""
    f = unit_polynomial(R.table, R.pairs)
    for w in reversed(word):
        f = fock_apply(R[w], f)
    return f
