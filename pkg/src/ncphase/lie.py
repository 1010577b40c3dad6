"""Structure constants of Lie-type coordinate algebras, ``C(p)`` and ``psi``.

Index contractions always go through the diagonal metric ``eta``:
``A_a B_a = sum_a eta_aa A_a B_a``.  With this convention the commutator is
``[xh_mu, xh_nu] = i l sum_a C_{mu nu a} eta_aa xh_a`` and matrices compose as
``(A o B)_{mu nu} = sum_a A_{mu a} eta_aa B_{a nu}``, whose unit is ``eta``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Sequence

from .exact import Q, as_rational, format_rational
from .exceptions import DomainError, StructuralError
from .series import TruncatedSeries, VariableTable, minkowski

__all__ = [
    "StructureConstants",
    "check_jacobi",
    "c_matrix",
    "bernoulli_psi",
    "bernoulli_psi_coefficients",
    "psi_of_matrix",
    "matmul",
    "matadd",
    "metric_matrix",
    "generic_structure_constants",
]


def _antisymmetric_completion(n, entries):
    full = {}
    for (mu, nu, lam), v in entries.items():
        if not (0 <= mu < n and 0 <= nu < n and 0 <= lam < n):
            raise StructuralError(f"index out of range in C[{mu},{nu},{lam}]")
        if mu == nu:
            if v:
                raise StructuralError(f"diagonal entry C[{mu},{mu},{lam}] must vanish")
            continue
        for key, val in (((mu, nu, lam), v), ((nu, mu, lam), -v)):
            prev = full.get(key)
            if prev is not None and prev != val:
                raise StructuralError(f"conflicting entries for C{list(key)}")
            full[key] = val
    return {k: v for k, v in full.items() if not _is_zero(v)}


def _is_zero(v):
    return v.is_zero() if isinstance(v, TruncatedSeries) else v == 0


@dataclass(frozen=True)
class StructureConstants:
    """Antisymmetric tensor ``C_{mu nu lam}`` (stored without the factor ``l``).

    Entries are rationals.  A symbolic tensor may instead carry series entries
    (see :func:`generic_structure_constants`); those skip Jacobi validation.
    """

    n: int
    entries: Mapping[tuple[int, int, int], object] = field(default_factory=dict)
    signature: tuple[int, ...] | None = None
    validate: bool = True

    def __post_init__(self):
        sig = tuple(self.signature) if self.signature is not None else minkowski(self.n)
        if len(sig) != self.n or any(s not in (1, -1) for s in sig):
            raise StructuralError("signature must list n entries of +1 or -1")
        object.__setattr__(self, "signature", sig)
        raw = {}
        for k, v in dict(self.entries).items():
            raw[tuple(k)] = v if isinstance(v, TruncatedSeries) else as_rational(v)
        object.__setattr__(self, "entries", _antisymmetric_completion(self.n, raw))
        if self.validate:
            if self.is_symbolic:
                raise StructuralError("symbolic structure constants cannot be validated; pass validate=False")
            bad = check_jacobi(self.tensor(), self.signature)
            if bad:
                raise StructuralError(f"Jacobi identity fails at {len(bad)} index tuples, e.g. {bad[0]}")

    @property
    def is_symbolic(self) -> bool:
        return any(isinstance(v, TruncatedSeries) for v in self.entries.values())

    def __getitem__(self, idx):
        return self.entries.get(tuple(idx), Q(0))

    def __hash__(self):
        return hash((self.n, self.signature, tuple(sorted((k, str(v)) for k, v in self.entries.items()))))

    def tensor(self) -> list:
        n = self.n
        return [[[self[m, v, l] for l in range(n)] for v in range(n)] for m in range(n)]

    def is_zero(self) -> bool:
        return not self.entries

    def negated(self) -> "StructureConstants":
        return StructureConstants(self.n, {k: -v for k, v in self.entries.items()}, self.signature,
                                  validate=self.validate)

    def scaled(self, factor) -> "StructureConstants":
        f = as_rational(factor)
        return StructureConstants(self.n, {k: v * f for k, v in self.entries.items()}, self.signature,
                                  validate=self.validate)

    @classmethod
    def from_tensor(cls, tensor, signature=None) -> "StructureConstants":
        n = len(tensor)
        bad = antisymmetry_violations(tensor)
        if bad:
            raise StructuralError(f"tensor is not antisymmetric in its first two indices: {bad}")
        entries = {(m, v, l): tensor[m][v][l] for m, v, l in product(range(n), repeat=3) if m < v}
        return cls(n, entries, signature)

    # -- JSON --------------------------------------------------------------
    @classmethod
    def from_json(cls, doc) -> "StructureConstants":
        if isinstance(doc, (str, bytes)):
            doc = json.loads(doc)
        try:
            n = int(doc["n"])
            sig = doc.get("signature")
            rows = doc.get("C", [])
        except (KeyError, TypeError, ValueError) as exc:
            raise StructuralError(f"malformed structure-constant document: {exc}") from exc
        entries = {}
        for row in rows:
            if len(row) != 4:
                raise StructuralError(f"entry {row!r} must be [mu, nu, lambda, value]")
            mu, nu, lam, val = row
            mu, nu, lam = int(mu), int(nu), int(lam)
            if mu >= nu:
                raise StructuralError(f"entry {row!r} must have mu < nu")
            entries[(mu, nu, lam)] = as_rational(val)
        return cls(n, entries, sig)

    def to_json_dict(self) -> dict:
        if self.is_symbolic:
            raise StructuralError("symbolic structure constants have no JSON form")
        rows = [[m, v, l, format_rational(c)] for (m, v, l), c in sorted(self.entries.items()) if m < v]
        return {"n": self.n, "signature": list(self.signature), "C": rows}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


def antisymmetry_violations(tensor) -> list[tuple[int, int, int]]:
    n = len(tensor)
    out = []
    for m, v, l in product(range(n), repeat=3):
        if m <= v and as_rational(tensor[m][v][l]) != -as_rational(tensor[v][m][l]):
            out.append((m, v, l))
    return out


def check_jacobi(tensor, signature: Sequence[int] | None = None) -> list[tuple[int, int, int, int]]:
    """All ``(mu, nu, tau, lam)`` with ``sum_cyc C_{mu nu a} eta_a C_{a tau lam} != 0``.

    ``tensor`` is a nested ``n x n x n`` array (or a :class:`StructureConstants`).
    """
    if isinstance(tensor, StructureConstants):
        signature = tensor.signature
        tensor = tensor.tensor()
    n = len(tensor)
    sig = tuple(signature) if signature is not None else minkowski(n)
    bad = antisymmetry_violations(tensor)
    if bad:
        raise StructuralError(f"tensor is not antisymmetric in its first two indices: {bad}")
    T = [[[as_rational(tensor[m][v][l]) for l in range(n)] for v in range(n)] for m in range(n)]

    def term(a, b, c, lam):
        return sum((T[a][b][s] * sig[s] * T[s][c][lam] for s in range(n)), Q(0))

    out = []
    for mu, nu, tau in product(range(n), repeat=3):
        if not mu < nu < tau:
            continue
        for lam in range(n):
            if term(mu, nu, tau, lam) + term(nu, tau, mu, lam) + term(tau, mu, nu, lam):
                out.append((mu, nu, tau, lam))
    return out


def generic_structure_constants(n: int, prefix: str = "c") -> tuple[StructureConstants, VariableTable]:
    """Fully symbolic antisymmetric ``C``: one parameter vector per pair ``mu < nu``.

    Component ``lam`` of the vector ``<prefix><j>`` stands for ``C_{mu nu lam}``
    where ``(mu, nu)`` is the ``j``-th pair in lexicographic order.  Returns the
    tensor together with the parameter table its entries live over.
    """
    from .heisenberg import EXACT

    pairs = [(m, v) for m in range(n) for v in range(m + 1, n)]
    names = tuple(f"{prefix}{j}" for j in range(len(pairs)))
    table = VariableTable(n, names)
    entries = {}
    for j, (m, v) in enumerate(pairs):
        for lam in range(n):
            entries[(m, v, lam)] = TruncatedSeries.var(table, EXACT, names[j], lam)
    return StructureConstants(n, entries, validate=False), table


def metric_matrix(table: VariableTable, order: int) -> list[list[TruncatedSeries]]:
    n = table.n
    return [[TruncatedSeries.constant(table, order, table.signature[i] if i == j else 0) for j in range(n)]
            for i in range(n)]


def matmul(A, B, signature) -> list[list[TruncatedSeries]]:
    """Contracted product ``(A o B)_{mu nu} = sum_a A_{mu a} eta_aa B_{a nu}``."""
    n = len(A)
    out = []
    for mu in range(n):
        row = []
        for nu in range(n):
            acc = None
            for a in range(n):
                if A[mu][a].terms and B[a][nu].terms:
                    t = A[mu][a] * B[a][nu]
                    if signature[a] < 0:
                        t = -t
                    acc = t if acc is None else acc + t
            row.append(acc if acc is not None else TruncatedSeries.zero(A[0][0].table, min(A[0][0].order, B[0][0].order)))
        out.append(row)
    return out


def matadd(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def _entry_series(value, table, order):
    if isinstance(value, TruncatedSeries):
        return value.embed(table).with_order(order) if value.order > order else value.embed(table)
    return TruncatedSeries.constant(table, order, value)


def c_matrix(C: StructureConstants, table: VariableTable, order: int, vector: str = "p",
             graded: bool = False, momenta: Sequence[TruncatedSeries] | None = None) -> list[list[TruncatedSeries]]:
    """``C(v)_{mu nu} = sum_a C_{a mu nu} eta_aa v_a``, optionally times ``l``.

    ``momenta`` replaces the components of ``vector`` by arbitrary series.
    """
    if table.n != C.n:
        raise StructuralError("table dimension differs from the structure constants")
    sig = table.signature
    n = C.n
    if momenta is None:
        momenta = TruncatedSeries.vector(table, order, vector)
    lfac = TruncatedSeries.grading_power(table, order, 1) if graded else None
    M = [[TruncatedSeries.zero(table, order) for _ in range(n)] for _ in range(n)]
    for (a, mu, nu), c in C.entries.items():
        t = momenta[a] * _entry_series(c, table, order)
        if sig[a] < 0:
            t = -t
        M[mu][nu] = M[mu][nu] + t
    if lfac is not None:
        M = [[lfac * e if e.terms else e for e in row] for row in M]
    return M


def bernoulli_psi_coefficients(order: int) -> list:
    """Taylor coefficients of ``t / (1 - exp(-t))`` through ``t^order``."""
    # (1 - e^{-t})/t = sum_j (-1)^j t^j / (j+1)!
    den = []
    fact = 1
    for j in range(order + 1):
        fact *= j + 1
        den.append(Q((-1) ** j, fact))
    out = []
    for k in range(order + 1):
        acc = Q(1 if k == 0 else 0)
        for j in range(1, k + 1):
            acc -= den[j] * out[k - j]
        out.append(acc / den[0])
    return out


def bernoulli_psi(order: int) -> TruncatedSeries:
    """``psi(t) = t / (1 - e^{-t})`` as a series in the grading symbol ``t``."""
    table = VariableTable(1, (), grading="t")
    t = TruncatedSeries.grading_power(table, order + 1, 1)
    one = TruncatedSeries.one(table, order + 1)
    # (1 - e^{-t})/t, then exact series division
    shifted = {(k[0] - 1,): c for k, c in (one - (-t).exp()).terms.items()}
    den = TruncatedSeries(table, order, shifted)
    return den.reciprocal()


def psi_of_matrix(M, order: int, signature: Sequence[int] | None = None, *, coefficients=None):
    """``psi(M) = sum_k psi_k M^k`` with contracted powers; ``M^0 = eta``.

    Every entry of ``M`` must carry the grading symbol (degree >= 1).
    """
    table = M[0][0].table
    sig = tuple(signature) if signature is not None else table.signature
    for row in M:
        for e in row:
            if e.grading_part(0).terms:
                raise DomainError("psi needs a graded matrix (multiply C(p) by l)")
    coeffs = coefficients if coefficients is not None else bernoulli_psi_coefficients(order)
    result = metric_matrix(table, order)
    power = result
    for k in range(1, order + 1):
        power = matmul(power, M, sig)
        if all(not e.terms for row in power for e in row):
            break
        if coeffs[k]:
            result = matadd(result, [[e.scale(coeffs[k]) for e in row] for row in power])
    return result

