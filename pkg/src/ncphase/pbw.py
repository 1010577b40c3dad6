"""Enveloping algebra of a Lie-type coordinate algebra in a PBW basis.

Words are nondecreasing tuples of generator indices.  Any product is brought
to that form by the rewrite ``xh_b xh_a -> xh_a xh_b + i l C_{b a c} eta_c xh_c``
(``b > a``), which terminates because each step either lowers the word length
or the inversion count.  Coefficients are series in the grading symbol and in
any parameter vectors, so the algebra serves as an independent check on the
differential-equation and realization based computations.
"""

from __future__ import annotations

from functools import lru_cache

from .exact import I, Q
from .lie import StructureConstants
from .series import TruncatedSeries, VariableTable

__all__ = ["PBWAlgebra"]


class PBWAlgebra:
    """Truncated enveloping algebra; elements are ``{word: TruncatedSeries}``.

    Terms with ``len(word) + deg_l > cutoff`` are dropped.  Since rewriting
    trades one letter for one power of ``l`` and multiplication adds both, this
    filtration is respected by every operation.
    """

    def __init__(self, C: StructureConstants, table: VariableTable, order: int, cutoff: int | None = None):
        if C.is_symbolic:
            raise ValueError("the PBW oracle needs numeric structure constants")
        self.C = C
        self.n = C.n
        self.table = table
        self.order = order
        self.cutoff = order + 1 if cutoff is None else cutoff
        self._nf = lru_cache(maxsize=None)(self._normal_form)

    # normal forms of words, as {word: {l_degree: ExactComplex}}
    def _normal_form(self, word: tuple[int, ...]):
        for i in range(len(word) - 1):
            b, a = word[i], word[i + 1]
            if b > a:
                break
        else:
            return {word: {0: Q(1)}}
        out: dict = {}

        def add(res, shift, factor):
            for w, coeffs in res.items():
                budget = self.cutoff - len(w)
                slot = out.setdefault(w, {})
                for d, c in coeffs.items():
                    dd = d + shift
                    if dd > budget or dd > self.order:
                        continue
                    v = slot.get(dd)
                    slot[dd] = c * factor if v is None else v + c * factor
        swapped = word[:i] + (a, b) + word[i + 2:]
        add(self._nf(swapped), 0, Q(1))
        sig = self.C.signature
        for c in range(self.n):
            coef = self.C[b, a, c]
            if coef:
                shorter = word[:i] + (c,) + word[i + 2:]
                add(self._nf(shorter), 1, I * (coef * sig[c]))
        return {w: {d: c for d, c in cs.items() if c} for w, cs in out.items() if any(cs.values())}

    # element arithmetic
    def _prune(self, elem):
        out = {}
        for w, s in elem.items():
            budget = min(self.cutoff - len(w), self.order)
            if budget < 0:
                continue
            s = s.truncate(budget) if budget < s.order else s
            if s.terms:
                out[w] = s
        return out

    def generator_combination(self, coeffs):
        """``sum_a eta_a coeffs[a] xh_a``, i.e. the contraction ``v.xh``."""
        sig = self.table.signature
        elem = {}
        for a, c in enumerate(coeffs):
            if c.terms:
                elem[(a,)] = c if sig[a] > 0 else -c
        return self._prune(elem)

    def add(self, x, y):
        out = dict(x)
        for w, s in y.items():
            out[w] = out[w] + s if w in out else s
        return {w: s for w, s in out.items() if s.terms}

    def scale(self, x, c):
        return {w: s.scale(c) for w, s in x.items()}

    def mul(self, x, y):
        out: dict = {}
        one_l = {}
        for w1, s1 in x.items():
            for w2, s2 in y.items():
                if len(w1) + len(w2) > self.cutoff:
                    continue
                prod = s1 * s2
                if not prod.terms:
                    continue
                for w, coeffs in self._nf(w1 + w2).items():
                    for d, c in coeffs.items():
                        lp = one_l.get(d)
                        if lp is None:
                            lp = one_l[d] = TruncatedSeries.grading_power(self.table, self.order, d)
                        t = (prod * lp).scale(c) if d else prod.scale(c)
                        out[w] = out[w] + t if w in out else t
        return self._prune({w: s for w, s in out.items() if s.terms})

    def exp(self, x):
        one = {(): TruncatedSeries.one(self.table, self.order)}
        total, term = one, one
        for j in range(1, self.cutoff + 1):
            term = self.scale(self.mul(term, x), Q(1, j))
            if not term:
                break
            total = self.add(total, term)
        return total

    def log(self, x):
        """Logarithm of ``1 + y`` where ``y`` has no empty-word part."""
        y = {w: s for w, s in x.items() if w}
        const = x.get(())
        if const is not None:
            rest = const - TruncatedSeries.one(self.table, self.order)
            if rest.terms:
                y[()] = rest
        total: dict = {}
        power = y
        for j in range(1, self.cutoff + 2):
            if not power:
                break
            total = self.add(total, self.scale(power, Q((-1) ** (j + 1), j)))
            power = self.mul(power, y)
        return total
