"""Exact Gaussian-rational scalars.

Rationals are ``gmpy2.mpq`` values: exact, arbitrary precision and always
stored in lowest terms, so equality of two :class:`ExactComplex` values is a
plain comparison of their parts.
"""

from __future__ import annotations

from numbers import Rational

from gmpy2 import mpq

__all__ = ["ExactComplex", "Q", "ZERO", "ONE", "I", "as_rational", "format_rational"]

Q = mpq


def as_rational(value) -> mpq:
    """Convert ints, Fractions, mpq or ``"a/b"`` strings to ``mpq``."""
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, den = text.split("/")
            return mpq(int(num), int(den))
        return mpq(int(text))
    if isinstance(value, float):
        raise TypeError("floating-point input is not allowed; pass 'a/b' strings")
    if isinstance(value, (int, Rational)) or type(value) is type(mpq(0)):
        return mpq(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_rational(r: mpq) -> str:
    if r.denominator == 1:
        return str(r.numerator)
    return f"{r.numerator}/{r.denominator}"


class ExactComplex:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is _MPQ else as_rational(re)
        self.im = im if type(im) is _MPQ else as_rational(im)

    @classmethod
    def _make(cls, re, im):
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    @classmethod
    def coerce(cls, value) -> "ExactComplex":
        if isinstance(value, ExactComplex):
            return value
        if isinstance(value, complex):
            raise TypeError("floating-point complex input is not allowed")
        return cls._make(as_rational(value), _ZQ)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return not self.im

    def __eq__(self, other):
        if isinstance(other, ExactComplex):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Rational)) or type(other) is _MPQ:
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __neg__(self):
        return ExactComplex._make(-self.re, -self.im)

    def __add__(self, other):
        if not isinstance(other, ExactComplex):
            other = ExactComplex.coerce(other)
        return ExactComplex._make(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, ExactComplex):
            other = ExactComplex.coerce(other)
        return ExactComplex._make(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return ExactComplex.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, ExactComplex):
            a, b, c, d = self.re, self.im, other.re, other.im
            if not b:
                return ExactComplex._make(a * c, a * d)
            if not d:
                return ExactComplex._make(a * c, b * c)
            return ExactComplex._make(a * c - b * d, a * d + b * c)
        r = other if type(other) is _MPQ else as_rational(other)
        return ExactComplex._make(self.re * r, self.im * r)

    __rmul__ = __mul__

    def conjugate(self) -> "ExactComplex":
        return ExactComplex._make(self.re, -self.im)

    def inverse(self) -> "ExactComplex":
        norm = self.re * self.re + self.im * self.im
        if not norm:
            raise ZeroDivisionError("ExactComplex division by zero")
        return ExactComplex._make(self.re / norm, -self.im / norm)

    def __truediv__(self, other):
        if isinstance(other, ExactComplex):
            return self * other.inverse()
        r = other if type(other) is _MPQ else as_rational(other)
        return ExactComplex._make(self.re / r, self.im / r)

    def __rtruediv__(self, other):
        return ExactComplex.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __str__(self):
        if not self.im:
            return format_rational(self.re)
        if not self.re:
            if abs(self.im) == 1:
                return "i" if self.im > 0 else "-i"
            return f"{format_rational(self.im)}*i"
        im = "i" if abs(self.im) == 1 else f"{format_rational(abs(self.im))}*i"
        return f"({format_rational(self.re)} {'+' if self.im > 0 else '-'} {im})"

    def __repr__(self):
        return f"ExactComplex({format_rational(self.re)!r}, {format_rational(self.im)!r})"


_MPQ = type(mpq(0))
_ZQ = mpq(0)
ZERO = ExactComplex._make(mpq(0), mpq(0))
ONE = ExactComplex._make(mpq(1), mpq(0))
I = ExactComplex._make(mpq(0), mpq(1))
