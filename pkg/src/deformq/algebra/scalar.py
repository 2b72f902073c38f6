"""Exact Gaussian rationals.

A value is stored as ``(re + im*i) / den`` with integers and ``den > 0``,
reduced so that ``gcd(re, im, den) == 1``.  That form is unique, which makes
equality and hashing structural.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd


class Scalar:
    __slots__ = ("re_num", "im_num", "den")

    def __init__(self, re=0, im=0):
        re = Fraction(re)
        im = Fraction(im)
        den = re.denominator * im.denominator // gcd(re.denominator, im.denominator)
        self._set(re.numerator * (den // re.denominator),
                  im.numerator * (den // im.denominator), den)

    def _set(self, a, b, d):
        g = gcd(gcd(a, b), d)
        if g != 1:
            a //= g
            b //= g
            d //= g
        self.re_num = a
        self.im_num = b
        self.den = d

    @classmethod
    def _raw(cls, a, b, d):
        if d < 0:
            a, b, d = -a, -b, -d
        s = object.__new__(cls)
        s._set(a, b, d)
        return s

    @classmethod
    def coerce(cls, x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, int):
            return cls._raw(x, 0, 1)
        if isinstance(x, complex):
            raise TypeError("floating complex values are not exact")
        if isinstance(x, float):
            raise TypeError("floats are not exact; use Fraction or str")
        return cls(x)

    # -- views -------------------------------------------------------------
    @property
    def real(self) -> Fraction:
        return Fraction(self.re_num, self.den)

    @property
    def imag(self) -> Fraction:
        return Fraction(self.im_num, self.den)

    def is_zero(self) -> bool:
        return self.re_num == 0 and self.im_num == 0

    def is_real(self) -> bool:
        return self.im_num == 0

    def __bool__(self):
        return not self.is_zero()

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        if self.den == o.den:
            return Scalar._raw(self.re_num + o.re_num, self.im_num + o.im_num, self.den)
        return Scalar._raw(self.re_num * o.den + o.re_num * self.den,
                           self.im_num * o.den + o.im_num * self.den,
                           self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        s = object.__new__(Scalar)
        s.re_num, s.im_num, s.den = -self.re_num, -self.im_num, self.den
        return s

    def __sub__(self, other):
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return Scalar.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            return Scalar._raw(self.re_num * other, self.im_num * other, self.den)
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        a, b, c, d = self.re_num, self.im_num, o.re_num, o.im_num
        if b == 0 and d == 0:
            return Scalar._raw(a * c, 0, self.den * o.den)
        return Scalar._raw(a * c - b * d, a * d + b * c, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero scalar")
        a, b = self.re_num, self.im_num
        n = a * a + b * b
        # 1/((a+bi)/d) = d(a-bi)/(a^2+b^2)
        return Scalar._raw(self.den * a, -self.den * b, n)

    def __truediv__(self, other):
        return self * Scalar.coerce(other).inverse()

    def __rtruediv__(self, other):
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("integer exponents only")
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

    def conj(self) -> "Scalar":
        return Scalar._raw(self.re_num, -self.im_num, self.den)

    # -- comparison --------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Scalar):
            return (self.re_num == other.re_num and self.im_num == other.im_num
                    and self.den == other.den)
        try:
            return self == Scalar.coerce(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self.im_num == 0:
            return hash(Fraction(self.re_num, self.den))
        return hash((self.re_num, self.im_num, self.den))

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        return format_scalar(self)


def _frac_text(num: int, den: int) -> str:
    f = Fraction(num, den)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def format_scalar(s: Scalar) -> str:
    """Canonical text: ``a/b`` or ``a/b+c/di`` (the real part is always written)."""
    re = _frac_text(s.re_num, s.den)
    if s.im_num == 0:
        return re
    im = _frac_text(abs(s.im_num), s.den)
    sign = "-" if s.im_num < 0 else "+"
    return f"{re}{sign}{im}i"


def parse_scalar(text: str) -> Scalar:
    t = text.strip().replace(" ", "")
    if not t:
        raise ValueError("empty scalar")
    if not t.endswith("i"):
        return Scalar(Fraction(t))
    body = t[:-1]
    # split at the last sign that is not the leading one
    cut = max(body.rfind("+"), body.rfind("-"))
    if cut <= 0:
        im = body if body not in ("", "+", "-") else body + "1"
        return Scalar(0, Fraction(im))
    re, im = body[:cut], body[cut:]
    if im in ("+", "-"):
        im += "1"
    return Scalar(Fraction(re), Fraction(im))


ZERO = Scalar._raw(0, 0, 1)
ONE = Scalar._raw(1, 0, 1)
I = Scalar._raw(0, 1, 1)


def S(x) -> Scalar:
    """Short constructor accepting ints, Fractions, strings or Scalars."""
    if isinstance(x, str):
        return parse_scalar(x)
    return Scalar.coerce(x)
