"""Exponential-polynomials ``p(x, lam) * exp(alpha(lam) * x)`` truncated in lam.

``poly[k]`` is the univariate polynomial in ``x`` multiplying ``lam^k`` and
``alpha[k]`` the ``lam^k`` coefficient of the exponent.  Two values with
different exponent series can be equal (``exp(lam*x) = 1 + lam*x + ...``), so
comparison goes through :meth:`ExpPoly.normalized`, which folds every
``alpha[k]`` with ``k >= 1`` into the polynomial part.
"""
from __future__ import annotations

from math import factorial
from typing import Mapping, Sequence

from .coeff import Flavor, FlavorError
from .scalar import ONE, ZERO, Scalar

UPoly = dict  # power -> Scalar


def _uadd(a: UPoly, b: UPoly) -> UPoly:
    out = dict(a)
    for k, c in b.items():
        v = out.get(k, ZERO) + c
        if v.is_zero():
            out.pop(k, None)
        else:
            out[k] = v
    return out


def _uscale(a: UPoly, c: Scalar) -> UPoly:
    if c.is_zero():
        return {}
    return {k: v * c for k, v in a.items()}


def _umul(a: UPoly, b: UPoly) -> UPoly:
    out: UPoly = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, ZERO) + x * y
    return {k: v for k, v in out.items() if not v.is_zero()}


def _uderive(a: UPoly) -> UPoly:
    return {k - 1: v * k for k, v in a.items() if k > 0}


def _clean(a: Mapping) -> UPoly:
    out = {}
    for k, v in a.items():
        if k < 0:
            raise FlavorError("negative power of the radial variable")
        v = Scalar.coerce(v)
        if not v.is_zero():
            out[int(k)] = v
    return out


def lam_series_mul(a: Sequence[UPoly], b: Sequence[UPoly]) -> list[UPoly]:
    n = len(a) - 1
    out = []
    for k in range(n + 1):
        acc: UPoly = {}
        for i in range(k + 1):
            if a[i] and b[k - i]:
                acc = _uadd(acc, _umul(a[i], b[k - i]))
        out.append(acc)
    return out


class ExpPoly:
    __slots__ = ("var", "poly", "alpha")

    def __init__(self, poly: Sequence[Mapping[int, object]], alpha: Sequence[object],
                 var: str = "x"):
        if len(poly) != len(alpha):
            raise ValueError("polynomial part and exponent must share the lam-order")
        self.var = var
        self.poly = tuple(_clean(p) for p in poly)
        self.alpha = tuple(Scalar.coerce(a) for a in alpha)

    @classmethod
    def exponential(cls, alpha, order: int, var: str = "x") -> "ExpPoly":
        """``e_alpha`` with a scalar or lam-series exponent."""
        if isinstance(alpha, (list, tuple)):
            al = list(alpha) + [ZERO] * (order + 1 - len(alpha))
        elif hasattr(alpha, "coeffs"):
            al = list(alpha.coeffs) + [ZERO] * (order + 1 - len(alpha.coeffs))
        else:
            al = [alpha] + [ZERO] * order
        return cls([{0: ONE}] + [{}] * order, al[: order + 1], var)

    @classmethod
    def polynomial(cls, coeffs: Mapping[int, object], order: int, var: str = "x") -> "ExpPoly":
        return cls([coeffs] + [{}] * order, [ZERO] * (order + 1), var)

    @property
    def flavor(self) -> Flavor:
        return Flavor.EXPPOLY

    @property
    def order(self) -> int:
        return len(self.poly) - 1

    def _same(self, other: "ExpPoly"):
        if not isinstance(other, ExpPoly):
            raise FlavorError("flavor mismatch: EXPPOLY with another flavor")
        if other.var != self.var:
            raise FlavorError(f"radial variables differ: {self.var} vs {other.var}")
        if other.order != self.order:
            raise ValueError(f"lam-orders differ: {self.order} vs {other.order}")

    def is_zero(self) -> bool:
        return not any(self.poly)

    def __mul__(self, other):
        if isinstance(other, (int, Scalar)):
            return self.scale(other)
        self._same(other)
        return ExpPoly(lam_series_mul(self.poly, other.poly),
                       [a + b for a, b in zip(self.alpha, other.alpha)], self.var)

    __rmul__ = __mul__

    def scale(self, c) -> "ExpPoly":
        c = Scalar.coerce(c)
        return ExpPoly([_uscale(p, c) for p in self.poly], self.alpha, self.var)

    def lam_shift(self, k: int) -> "ExpPoly":
        """Multiply by lam^k."""
        n = self.order
        return ExpPoly(([{}] * k + list(self.poly))[: n + 1], self.alpha, self.var)

    def derive(self, v: str | None = None) -> "ExpPoly":
        if v is not None and v != self.var:
            raise FlavorError(f"unknown variable {v!r}")
        alpha_polys = [({0: a} if not a.is_zero() else {}) for a in self.alpha]
        ap = lam_series_mul(alpha_polys, self.poly)
        return ExpPoly([_uadd(_uderive(p), q) for p, q in zip(self.poly, ap)],
                       self.alpha, self.var)

    def derive_n(self, r: int) -> "ExpPoly":
        out = self
        for _ in range(r):
            out = out.derive()
        return out

    def normalized(self) -> "ExpPoly":
        """Equivalent value whose exponent is the constant ``alpha[0]``."""
        n = self.order
        if all(a.is_zero() for a in self.alpha[1:]):
            return self
        # A = x * sum_{k>=1} alpha_k lam^k ; exp(A) = sum_m A^m / m!
        a_ser = [{}] + [({1: a} if not a.is_zero() else {}) for a in self.alpha[1:]]
        term = [{0: ONE}] + [{}] * n
        total = [dict(t) for t in term]
        for m in range(1, n + 1):
            term = lam_series_mul(term, a_ser)
            inv = Scalar(1) / factorial(m)
            total = [_uadd(t, _uscale(s, inv)) for t, s in zip(total, term)]
        poly = lam_series_mul(list(self.poly), total)
        return ExpPoly(poly, [self.alpha[0]] + [ZERO] * n, self.var)

    def __add__(self, other):
        self._same(other)
        a, b = self.normalized(), other.normalized()
        if a.alpha[0] != b.alpha[0]:
            raise FlavorError("sum of different exponentials: use a RadialFn")
        return ExpPoly([_uadd(p, q) for p, q in zip(a.poly, b.poly)], a.alpha, self.var)

    def __neg__(self):
        return self.scale(-ONE)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, ExpPoly):
            return NotImplemented
        if self.var != other.var or self.order != other.order:
            return False
        a, b = self.normalized(), other.normalized()
        if a.is_zero() and b.is_zero():
            return True
        return a.alpha[0] == b.alpha[0] and a.poly == b.poly

    def __hash__(self):
        a = self.normalized()
        return hash((a.var, a.alpha[0], tuple(frozenset(p.items()) for p in a.poly)))

    def __repr__(self):
        from .text import format_exppoly
        return f"ExpPoly<{format_exppoly(self)}>"

    def __str__(self):
        from .text import format_exppoly
        return format_exppoly(self)
