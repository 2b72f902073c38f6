"""Formal power series in the deformation parameter, truncated at order N."""
from __future__ import annotations

from typing import Callable, Generic, Sequence, TypeVar

from .scalar import ZERO, Scalar

T = TypeVar("T")


class OrderMismatch(ValueError):
    pass


class NuSeries(Generic[T]):
    """``c_0 + c_1 nu + ... + c_N nu^N`` with ``N`` inclusive.

    The payload type only needs ``+``, ``-`` (unary) and ``*``; payload zeros
    are passed in explicitly so the series never guesses a type.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[T]):
        if len(coeffs) == 0:
            raise ValueError("a series needs at least the order-0 coefficient")
        self.coeffs = tuple(coeffs)

    @classmethod
    def constant(cls, c: T, zero: T, order: int) -> "NuSeries[T]":
        return cls([c] + [zero] * order)

    @classmethod
    def zeros(cls, zero: T, order: int) -> "NuSeries[T]":
        return cls([zero] * (order + 1))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, r: int) -> T:
        return self.coeffs[r]

    def __iter__(self):
        return iter(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def _same(self, other: "NuSeries") -> None:
        if not isinstance(other, NuSeries):
            raise TypeError(f"expected NuSeries, got {type(other).__name__}")
        if other.order != self.order:
            raise OrderMismatch(f"truncation orders differ: {self.order} vs {other.order}")

    def __add__(self, other):
        self._same(other)
        return NuSeries([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        self._same(other)
        return NuSeries([a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return NuSeries([-a for a in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, NuSeries):
            return NuSeries([a * other for a in self.coeffs])
        return series_mul_truncate(self, other)

    def __rmul__(self, other):
        return NuSeries([other * a for a in self.coeffs])

    def __eq__(self, other):
        if not isinstance(other, NuSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def map(self, fn: Callable[[T], object]) -> "NuSeries":
        return NuSeries([fn(c) for c in self.coeffs])

    def truncate(self, order: int, zero=None) -> "NuSeries[T]":
        if order <= self.order:
            return NuSeries(self.coeffs[: order + 1])
        if zero is None:
            raise ValueError("extending a series needs a payload zero")
        return NuSeries(self.coeffs + (zero,) * (order - self.order))

    def shift(self, k: int, zero: T) -> "NuSeries[T]":
        """Multiply by nu^k, dropping what falls beyond N."""
        n = self.order
        return NuSeries(([zero] * k + list(self.coeffs))[: n + 1])

    def is_zero(self) -> bool:
        return all(_is_zero(c) for c in self.coeffs)

    def first_nonzero(self) -> int | None:
        for r, c in enumerate(self.coeffs):
            if not _is_zero(c):
                return r
        return None

    def __repr__(self):
        return f"NuSeries({list(self.coeffs)!r})"

    def __str__(self):
        from .text import format_series
        return format_series(self)


def _is_zero(c) -> bool:
    if hasattr(c, "is_zero"):
        return c.is_zero()
    return c == 0


def series_mul_truncate(a: NuSeries, b: NuSeries) -> NuSeries:
    """Cauchy product cut at the shared truncation order."""
    a._same(b)
    n = a.order
    out = []
    for k in range(n + 1):
        acc = a.coeffs[0] * b.coeffs[k]
        for i in range(1, k + 1):
            acc = acc + a.coeffs[i] * b.coeffs[k - i]
        out.append(acc)
    return NuSeries(out)


def scalar_series(values: Sequence, order: int | None = None) -> NuSeries[Scalar]:
    vals = [Scalar.coerce(v) for v in values]
    if order is not None:
        vals = (vals + [ZERO] * (order + 1))[: order + 1]
    return NuSeries(vals)


def scalar_series_inverse(a: NuSeries[Scalar]) -> NuSeries[Scalar]:
    """Multiplicative inverse of a series with invertible constant term."""
    if a[0].is_zero():
        raise ZeroDivisionError("series with zero constant term is not invertible")
    inv0 = a[0].inverse()
    out = [inv0]
    for k in range(1, a.order + 1):
        acc = ZERO
        for i in range(1, k + 1):
            acc = acc + a[i] * out[k - i]
        out.append(-acc * inv0)
    return NuSeries(out)
