"""Radial calculus for CP(n): the product on radial functions and the
equivalences ``S_D`` given by their symbols on exponentials.

A radial function is a finite sum of ``p_alpha(x, lam) e^{alpha x}`` with
distinct constant exponents ``alpha``, truncated in ``lam``.  ``S_D`` is
applied through its symbol: since ``x^k e^{alpha x} = d_alpha^k e^{alpha x}``,
``S(p(x) e^{a x}) = p(d_alpha) e^{x f(alpha)}`` at ``alpha = a``, which is
evaluated with ``eps = alpha - a`` as a nilpotent parameter.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Callable, Mapping, Sequence

from ..algebra.exppoly import ExpPoly, lam_series_mul
from ..algebra.scalar import ONE, ZERO, Scalar
from ..algebra.series import NuSeries, scalar_series, scalar_series_inverse
from ..report import Report

MAX_LAMBDA_ORDER = 12


class CapacityError(ValueError):
    pass


def _check_order(order: int) -> None:
    if order > MAX_LAMBDA_ORDER:
        raise CapacityError(f"lam-order {order} exceeds the supported bound {MAX_LAMBDA_ORDER}")
    if order < 0:
        raise ValueError("lam-order must be non-negative")


class RadialFn:
    """``{alpha: ExpPoly}`` with each payload normalized to the constant exponent alpha."""

    __slots__ = ("order", "parts")

    def __init__(self, order: int, parts: Mapping[Scalar, ExpPoly] | None = None):
        _check_order(order)
        self.order = order
        clean = {}
        for a, e in (parts or {}).items():
            if e.order != order:
                raise ValueError("payload lam-order differs from the function's")
            e = e.normalized()
            if e.is_zero():
                continue
            a = e.alpha[0]
            clean[a] = clean[a] + e if a in clean else e
        self.parts = {a: e for a, e in clean.items() if not e.is_zero()}

    @classmethod
    def exp(cls, alpha, order: int) -> "RadialFn":
        """``e_alpha``; alpha may be a Scalar or a lam-series."""
        e = ExpPoly.exponential(alpha, order)
        return cls(order, {e.alpha[0]: e})

    @classmethod
    def poly(cls, coeffs: Mapping[int, object], order: int) -> "RadialFn":
        return cls(order, {ZERO: ExpPoly.polynomial(coeffs, order)})

    @classmethod
    def from_exppoly(cls, e: ExpPoly) -> "RadialFn":
        return cls(e.order, {e.alpha[0]: e})

    def __add__(self, other: "RadialFn") -> "RadialFn":
        self._same(other)
        parts = dict(self.parts)
        for a, e in other.parts.items():
            parts[a] = parts[a] + e if a in parts else e
        return RadialFn(self.order, parts)

    def __neg__(self):
        return RadialFn(self.order, {a: -e for a, e in self.parts.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "RadialFn") -> "RadialFn":
        """Pointwise product."""
        self._same(other)
        out = RadialFn(self.order)
        for e1 in self.parts.values():
            for e2 in other.parts.values():
                out = out + RadialFn.from_exppoly(e1 * e2)
        return out

    def scale(self, c) -> "RadialFn":
        return RadialFn(self.order, {a: e.scale(c) for a, e in self.parts.items()})

    def derive_n(self, r: int) -> "RadialFn":
        return RadialFn(self.order, {a: e.derive_n(r) for a, e in self.parts.items()})

    def x_power_lam_power(self, r: int) -> "RadialFn":
        """Multiply by ``lam^r x^r``."""
        out = {}
        for a, e in self.parts.items():
            poly = [{k + r: c for k, c in p.items()} for p in e.poly]
            out[a] = ExpPoly(poly, e.alpha, e.var).lam_shift(r)
        return RadialFn(self.order, out)

    def is_zero(self) -> bool:
        return not self.parts

    def _same(self, other):
        if not isinstance(other, RadialFn):
            raise TypeError("radial functions combine only with radial functions")
        if other.order != self.order:
            raise ValueError(f"lam-orders differ: {self.order} vs {other.order}")

    def __eq__(self, other):
        return isinstance(other, RadialFn) and self.order == other.order and \
            self.parts == other.parts

    def __hash__(self):
        return hash((self.order, frozenset(self.parts.items())))

    def to_text(self) -> str:
        if not self.parts:
            return "0"
        keys = sorted(self.parts, key=lambda s: (s.real, s.imag))
        return " + ".join(str(self.parts[a]) for a in keys)

    def __repr__(self):
        return f"RadialFn({self.to_text()})"


def cpn_radial_star(f1: RadialFn, f2: RadialFn) -> RadialFn:
    """``sum_r lam^r x^r / r! * f1^(r) f2^(r)`` truncated at the shared lam-order."""
    f1._same(f2)
    out = RadialFn(f1.order)
    d1, d2 = f1, f2
    for r in range(f1.order + 1):
        term = (d1 * d2).x_power_lam_power(r).scale(Scalar(1) / factorial(r))
        out = out + term
        d1, d2 = d1.derive_n(1), d2.derive_n(1)
    return out


# -- symbols ---------------------------------------------------------------------
# A symbol is f(alpha) as a lam-series whose coefficients are polynomials in
# eps = alpha - a: a list indexed by lam-power of {eps-power: Scalar}.

Symbol = Callable[[Scalar, int, int], list]


def _eps_pow(a: Scalar, m: int, K: int) -> dict:
    """``(a + eps)^m`` truncated at eps^K."""
    out = {}
    for j in range(min(m, K) + 1):
        c = Scalar(factorial(m) // (factorial(j) * factorial(m - j))) * (a ** (m - j))
        if not c.is_zero():
            out[j] = c
    return out


def _poly_add(a: dict, b: dict, c: Scalar = ONE) -> dict:
    out = dict(a)
    for k, v in b.items():
        w = out.get(k, ZERO) + v * c
        if w.is_zero():
            out.pop(k, None)
        else:
            out[k] = w
    return out


def _series_times_poly(D: Sequence[Scalar], p: dict, n: int, shift: int = 0) -> list:
    """``lam^shift * D(lam) * p(eps)`` as a lam-list up to order n."""
    out = [dict() for _ in range(n + 1)]
    for k, d in enumerate(D):
        if k + shift > n or d.is_zero():
            continue
        out[k + shift] = _poly_add(out[k + shift], p, d)
    return out


def _as_coeffs(D, n: int) -> list:
    if isinstance(D, NuSeries):
        vals = list(D.coeffs)
    elif isinstance(D, (list, tuple)):
        vals = [Scalar.coerce(x) for x in D]
    else:
        vals = [Scalar.coerce(D)]
    vals = vals[: n + 1] + [ZERO] * (n + 1 - len(vals))
    if vals[0] != ONE:
        raise ValueError("D must start with 1")
    return vals


def symbol_SD(D) -> Symbol:
    """``f(alpha) = D ln(1 + lam alpha) / lam``."""
    def f(a: Scalar, K: int, n: int) -> list:
        Dc = _as_coeffs(D, n)
        out = [dict() for _ in range(n + 1)]
        for m in range(1, n + 2):
            c = Scalar(1 if m % 2 else -1) / m
            part = _series_times_poly(Dc, _eps_pow(a, m, K), n, m - 1)
            out = [_poly_add(o, q, c) for o, q in zip(out, part)]
        return out
    return f


def symbol_SD_inverse(D) -> Symbol:
    """``f(alpha) = (exp(lam alpha / D) - 1) / lam``."""
    def f(a: Scalar, K: int, n: int) -> list:
        Dc = _as_coeffs(D, n)
        Dinv = list(scalar_series_inverse(scalar_series(Dc, n)).coeffs)
        power = [ONE] + [ZERO] * n   # D^{-m}
        out = [dict() for _ in range(n + 1)]
        for m in range(1, n + 2):
            power = [sum((power[i] * Dinv[k - i] for i in range(k + 1)), ZERO)
                     for k in range(n + 1)]
            c = Scalar(1) / factorial(m)
            part = _series_times_poly(power, _eps_pow(a, m, K), n, m - 1)
            out = [_poly_add(o, q, c) for o, q in zip(out, part)]
        return out
    return f


def symbol_scale(D_ratio) -> Symbol:
    """``f(alpha) = c(lam) alpha``, e.g. the ratio ``D'/D``."""
    def f(a: Scalar, K: int, n: int) -> list:
        c = [Scalar.coerce(v) for v in list(D_ratio)[: n + 1]]
        c = c + [ZERO] * (n + 1 - len(c))
        return _series_times_poly(c, _eps_pow(a, 1, K), n)
    return f


def apply_symbol(phi: RadialFn, f: Symbol) -> RadialFn:
    """The operator with symbol ``e_alpha -> e_{f(alpha)}`` applied to phi."""
    n = phi.order
    out = RadialFn(n)
    for a, e in phi.parts.items():
        K = max((max(p) for p in e.poly if p), default=0)
        fser = f(a, K, n)
        a0 = fser[0].get(0, ZERO)
        # g = f - a0: every term carries eps or lam, so exp(x g) is a finite sum
        g = [dict(p) for p in fser]
        g[0] = {k: v for k, v in g[0].items() if k != 0}
        # series in (lam-list) of {(eps, xpow): Scalar}
        xg = [{(k, 1): v for k, v in p.items()} for p in g]
        total = [dict() for _ in range(n + 1)]
        total[0] = {(0, 0): ONE}
        term = [dict(t) for t in total]
        for m in range(1, n + K + 2):
            term = _bimul(term, xg, n, K)
            if not any(term):
                break
            inv = Scalar(1) / factorial(m)
            total = [_poly_add(t, s, inv) for t, s in zip(total, term)]
        # p(d_alpha): x^j at lam^k contributes j! [eps^j] of total, shifted by lam^k
        poly = [dict() for _ in range(n + 1)]
        for k, pk in enumerate(e.poly):
            for j, c in pk.items():
                w = c * factorial(j)
                for l in range(n + 1 - k):
                    for (ep, xp), v in total[l].items():
                        if ep == j:
                            poly[k + l] = _poly_add(poly[k + l], {xp: v}, w)
        out = out + RadialFn.from_exppoly(ExpPoly(poly, [a0] + [ZERO] * n))
    return out


def _bimul(a: list, b: list, n: int, K: int) -> list:
    out = [dict() for _ in range(n + 1)]
    for i, p in enumerate(a):
        if not p:
            continue
        for j, q in enumerate(b):
            if i + j > n or not q:
                continue
            acc = out[i + j]
            for (e1, x1), v1 in p.items():
                for (e2, x2), v2 in q.items():
                    if e1 + e2 > K:
                        continue
                    key = (e1 + e2, x1 + x2)
                    w = acc.get(key, ZERO) + v1 * v2
                    if w.is_zero():
                        acc.pop(key, None)
                    else:
                        acc[key] = w
    return out


def cpn_SD(phi: RadialFn, D) -> RadialFn:
    return apply_symbol(phi, symbol_SD(D))


def cpn_SD_inverse(phi: RadialFn, D) -> RadialFn:
    return apply_symbol(phi, symbol_SD_inverse(D))


def _text_D(D) -> str:
    vals = D.coeffs if isinstance(D, NuSeries) else (D if isinstance(D, (list, tuple)) else [D])
    return " + ".join(f"({Scalar.coerce(v)}) lam^{k}" for k, v in enumerate(vals)
                      if not Scalar.coerce(v).is_zero())


def cpn_check_homomorphism(D, alpha, beta, order: int) -> Report:
    """``S_D(e_a * e_b) = S_D(e_a) S_D(e_b)`` and ``S_D S_D^{-1} e_a = e_a``."""
    _check_order(order)
    alpha, beta = Scalar.coerce(alpha), Scalar.coerce(beta)
    rep = Report("cpn-homomorphism", scope={"D": _text_D(D), "alpha": str(alpha),
                                            "beta": str(beta), "order": order})
    ea, eb = RadialFn.exp(alpha, order), RadialFn.exp(beta, order)
    lhs = cpn_SD(cpn_radial_star(ea, eb), D)
    rhs = cpn_SD(ea, D) * cpn_SD(eb, D)
    diff = lhs - rhs
    rep.add("S_D(e_a * e_b) = S_D(e_a) S_D(e_b)", diff.is_zero(),
            witness=None if diff.is_zero() else {"difference": diff.to_text()})
    for name, x in (("a", ea), ("b", eb)):
        back = cpn_SD(cpn_SD_inverse(x, D), D)
        fwd = cpn_SD_inverse(cpn_SD(x, D), D)
        ok = back == x and fwd == x
        rep.add(f"S_D S_D^-1 e_{name} = e_{name} = S_D^-1 S_D e_{name}", ok,
                witness=None if ok else {"got": back.to_text()})
    return rep


def cpn_change_of_D(D, D2, alpha, order: int) -> Report:
    """``S_{D'} S_D^{-1} e_alpha = e_{(D'/D) alpha}``."""
    _check_order(order)
    alpha = Scalar.coerce(alpha)
    Dc, D2c = _as_coeffs(D, order), _as_coeffs(D2, order)
    ratio = series_ratio(D2c, Dc, order)
    got = cpn_SD(cpn_SD_inverse(RadialFn.exp(alpha, order), D), D2)
    want = RadialFn.exp([r * alpha for r in ratio], order)
    rep = Report("cpn-change-of-D", scope={"D": _text_D(Dc), "D'": _text_D(D2c),
                                           "alpha": str(alpha), "order": order})
    rep.add("S_D' S_D^-1 e_alpha = e_{(D'/D) alpha}", got == want,
            witness=None if got == want else {"got": got.to_text(), "want": want.to_text()})
    return rep


def series_ratio(num: Sequence[Scalar], den: Sequence[Scalar], order: int) -> list:
    inv = scalar_series_inverse(scalar_series(list(den), order)).coeffs
    return [sum((num[i] * inv[k - i] for i in range(k + 1)), ZERO) for k in range(order + 1)]


@dataclass
class CpnCase:
    D: tuple
    alpha: Scalar
    beta: Scalar


def cpn_report(order: int = 6) -> Report:
    """Homomorphism and inverse checks for ``D in {1, 1 + lam}``, ``alpha, beta in {1, 2}``,
    plus the change-of-D identity for ``D = 1 -> D' = 1 + lam``."""
    rep = Report("cpn", scope={"order": order})
    for D in ((ONE,), (ONE, ONE)):
        for a in (1, 2):
            for b in (1, 2):
                sub = cpn_check_homomorphism(list(D), a, b, order)
                for res in sub.results:
                    rep.add(f"D={_text_D(list(D))} a={a} b={b}: {res.check}", res.ok,
                            witness=res.witness)
    for a in (1, 2):
        sub = cpn_change_of_D([ONE], [ONE, ONE], a, order)
        for res in sub.results:
            rep.add(f"a={a}: {res.check}", res.ok, witness=res.witness)
    return rep
