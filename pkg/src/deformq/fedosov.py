"""Flat-base Fedosov construction on R^{2n} with a constant Poisson tensor.

Elements of the Weyl algebra with forms are finite sums of terms

    c * nu^k * x^xe * (d^K1 a)(d^K2 b)... * y^ye * dx^form

stored as ``{(jets, k, xe, ye, form): Scalar}``.  The ``jets`` tuple records
derivatives of symbolic arguments, so that ``tau(a) o tau(b)`` can be read
off directly as bidifferential operators.  ``Deg = 2k + |ye|``; every
operation truncates at the space's ``max_deg``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .algebra.coeff import CoeffFn, Universe, iter_monomials
from .algebra.scalar import ONE, ZERO, Scalar
from .report import Report
from .starprod.checks import poisson_matrix
from .starprod.ops import BiDiffOp, exp_symbol_series
from .starprod.star import Chart, StarProduct

Key = tuple  # (jets, k, xe, ye, form)


class NegativeNuPower(ArithmeticError):
    pass


def _wedge(f1: tuple, f2: tuple):
    """Sign and sorted index tuple of ``dx^f1 ^ dx^f2`` (None if zero)."""
    if not f1:
        return 1, f2
    if not f2:
        return 1, f1
    if set(f1) & set(f2):
        return 0, None
    seq = list(f1 + f2)
    sign = 1
    # insertion sort counting transpositions
    for i in range(1, len(seq)):
        j = i
        while j > 0 and seq[j - 1] > seq[j]:
            seq[j - 1], seq[j] = seq[j], seq[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(seq)


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


class WeylSpace:
    """Base chart, fiber variables ``y^i`` paired with base coordinates, and
    the fiberwise product symbol ``exp(nu P^{ij} d_{y^i} (x) d_{y^j})``."""

    def __init__(self, chart: Chart, max_deg: int):
        u = chart.universe
        if u.angles:
            raise ValueError("the Fedosov construction here needs a polynomial chart")
        self.chart = chart
        self.base = u
        self.n = u.n
        self.max_deg = max_deg
        self.P = poisson_matrix_of(chart)
        self.fiber = Universe(tuple("y_" + v for v in u.names))
        # multi-indices are dense tuples, so base keys carry over to the fiber
        fp = BiDiffOp(self.fiber, {(I, J): CoeffFn.const(self.fiber, c.const_term())
                                   for (I, J), c in chart.poisson.terms.items()})
        self.symbol = exp_symbol_series([BiDiffOp.zero(self.fiber), fp], max_deg // 2 + 1)
        self._contract: dict = {}
        self.zero_x = u.zero_exp()

    def contract(self, y1, y2):
        """``[(r, ye, c)]`` for the fiber product of two y-monomials."""
        key = (y1, y2)
        hit = self._contract.get(key)
        if hit is None:
            hit = []
            top = min(sum(y1), sum(y2))
            for r in range(min(top, len(self.symbol) - 1) + 1):
                for ye, c in self.symbol[r].apply_monomials(y1, y2).items():
                    hit.append((r, ye, c))
            self._contract[key] = hit
        return hit

    def element(self, terms=None) -> "WeylElement":
        return WeylElement(self, terms or {})

    def zero(self) -> "WeylElement":
        return WeylElement(self, {})

    def scalar(self, c=1, k: int = 0) -> "WeylElement":
        z = self.zero_x
        return WeylElement(self, {((), k, z, z, ()): Scalar.coerce(c)})

    def y(self, i: int, c=1, k: int = 0) -> "WeylElement":
        z = self.zero_x
        ye = tuple(1 if j == i else 0 for j in range(self.n))
        return WeylElement(self, {((), k, z, ye, ()): Scalar.coerce(c)})

    def dx(self, i: int) -> "WeylElement":
        z = self.zero_x
        return WeylElement(self, {((), 0, z, z, (i,)): ONE})

    def argument(self) -> "WeylElement":
        """The symbolic base function ``a`` (one jet slot, no derivative)."""
        z = self.zero_x
        return WeylElement(self, {((z,), 0, z, z, ()): ONE})

    def base_function(self, f: CoeffFn, k: int = 0) -> "WeylElement":
        z = self.zero_x
        return WeylElement(self, {((), k, e, z, ()): c for e, c in f.terms.items()})

    def two_form(self, comps: Mapping[tuple[int, int], CoeffFn], k: int) -> "WeylElement":
        """``nu^k * sum_{i<j} comps[i,j] dx^i ^ dx^j``."""
        z = self.zero_x
        out = {}
        for (i, j), f in comps.items():
            sign, form = _wedge((i,), (j,))
            if not sign:
                continue
            for e, c in f.terms.items():
                key = ((), k, e, z, form)
                v = c * sign
                out[key] = out[key] + v if key in out else v
        return WeylElement(self, out)


def poisson_matrix_of(chart: Chart):
    return poisson_matrix(StarProduct(chart, [BiDiffOp.zero(chart.universe)], "poisson"))


class WeylElement:
    __slots__ = ("space", "terms")

    def __init__(self, space: WeylSpace, terms: dict, *, clean: bool = True):
        self.space = space
        if clean:
            terms = {k: v for k, v in terms.items() if not v.is_zero()}
        self.terms = terms

    # -- structure -------------------------------------------------------------
    @staticmethod
    def deg(key) -> int:
        return 2 * key[1] + sum(key[3])

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, WeylElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def truncate(self, bound: int | None = None) -> "WeylElement":
        bound = self.space.max_deg if bound is None else bound
        return WeylElement(self.space, {k: v for k, v in self.terms.items()
                                        if self.deg(k) <= bound}, clean=False)

    def part(self, *, deg=None, form_degree=None, sym_degree=None) -> "WeylElement":
        out = {}
        for k, v in self.terms.items():
            if deg is not None and self.deg(k) != deg:
                continue
            if form_degree is not None and len(k[4]) != form_degree:
                continue
            if sym_degree is not None and sum(k[3]) != sym_degree:
                continue
            out[k] = v
        return WeylElement(self.space, out, clean=False)

    def min_deg(self) -> int | None:
        return min((self.deg(k) for k in self.terms), default=None)

    def min_nu(self) -> int | None:
        return min((k[1] for k in self.terms), default=None)

    # -- linear ------------------------------------------------------------------
    def __add__(self, other: "WeylElement") -> "WeylElement":
        out = dict(self.terms)
        for k, v in other.terms.items():
            w = out.get(k)
            out[k] = v if w is None else w + v
        return WeylElement(self.space, out)

    def __neg__(self):
        return WeylElement(self.space, {k: -v for k, v in self.terms.items()}, clean=False)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "WeylElement":
        c = Scalar.coerce(c)
        return WeylElement(self.space, {k: v * c for k, v in self.terms.items()})

    def nu_shift(self, d: int) -> "WeylElement":
        """Multiply by ``nu^d`` (d may be negative inside the Laurent workspace)."""
        return WeylElement(self.space, {(j, k + d, x, y, f): v
                                        for (j, k, x, y, f), v in self.terms.items()},
                           clean=False)

    # -- products ----------------------------------------------------------------
    def mul(self, other: "WeylElement", bound: int | None = None) -> "WeylElement":
        """Fiberwise deformed product, truncated at ``Deg <= bound``."""
        sp = self.space
        bound = sp.max_deg if bound is None else bound
        out: dict = {}
        by_deg2 = {}
        for k2, v2 in other.terms.items():
            by_deg2.setdefault(self.deg(k2), []).append((k2, v2))
        for k1, v1 in self.terms.items():
            d1 = self.deg(k1)
            j1, n1, x1, y1, f1 = k1
            for d2, items in by_deg2.items():
                if d1 + d2 > bound:
                    continue
                for (j2, n2, x2, y2, f2), v2 in items:
                    sign, form = _wedge(f1, f2)
                    if not sign:
                        continue
                    jets = j1 + j2
                    xe = _add(x1, x2)
                    base = v1 * v2 if sign > 0 else -(v1 * v2)
                    for r, ye, c in sp.contract(y1, y2):
                        key = (jets, n1 + n2 + r, xe, ye, form)
                        val = base * c
                        w = out.get(key)
                        out[key] = val if w is None else w + val
        return WeylElement(sp, out)

    def __matmul__(self, other):
        return self.mul(other)

    def form_split(self) -> dict:
        out: dict = {}
        for k, v in self.terms.items():
            out.setdefault(len(k[4]), {})[k] = v
        return {d: WeylElement(self.space, t, clean=False) for d, t in out.items()}

    def commutator(self, other: "WeylElement", bound: int | None = None) -> "WeylElement":
        """Graded commutator ``a o b - (-1)^{l1 l2} b o a``."""
        acc = self.space.zero()
        for l1, a in self.form_split().items():
            for l2, b in other.form_split().items():
                ab = a.mul(b, bound)
                ba = b.mul(a, bound)
                acc = acc + (ab + ba if (l1 * l2) % 2 else ab - ba)
        return acc

    # -- graded operators --------------------------------------------------------
    def delta(self) -> "WeylElement":
        """``sum_i dx^i ^ d/dy^i``."""
        out: dict = {}
        for (j, k, x, y, f), v in self.terms.items():
            for i, yi in enumerate(y):
                if not yi:
                    continue
                sign, form = _wedge((i,), f)
                if not sign:
                    continue
                ny = y[:i] + (yi - 1,) + y[i + 1:]
                key = (j, k, x, ny, form)
                val = v * (yi * sign)
                w = out.get(key)
                out[key] = val if w is None else w + val
        return WeylElement(self.space, out)

    def delta_star(self) -> "WeylElement":
        """``sum_i y^i i(d/dx^i)``."""
        out: dict = {}
        for (j, k, x, y, f), v in self.terms.items():
            for pos, i in enumerate(f):
                sign = -1 if pos % 2 else 1
                nf = f[:pos] + f[pos + 1:]
                ny = y[:i] + (y[i] + 1,) + y[i + 1:]
                key = (j, k, x, ny, nf)
                val = v if sign > 0 else -v
                w = out.get(key)
                out[key] = val if w is None else w + val
        return WeylElement(self.space, out)

    def delta_inv(self) -> "WeylElement":
        out: dict = {}
        for (j, k, x, y, f), v in self.terms.items():
            tot = sum(y) + len(f)
            if tot == 0 or not f:
                continue
            inv = Scalar(1) / tot
            for pos, i in enumerate(f):
                sign = -1 if pos % 2 else 1
                nf = f[:pos] + f[pos + 1:]
                ny = y[:i] + (y[i] + 1,) + y[i + 1:]
                key = (j, k, x, ny, nf)
                val = v * inv if sign > 0 else -(v * inv)
                w = out.get(key)
                out[key] = val if w is None else w + val
        return WeylElement(self.space, out)

    def sigma(self) -> "WeylElement":
        z = self.space.zero_x
        return WeylElement(self.space, {k: v for k, v in self.terms.items()
                                        if k[3] == z and not k[4]}, clean=False)

    def partial(self) -> "WeylElement":
        """Flat exterior covariant derivative ``sum_i dx^i ^ d/dx^i`` on base
        coefficients and on the jets of the symbolic arguments."""
        out: dict = {}

        def put(key, val):
            w = out.get(key)
            out[key] = val if w is None else w + val

        for (j, k, x, y, f), v in self.terms.items():
            for i in range(self.space.n):
                sign, form = _wedge((i,), f)
                if not sign:
                    continue
                if x[i]:
                    nx = x[:i] + (x[i] - 1,) + x[i + 1:]
                    put((j, k, nx, y, form), v * (x[i] * sign))
                for s, K in enumerate(j):
                    nK = K[:i] + (K[i] + 1,) + K[i + 1:]
                    nj = j[:s] + (nK,) + j[s + 1:]
                    put((nj, k, x, y, form), v if sign > 0 else -v)
        return WeylElement(self.space, out)

    def __repr__(self):
        return f"WeylElement({len(self.terms)} terms)"


# -- the construction -----------------------------------------------------------

@dataclass
class FedosovData:
    """Inputs of the flat construction.

    ``omega`` maps nu-order r >= 1 to ``{(i, j): CoeffFn}`` (``i < j``) for
    ``Omega_r = sum Omega_r[i,j] dx^i ^ dx^j``.  ``s`` is the normalization
    (form degree 0, ``sigma(s) = 0``, ``Deg(s) >= 3``), None for zero.
    """
    chart: Chart
    max_deg: int
    omega: dict = field(default_factory=dict)
    s: WeylElement | None = None

    @classmethod
    def for_order(cls, chart: Chart, order: int, omega=None, s=None) -> "FedosovData":
        return cls(chart, 2 * order + 2, omega or {}, s)

    @cached_property
    def space(self) -> WeylSpace:
        return WeylSpace(self.chart, self.max_deg)

    def omega_element(self) -> WeylElement:
        sp = self.space
        acc = sp.zero()
        for r, comps in sorted(self.omega.items()):
            if r < 1:
                raise ValueError("Omega starts at order nu^1")
            acc = acc + sp.two_form(comps, r)
        return acc

    def check_inputs(self) -> None:
        u = self.chart.universe
        for r, comps in self.omega.items():
            for (i, j), c in comps.items():
                if not i < j:
                    raise ValueError("Omega components are keyed by (i, j) with i < j")
                if c.universe != u:
                    raise ValueError("Omega coefficient on the wrong universe")
            # closedness: d Omega_r = 0
            d = self.space.two_form(comps, r).partial()
            if not d.is_zero():
                raise ValueError(f"Omega_{r} is not closed")
        if self.s is not None:
            s = self.s
            if not s.sigma().is_zero():
                raise ValueError("normalization s must satisfy sigma(s) = 0")
            if any(len(k[4]) for k in s.terms):
                raise ValueError("normalization s must have form degree 0")
            md = s.min_deg()
            if md is not None and md < 3:
                raise ValueError("normalization s must have Deg >= 3")
            if any(k[0] for k in s.terms):
                raise ValueError("normalization s cannot involve jets")


def _divide_by_2nu(x: WeylElement) -> WeylElement:
    return x.nu_shift(-1).scale(Scalar(1) / 2)


def _check_nonnegative(x: WeylElement, what: str) -> None:
    m = x.min_nu()
    if m is not None and m < 0:
        raise NegativeNuPower(f"{what} has a term of order nu^{m}")


def solve_r(data: FedosovData) -> WeylElement:
    """Fixed point ``r = delta s + delta^{-1}(Omega + d r - r o r / 2nu)``."""
    data.check_inputs()
    sp = data.space
    top = data.max_deg
    ds = data.s.delta() if data.s is not None else sp.zero()
    Om = data.omega_element()
    r = sp.zero()
    for _ in range(top + 2):
        rr = r.mul(r, top + 2)
        half = _divide_by_2nu(rr)
        _check_nonnegative(half, "r o r / 2nu")
        new = (ds + (Om + r.partial() - half).delta_inv()).truncate(top)
        if new == r:
            return r
        r = new
    raise RuntimeError("Fedosov iteration did not stabilize")


def curvature_residual(r: WeylElement, data: FedosovData) -> WeylElement:
    """``-delta r + d r - r o r / 2nu + Omega``, exact through ``Deg <= max_deg - 1``."""
    half = _divide_by_2nu(r.mul(r, data.max_deg + 2))
    res = -r.delta() + r.partial() - half + data.omega_element()
    return res.truncate(data.max_deg - 1)


def fedosov_D(x: WeylElement, r: WeylElement, bound: int | None = None) -> WeylElement:
    """``D = -delta + d - (1/2nu) ad(r)``."""
    bound = x.space.max_deg if bound is None else bound
    ad = r.commutator(x, bound + 2)
    return (-x.delta() + x.partial() - _divide_by_2nu(ad)).truncate(bound)


def fedosov_taylor(a: WeylElement, r: WeylElement, bound: int | None = None) -> WeylElement:
    """``tau(a) = a + delta^{-1}(d tau - [r, tau] / 2nu)``, iterated to a fixed point."""
    sp = a.space
    bound = sp.max_deg if bound is None else bound
    tau = a
    for _ in range(bound + 2):
        ad = r.commutator(tau, bound + 2)
        half = _divide_by_2nu(ad)
        _check_nonnegative(half, "[r, tau] / 2nu")
        new = (a + (tau.partial() - half).delta_inv()).truncate(bound)
        if new == tau:
            return tau
        tau = new
    raise RuntimeError("Fedosov-Taylor iteration did not stabilize")


def sigma_product(ta: WeylElement, tb: WeylElement, max_nu: int) -> WeylElement:
    """``sigma(ta o tb)`` for form-degree-0 inputs, keeping only full contractions."""
    sp = ta.space
    z = sp.zero_x
    out: dict = {}
    by_y: dict = {}
    for (j, k, x, y, f), v in tb.terms.items():
        if not f:
            by_y.setdefault(sum(y), []).append(((j, k, x, y), v))
    for (j1, k1, x1, y1, f1), v1 in ta.terms.items():
        if f1:
            continue
        m = sum(y1)
        if k1 + m > max_nu:
            continue
        for (j2, k2, x2, y2), v2 in by_y.get(m, ()):
            if k1 + k2 + m > max_nu:
                continue
            for r, ye, c in sp.contract(y1, y2):
                if ye != z:
                    continue
                key = (j1 + j2, k1 + k2 + r, _add(x1, x2), z, ())
                val = v1 * v2 * c
                w = out.get(key)
                out[key] = val if w is None else w + val
    return WeylElement(sp, out)


@dataclass
class FedosovResult:
    data: FedosovData
    r: WeylElement
    tau: WeylElement
    product: StarProduct
    report: Report


def fedosov_star(data: FedosovData, order: int | None = None, verify: bool = True
                 ) -> FedosovResult:
    """Solve r, build ``tau`` of a symbolic argument, and extract
    ``a * b = sigma(tau(a) o tau(b))`` as bidifferential operators."""
    sp = data.space
    N = (data.max_deg - 2) // 2 if order is None else order
    if 2 * N > data.max_deg:
        raise ValueError(f"order {N} needs max_deg >= {2 * N}")
    r = solve_r(data)
    tau = fedosov_taylor(sp.argument(), r)
    prod = sigma_product(tau, tau, N)
    u = data.chart.universe
    C = [dict() for _ in range(N + 1)]
    for (jets, k, x, y, f), v in prod.terms.items():
        key = (jets[0], jets[1])
        c = CoeffFn(u, {x: v}, _trusted=True)
        C[k][key] = C[k][key] + c if key in C[k] else c
    S = StarProduct(data.chart, [BiDiffOp(u, c) for c in C], "fedosov")
    rep = Report("fedosov", scope={"max_deg": data.max_deg, "order": N})
    if verify:
        res = curvature_residual(r, data)
        rep.add("curvature equation", res.is_zero(), witness=None if res.is_zero()
                else {"terms": len(res.terms)}, note=f"Deg <= {data.max_deg - 1}")
        norm = r.delta_inv()
        want = data.s if data.s is not None else sp.zero()
        ok = norm == want.truncate(data.max_deg)
        rep.add("normalization delta^-1 r = s", ok)
        rep.add("sigma(tau(a)) = a", tau.sigma() == sp.argument())
        Dt = fedosov_D(tau, r, data.max_deg - 1)
        rep.add("D tau(a) = 0", Dt.is_zero(), note=f"Deg <= {data.max_deg - 1}")
    return FedosovResult(data, r, tau, S, rep)


# -- random panels for the graded identities ------------------------------------------

def random_element(space: WeylSpace, rng: random.Random, terms: int = 4, max_deg: int | None = None,
                   form_degrees: Sequence[int] | None = None, x_degree: int = 1) -> WeylElement:
    n = space.n
    max_deg = space.max_deg if max_deg is None else max_deg
    form_degrees = list(range(n + 1)) if form_degrees is None else list(form_degrees)
    xs = list(iter_monomials(space.base, x_degree))
    out = {}
    for _ in range(terms):
        k = rng.randint(0, max_deg // 2)
        ys = [e for e in iter_monomials(space.fiber, max_deg - 2 * k)]
        ye = rng.choice(ys)
        fd = rng.choice(form_degrees)
        form = tuple(sorted(rng.sample(range(n), fd)))
        key = ((), k, rng.choice(xs), ye, form)
        out[key] = Scalar(rng.randint(-4, 4) or 1, rng.randint(-1, 1)) / rng.randint(1, 3)
    return WeylElement(space, out)
