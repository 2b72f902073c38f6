"""Charts, star products and the constructions that act on them."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

from ..algebra.coeff import CoeffFn, Universe, UniverseError
from ..algebra.scalar import ONE, ZERO, Scalar
from ..algebra.series import NuSeries
from .ops import (BiDiffOp, DiffOp, _add_idx, compose_series, exp_series, exp_symbol_series,
                  inverse_series, leibniz_splits)


class Ordering(Enum):
    STANDARD = "STANDARD"
    WEYL = "WEYL"


class ChartError(ValueError):
    pass


@dataclass(frozen=True)
class Chart:
    """Variable universe plus Poisson tensor ``P = sum P^{ij} d_i (x) d_j``.

    ``pairs`` lists conjugate ``(q, p)`` pairs with ``{q, p} = 1`` when the
    chart is Darboux; it may be empty for linear Poisson structures.
    """
    universe: Universe
    poisson: BiDiffOp
    pairs: tuple[tuple[str, str], ...] = ()

    @classmethod
    def darboux(cls, pairs: Sequence[tuple[str, str]], angles: Sequence[str] = ()) -> "Chart":
        names = tuple(v for pr in pairs for v in pr)
        u = Universe(names, frozenset(angles))
        return cls(u, darboux_poisson(u, pairs), tuple(tuple(p) for p in pairs))

    @classmethod
    def standard(cls, n: int) -> "Chart":
        """Darboux chart on R^{2n}: q (or q1..qn) and p (or p1..pn)."""
        if n == 1:
            return cls.darboux([("q", "p")])
        return cls.darboux([(f"q{i}", f"p{i}") for i in range(1, n + 1)])

    def with_poisson(self, P: BiDiffOp) -> "Chart":
        return Chart(self.universe, P, self.pairs)

    def opposite(self) -> "Chart":
        return Chart(self.universe, -self.poisson, tuple((p, q) for q, p in self.pairs))

    def union(self, other: "Chart") -> "Chart":
        u = self.universe.union(other.universe)
        return Chart(u, self.poisson.embed(u) + other.poisson.embed(u), self.pairs + other.pairs)

    def poisson_bracket(self, f: CoeffFn, g: CoeffFn) -> CoeffFn:
        return self.poisson.apply(f, g)


def darboux_poisson(u: Universe, pairs: Sequence[tuple[str, str]]) -> BiDiffOp:
    items = []
    for q, p in pairs:
        items.append((1, {q: 1}, {p: 1}))
        items.append((-1, {p: 1}, {q: 1}))
    return BiDiffOp.from_spec(u, items)


class StarProduct:
    """A truncated star product ``sum_{r<=N} nu^r C_r`` on a chart."""

    def __init__(self, chart: Chart, C: Sequence[BiDiffOp], name: str = ""):
        self.chart = chart
        self.C = tuple(C)
        self.name = name
        for c in self.C:
            if c.universe != chart.universe:
                raise UniverseError("operator universe differs from the chart")
        self._mono_cache: dict = {}

    @property
    def universe(self) -> Universe:
        return self.chart.universe

    @property
    def order(self) -> int:
        return len(self.C) - 1

    def __eq__(self, other):
        if not isinstance(other, StarProduct):
            return NotImplemented
        return self.chart == other.chart and self.C == other.C

    def __hash__(self):
        return hash((self.chart.universe, self.C))

    def truncate(self, order: int) -> "StarProduct":
        if order > self.order:
            raise ValueError("cannot extend a truncated product")
        return StarProduct(self.chart, self.C[: order + 1], self.name)

    def differs_at(self, other: "StarProduct") -> int | None:
        for r, (a, b) in enumerate(zip(self.C, other.C)):
            if a != b:
                return r
        return None

    def max_order(self) -> int:
        return max(c.max_order() for c in self.C)

    # -- evaluation --------------------------------------------------------
    def mono_product(self, e1: tuple[int, ...], e2: tuple[int, ...]) -> tuple[dict, ...]:
        """Cached ``x^e1 * x^e2`` as raw dicts per order."""
        key = (e1, e2)
        hit = self._mono_cache.get(key)
        if hit is None:
            hit = tuple(c.apply_monomials(e1, e2) for c in self.C)
            self._mono_cache[key] = hit
        return hit

    def __call__(self, f, g) -> NuSeries:
        return star_apply(self, f, g)

    def __repr__(self):
        return f"StarProduct({self.name or 'unnamed'}, N={self.order}, vars={self.universe.names})"


def as_series(f, u: Universe, order: int) -> NuSeries:
    if isinstance(f, NuSeries):
        if f.order != order:
            raise ValueError(f"series order {f.order} differs from product order {order}")
        for c in f:
            if c.universe != u:
                raise UniverseError("series universe differs from the chart")
        return f
    if isinstance(f, (int, Scalar)):
        f = CoeffFn.const(u, f)
    if f.universe != u:
        raise UniverseError(f"universe mismatch: {f.universe.names} vs {u.names}")
    return NuSeries([f] + [CoeffFn.zero(u)] * order)


def star_apply(S: StarProduct, f, g) -> NuSeries:
    """Cauchy-convolved application of the operators, truncated at N."""
    N = S.order
    u = S.universe
    f = as_series(f, u, N)
    g = as_series(g, u, N)
    out = []
    for r in range(N + 1):
        acc = CoeffFn.zero(u)
        for a in range(r + 1):
            C = S.C[a]
            for b in range(r - a + 1):
                fb, gc = f[b], g[r - a - b]
                if fb.is_zero() or gc.is_zero():
                    continue
                acc = acc + C.apply(fb, gc)
        out.append(acc)
    return NuSeries(out)


# -- constructions -------------------------------------------------------------

def pointwise_star(chart: Chart, order: int = 0) -> StarProduct:
    u = chart.universe
    return StarProduct(chart, [BiDiffOp.identity(u)] + [BiDiffOp.zero(u)] * order, "pointwise")


def exponential_star(chart: Chart, exponent: Sequence[BiDiffOp], order: int,
                     name: str = "") -> StarProduct:
    """``mu o exp(E)`` for a series ``E = sum_{r>=1} nu^r E_r`` of constant symbols."""
    return StarProduct(chart, exp_symbol_series(exponent, order), name)


def build_exponential_star(chart: Chart, ordering: Ordering | str, order: int) -> StarProduct:
    ordering = Ordering(ordering) if isinstance(ordering, str) else ordering
    u = chart.universe
    if ordering is Ordering.STANDARD:
        if not chart.pairs:
            raise ChartError("standard ordering needs declared conjugate pairs")
        E1 = BiDiffOp.from_spec(u, [(-2, {p: 1}, {q: 1}) for q, p in chart.pairs])
        name = "standard"
    else:
        if not chart.poisson.is_constant():
            raise ChartError("Weyl ordering needs a constant Poisson tensor")
        if not chart.pairs and chart.poisson.is_zero():
            raise ChartError("no conjugate-pair declaration")
        E1 = chart.poisson
        name = "weyl"
    return exponential_star(chart, [BiDiffOp.zero(u), E1], order, name)


class EquivalenceTransform:
    """``T = id + sum_{r>=1} nu^r T_r`` with each ``T_r`` killing constants."""

    def __init__(self, ops: Sequence[DiffOp]):
        ops = list(ops)
        if not ops or not ops[0].is_identity():
            raise ValueError("order-0 term of an equivalence must be the identity")
        for r, t in enumerate(ops[1:], 1):
            if not t.kills_constants():
                raise ValueError(f"T_{r} does not annihilate constants")
        self.ops = tuple(ops)

    @classmethod
    def identity(cls, u: Universe, order: int) -> "EquivalenceTransform":
        return cls([DiffOp.identity(u)] + [DiffOp.zero(u)] * order)

    @classmethod
    def exp(cls, X: Sequence[DiffOp], order: int) -> "EquivalenceTransform":
        return cls(exp_series(X, order))

    @classmethod
    def single(cls, u: Universe, order: int, r: int, op: DiffOp) -> "EquivalenceTransform":
        """``id + nu^r op``."""
        ops = [DiffOp.identity(u)] + [DiffOp.zero(u)] * order
        if r <= order:
            ops[r] = op
        return cls(ops)

    @property
    def universe(self) -> Universe:
        return self.ops[0].universe

    @property
    def order(self) -> int:
        return len(self.ops) - 1

    def is_identity(self) -> bool:
        return all(t.is_zero() for t in self.ops[1:])

    def inverse(self) -> "EquivalenceTransform":
        return EquivalenceTransform(inverse_series(self.ops))

    def then(self, other: "EquivalenceTransform") -> "EquivalenceTransform":
        """``other o self``."""
        return EquivalenceTransform(compose_series(other.ops, self.ops))

    def apply(self, f) -> NuSeries:
        u, N = self.universe, self.order
        f = as_series(f, u, N)
        out = []
        for r in range(N + 1):
            acc = CoeffFn.zero(u)
            for a in range(r + 1):
                if not f[r - a].is_zero() and not self.ops[a].is_zero():
                    acc = acc + self.ops[a].apply(f[r - a])
            out.append(acc)
        return NuSeries(out)

    def __call__(self, f) -> NuSeries:
        return self.apply(f)

    def __eq__(self, other):
        return isinstance(other, EquivalenceTransform) and self.ops == other.ops

    def __hash__(self):
        return hash(self.ops)

    def term_count(self) -> int:
        return sum(len(t.terms) for t in self.ops[1:])


def conjugate_ops(C: Sequence[BiDiffOp], T: Sequence[DiffOp],
                  Tinv: Sequence[DiffOp]) -> list[BiDiffOp]:
    """``T o C o (Tinv (x) Tinv)`` as a series, truncated at len(C) - 1."""
    N = len(C) - 1
    u = C[0].universe
    left: dict = {}
    inner = []
    for r in range(N + 1):
        acc = BiDiffOp.zero(u)
        for b in range(r + 1):
            if C[b].is_zero():
                continue
            for c in range(r - b + 1):
                d = r - b - c
                if Tinv[c].is_zero() or Tinv[d].is_zero():
                    continue
                if (b, c) not in left:
                    left[(b, c)] = C[b].compose_slot(0, Tinv[c])
                acc = acc + left[(b, c)].compose_slot(1, Tinv[d])
        inner.append(acc)
    out = []
    for r in range(N + 1):
        acc = BiDiffOp.zero(u)
        for a in range(r + 1):
            if T[a].is_zero() or inner[r - a].is_zero():
                continue
            acc = acc + inner[r - a].compose_outer(T[a])
        out.append(acc)
    return out


def apply_equivalence(T: EquivalenceTransform, S: StarProduct) -> StarProduct:
    """``f *' g = T(T^{-1} f * T^{-1} g)`` as explicit operators."""
    if T.universe != S.universe:
        raise UniverseError("transform and product live on different charts")
    if T.order < S.order:
        raise ValueError("transform truncated below the product order")
    if T.is_identity():
        return S
    ops = T.ops[: S.order + 1]
    inv = inverse_series(list(ops))
    return StarProduct(S.chart, conjugate_ops(S.C, ops, inv), S.name + "'")


def opposite_star(S: StarProduct) -> StarProduct:
    name = S.name[:-4] if S.name.endswith("^opp") else S.name + "^opp"
    return StarProduct(S.chart.opposite(), [c.swap() for c in S.C], name)


def tensor_star(S1: StarProduct, S2: StarProduct) -> StarProduct:
    if S1.order != S2.order:
        raise ValueError("tensor factors need the same truncation order")
    chart = S1.chart.union(S2.chart)
    u = chart.universe
    out = []
    for r in range(S1.order + 1):
        acc: dict = {}
        for s in range(r + 1):
            A, B = S1.C[s], S2.C[r - s]
            for (I1, J1), a in A.terms.items():
                ae = a.embed(u)
                for (I2, J2), b in B.terms.items():
                    key = (I1 + I2, J1 + J2)
                    t = ae * b.embed(u)
                    acc[key] = acc[key] + t if key in acc else t
        out.append(BiDiffOp(u, acc))
    return StarProduct(chart, out, f"{S1.name}(x){S2.name}")


def hochschild_coboundary(B: DiffOp) -> BiDiffOp:
    """``(bB)(f, g) = f Bg - B(fg) + (Bf) g``."""
    u = B.universe
    if not B.kills_constants():
        raise ValueError("operator must annihilate constants")
    acc: dict = {}
    z = u.zero_exp()
    for (K,), c in B.terms.items():
        for (K1, K2), w in leibniz_splits(K, 2):
            if K1 == z or K2 == z:
                continue
            key = (K1, K2)
            t = c.scale(-w)
            acc[key] = acc[key] + t if key in acc else t
    return BiDiffOp(u, acc)


def replace_order(S: StarProduct, r: int, C: BiDiffOp, name: str | None = None) -> StarProduct:
    ops = list(S.C)
    ops[r] = C
    return StarProduct(S.chart, ops, name if name is not None else S.name + f"[C{r}]")
