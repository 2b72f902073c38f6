"""Recursive obstructions to adaptedness and the order-by-order adaptation."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations

from ..algebra.coeff import CoeffFn, Universe, iter_monomials
from ..algebra.scalar import ONE, ZERO, Scalar
from ..algebra.text import format_coeff
from ..report import Report
from ..starprod.ops import DiffOp
from ..starprod.star import EquivalenceTransform, StarProduct, apply_equivalence
from .adapted import _slot_failure, _same_chart, adapted_through
from .chart import CoisotropicChart, koszul_split


class NotClosed(ValueError):
    pass


class NotExact(ValueError):
    def __init__(self, msg, beta=None):
        super().__init__(msg)
        self.beta = beta


@dataclass(frozen=True)
class VerticalForm:
    """Vertical 1- or 2-form on C in the leaf coordinates.

    Degree 1: ``components[i]`` is the coefficient of ``dx^i``.  Degree 2:
    ``components[(i, j)]`` for ``i < j`` is ``beta(d/dx^i, d/dx^j)``.
    """
    leaves: tuple[str, ...]
    universe: Universe
    degree: int
    components: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.degree not in (1, 2):
            raise ValueError("vertical forms of degree 1 or 2 only")

    @classmethod
    def zero(cls, leaves, universe, degree) -> "VerticalForm":
        k = len(leaves)
        if degree == 1:
            comps = {i: CoeffFn.zero(universe) for i in range(k)}
        else:
            comps = {(i, j): CoeffFn.zero(universe) for i, j in combinations(range(k), 2)}
        return cls(tuple(leaves), universe, degree, comps)

    def __getitem__(self, key) -> CoeffFn:
        if self.degree == 1:
            return self.components[key]
        i, j = key
        if i == j:
            return CoeffFn.zero(self.universe)
        return self.components[(i, j)] if i < j else -self.components[(j, i)]

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components.values())

    def __eq__(self, other):
        return (isinstance(other, VerticalForm) and self.degree == other.degree
                and self.leaves == other.leaves and self.components == other.components)

    def __add__(self, other):
        return VerticalForm(self.leaves, self.universe, self.degree,
                            {k: v + other.components[k] for k, v in self.components.items()})

    def scale(self, c) -> "VerticalForm":
        return VerticalForm(self.leaves, self.universe, self.degree,
                            {k: v.scale(c) for k, v in self.components.items()})

    def d(self) -> "VerticalForm | dict":
        """Vertical exterior derivative; degree 3 results come back as a dict."""
        L = self.leaves
        if self.degree == 1:
            comps = {(i, j): self[j].derive(L[i]) - self[i].derive(L[j])
                     for i, j in combinations(range(len(L)), 2)}
            return VerticalForm(L, self.universe, 2, comps)
        return {(i, j, k): (self[(j, k)].derive(L[i]) + self[(k, i)].derive(L[j])
                            + self[(i, j)].derive(L[k]))
                for i, j, k in combinations(range(len(L)), 3)}

    def is_closed(self) -> bool:
        if self.degree == 1:
            return self.d().is_zero()
        return all(c.is_zero() for c in self.d().values())

    def to_text(self):
        if self.degree == 1:
            return {f"d{self.leaves[i]}": format_coeff(c) for i, c in sorted(self.components.items())}
        return {f"d{self.leaves[i]}^d{self.leaves[j]}": format_coeff(c)
                for (i, j), c in sorted(self.components.items())}


def vertical_primitive(beta: VerticalForm) -> VerticalForm:
    """Closed vertical 2-form -> 1-form gamma with ``d_v gamma = beta``.

    Poincare homotopy along the leaf coordinates:
    ``gamma_j = sum_i int_0^1 t beta_ij(eta, t x) x^i dt``, i.e. each monomial of
    leaf degree m contributes ``x^i beta_ij / (m + 2)``.  For
    ``beta = dx^1 ^ dx^2`` this gives ``(x^1 dx^2 - x^2 dx^1) / 2``.
    """
    if beta.degree != 2:
        raise ValueError("need a vertical 2-form")
    if not beta.is_closed():
        raise NotClosed("vertical 2-form is not d_v-closed")
    u = beta.universe
    L = beta.leaves
    lpos = [u.pos(x) for x in L]
    if beta.is_zero():
        return VerticalForm.zero(L, u, 1)
    if any(u.is_angle(x) for x in L):
        raise NotExact("homotopy needs polynomial leaf coordinates", beta)
    comps = {}
    for j in range(len(L)):
        acc: dict = {}
        for i in range(len(L)):
            b = beta[(i, j)]
            for e, c in b.terms.items():
                m = sum(e[k] for k in lpos)
                ne = list(e)
                ne[lpos[i]] += 1
                ne = tuple(ne)
                v = c / (m + 2)
                acc[ne] = acc[ne] + v if ne in acc else v
        comps[j] = CoeffFn(u, acc)
    gamma = VerticalForm(L, u, 1, comps)
    if gamma.d() != beta:
        raise NotExact("homotopy failed to produce a primitive", beta)
    return gamma


# -- obstruction cocycle -----------------------------------------------------------

def B_form(S: StarProduct, chart: CoisotropicChart, r: int, f: CoeffFn, g: CoeffFn) -> CoeffFn:
    """``B_r(f, g) = i^* C_r(f, g)``."""
    if r > S.order:
        raise ValueError(f"product truncated below order {r}")
    return chart.i_star(S.C[r].apply(f, g))


def B_minus(S, chart, r, g1, g2) -> CoeffFn:
    return B_form(S, chart, r, g1, g2) - B_form(S, chart, r, g2, g1)


def hamiltonian_action(chart: CoisotropicChart, g: CoeffFn, phi: CoeffFn) -> CoeffFn:
    """``X_g`` on functions on C: ``i^*{prolong(phi), g}``."""
    return chart.i_star(chart.chart.poisson.apply(chart.prolong(phi), g))


@dataclass
class ObstructionCocycle:
    order: int
    beta: VerticalForm
    identities: Report | None = None

    def is_zero(self) -> bool:
        return self.beta.is_zero()


def obstruction_cocycle(S: StarProduct, chart: CoisotropicChart, r: int | None = None,
                        samples: int = 0, seed: int = 0) -> ObstructionCocycle:
    """``beta_{r+1}(d/dx^i, d/dx^j) = i^*(C_{r+1}(y_i, y_j) - C_{r+1}(y_j, y_i))``.

    ``r`` defaults to the adapted-through order.  With ``samples > 0`` the
    four recursive identities are checked exactly on that many random inputs.
    """
    _same_chart(S, chart)
    through = adapted_through(S, chart)
    if r is None:
        r = through
    if r > through:
        raise ValueError(f"product is adapted only through order {through}, not {r}")
    if r + 1 > S.order:
        raise ValueError(f"need C_{r + 1}; product is truncated at order {S.order}")
    k = chart.codim
    comps = {}
    for i, j in combinations(range(k), 2):
        comps[(i, j)] = B_minus(S, chart, r + 1, chart.y(i), chart.y(j))
    beta = VerticalForm(chart.leaf_vars, chart.c_universe, 2, comps)
    cocycle = ObstructionCocycle(r + 1, beta)
    if samples:
        cocycle.identities = check_lob_identities(S, chart, r, samples, seed)
    return cocycle


def random_poly(rng: random.Random, u: Universe, degree: int, terms: int = 3,
                ideal_of: CoisotropicChart | None = None) -> CoeffFn:
    monos = list(iter_monomials(u, degree))
    if ideal_of is not None:
        monos = [e for e in monos if ideal_of.has_transverse(e)]
    out = {}
    for e in rng.sample(monos, min(terms, len(monos))):
        out[e] = Scalar(rng.randint(-3, 3) or 1, 0) / rng.randint(1, 3)
    return CoeffFn(u, out)


def check_lob_identities(S: StarProduct, chart: CoisotropicChart, r: int, samples: int = 10,
                         seed: int = 0, degree: int = 2) -> Report:
    """Exact identities satisfied by ``B_{r+1}`` when S is adapted through order r."""
    rng = random.Random(seed)
    u = chart.universe
    n = r + 1
    rep = Report("recursive identities", scope={"order": n, "samples": samples, "seed": seed})
    fails = {k: None for k in ("LOb1", "LOb2", "LOb3", "LOb4")}
    B = lambda f, g: B_form(S, chart, n, f, g)
    Bm = lambda g1, g2: B_minus(S, chart, n, g1, g2)
    P = chart.chart.poisson
    X = lambda g, phi: hamiltonian_action(chart, g, phi)
    for t in range(samples):
        f1, f2, f = (random_poly(rng, u, degree) for _ in range(3))
        g, g1, g2, g3 = (random_poly(rng, u, degree, ideal_of=chart) for _ in range(4))
        i = chart.i_star
        if fails["LOb1"] is None:
            if not (i(f1) * B(f2, g) - B(f1 * f2, g) + B(f1, f2 * g)).is_zero():
                fails["LOb1"] = {"sample": t, "f1": str(f1), "f2": str(f2), "g": str(g)}
        if fails["LOb2"] is None:
            a, b, c = Bm(f * g1, g2), Bm(g1, f * g2), i(f) * Bm(g1, g2)
            if not (a == b == c):
                fails["LOb2"] = {"sample": t, "f": str(f), "g1": str(g1), "g2": str(g2)}
        if fails["LOb3"] is None:
            if not Bm(g1 * g2, g3).is_zero():
                fails["LOb3"] = {"sample": t, "g1": str(g1), "g2": str(g2), "g3": str(g3)}
        if fails["LOb4"] is None:
            tot = CoeffFn.zero(chart.c_universe)
            for a, b, c in ((g1, g2, g3), (g2, g3, g1), (g3, g1, g2)):
                tot = tot - X(a, Bm(b, c)) - Bm(P.apply(a, b), c)
            if not tot.is_zero():
                fails["LOb4"] = {"sample": t, "g1": str(g1), "g2": str(g2), "g3": str(g3),
                                 "residual": format_coeff(tot)}
    labels = {"LOb1": "i*f1 B(f2,g) - B(f1 f2,g) + B(f1,f2 g) = 0",
              "LOb2": "B-(f g1,g2) = B-(g1,f g2) = i*f B-(g1,g2)",
              "LOb3": "B-(g1 g2,g3) = 0",
              "LOb4": "cyclic d_v-closure"}
    for key, label in labels.items():
        rep.add(f"{key}: {label}", fails[key] is None, order=n if fails[key] else None,
                witness=fails[key])
    return rep


# -- adaptation ------------------------------------------------------------------

def _vertical_field(chart: CoisotropicChart, gamma: VerticalForm) -> DiffOp:
    """``sum_i prolong(gamma_i) d/dy_i``."""
    u = chart.universe
    terms = {}
    for i, y in enumerate(chart.transverse):
        c = gamma[i]
        if not c.is_zero():
            terms[(u.unit(y),)] = chart.prolong(c)
    return DiffOp(u, terms)


def symmetric_correction(S: StarProduct, chart: CoisotropicChart, n: int) -> DiffOp:
    """``T`` with ``i^* T g = -E_U(g)`` for ideal g, ``E_U(g) = sum_i i^* C_n(g^i, y_i)``.

    Using ``i^* d^I g^i = i^* d^(I + e_i) g / (|I_y| + 1)`` from the Koszul split,
    ``T = -sum_i sum_I prolong(i^* b_(I, e_i)) / (|I_y| + 1) d^(I + e_i)``.
    """
    u = chart.universe
    acc: dict = {}
    for i, y in enumerate(chart.transverse):
        ey = u.unit(y)
        for (I, J), c in S.C[n].terms.items():
            if J != ey:
                continue
            rc = chart.i_star(c)
            if rc.is_zero():
                continue
            K = tuple(a + b for a, b in zip(I, ey))
            v = chart.prolong(rc).scale(Scalar(-1) / (chart.transverse_order(I) + 1))
            acc[(K,)] = acc[(K,)] + v if (K,) in acc else v
    return DiffOp(u, acc)


@dataclass
class AdaptResult:
    transform: EquivalenceTransform
    product: StarProduct
    report: Report
    obstructions: list = field(default_factory=list)


def adapt(S: StarProduct, chart: CoisotropicChart, N: int | None = None) -> AdaptResult:
    """Order-by-order equivalence making ``I[[nu]]`` a left ideal.

    At order r: the antisymmetric obstruction ``beta_{r+1}`` is removed by the
    vertical field ``gamma . d/dy`` at order r with ``gamma = -1/2 prim(beta)``
    (a vertical field shifts beta by ``2 d_v gamma``); the symmetric residue is
    removed at order r+1 by :func:`symmetric_correction`.  Adaptedness is
    re-verified after every step.
    """
    _same_chart(S, chart)
    N = S.order if N is None else N
    if N > S.order:
        raise ValueError("cannot adapt beyond the product order")
    S = S.truncate(N)
    u = chart.universe
    total = EquivalenceTransform.identity(u, N)
    rep = Report("adapt", scope={"order": N})
    obstructions = []
    cur = S
    # order 0 is adapted for any product; C_1 may still need the symmetric fix
    for r in range(0, N):
        through = adapted_through(cur, chart)
        if through < r:
            rep.add(f"adapted through order {r}", False, order=r)
            return AdaptResult(total, cur, rep, obstructions)
        co = obstruction_cocycle(cur, chart, r)
        obstructions.append({"order": r + 1, "beta": co.beta.to_text(),
                             "zero": co.is_zero()})
        if not co.is_zero():
            if r == 0:
                raise NotExact("nonzero first-order obstruction: chart is not coisotropic "
                               "for this product", co.beta)
            try:
                prim = vertical_primitive(co.beta)
            except (NotClosed, NotExact) as exc:
                raise NotExact(f"order {r + 1}: {exc}", co.beta) from None
            gamma = prim.scale(Scalar(-1, 0) / 2)
            step = EquivalenceTransform.single(u, N, r, _vertical_field(chart, gamma))
            cur = apply_equivalence(step, cur)
            total = total.then(step)
            after = obstruction_cocycle(cur, chart, r)
            rep.add(f"beta_{r + 1} removed", after.is_zero(), order=r + 1,
                    witness=None if after.is_zero() else after.beta.to_text())
            if not after.is_zero():
                return AdaptResult(total, cur, rep, obstructions)
        T = symmetric_correction(cur, chart, r + 1)
        if not T.is_zero():
            step = EquivalenceTransform.single(u, N, r + 1, T)
            cur = apply_equivalence(step, cur)
            total = total.then(step)
        bad = _slot_failure(cur, chart, 1, r + 1)
        rep.add(f"adapted through order {r + 1}", bad is None, order=r + 1 if bad else None)
        if bad is not None:
            return AdaptResult(total, cur, rep, obstructions)
    rep.data["adapted_through"] = adapted_through(cur, chart)
    rep.data["transform_terms"] = total.term_count()
    return AdaptResult(total, cur, rep, obstructions)
