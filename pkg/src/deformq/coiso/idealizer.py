"""Idealizer ``N_*(I)/I`` and the commutant of the canonical representation."""
from __future__ import annotations

from dataclasses import dataclass

from ..algebra.coeff import CoeffFn, glex_key, iter_monomials
from ..algebra.linalg import nullspace, span_rref
from ..algebra.scalar import Scalar
from ..algebra.series import NuSeries
from ..algebra.text import format_coeff, format_series
from ..report import Report
from ..starprod.star import StarProduct, as_series
from .adapted import NotAdapted, _same_chart, _slot_failure
from .chart import CoisotropicChart


def _left_mult_ops(S: StarProduct, chart: CoisotropicChart, g_exp, cpos):
    """For fixed ideal monomial g: per order a, the map ``phi -> i^* C_a(g, prolong phi)``
    as ``{C-exponent: {result C-exponent: Scalar}}`` computed lazily."""
    res = chart.restriction
    cache = {}

    def apply(a: int, e_c):
        key = (a, e_c)
        hit = cache.get(key)
        if hit is None:
            e = res.lift_index(e_c)
            d = S.C[a].apply_monomials(g_exp, e)
            hit = {}
            for m, v in d.items():
                rm = res.restrict_exp(m)
                if rm is not None and not v.is_zero():
                    hit[rm] = v
            cache[key] = hit
        return hit

    return apply


def idealizer_commutant(S: StarProduct, chart: CoisotropicChart, D: int, N: int | None = None,
                        lookahead: int = 2, full_basis: bool = False) -> "IdealizerResult":
    """Basis of ``N_*(I)/I`` among ``phi = sum_{r<=N} nu^r phi_r`` with each
    ``phi_r`` supported on C-monomials of size <= D.

    The conditions are ``i^*(g * prolong(phi)) = 0`` through order
    ``N + lookahead`` for the generators ``g = y_i`` (or for every ideal
    monomial of size <= D with ``full_basis``), solved exactly with unknown
    orders up to ``N + lookahead - 1``; the solution space is then projected
    onto orders <= N.  Mode elimination at order r uses the equation at order
    r + 2 for the torus products, hence the default lookahead of 2.
    """
    _same_chart(S, chart)
    if _slot_failure(S, chart, 1, S.order) is not None:
        raise NotAdapted("idealizer computation needs an adapted product")
    N = S.order - lookahead if N is None else N
    top = N + lookahead
    if top > S.order:
        raise ValueError(f"need the product through order {top} (N + lookahead)")
    u = chart.universe
    cu = chart.c_universe
    cpos = [u.pos(n) for n in cu.names]
    c_monos = sorted(iter_monomials(cu, D), key=glex_key)
    M = top - 1  # phi_top never enters: C_0(y_i, .) restricts to zero
    columns = [(r, e) for r in range(M + 1) for e in c_monos]
    if full_basis:
        gens = [e for e in iter_monomials(u, D) if chart.has_transverse(e)]
    else:
        gens = [u.unit(y) for y in chart.transverse]
    rows = []
    for g in gens:
        app = _left_mult_ops(S, chart, g, cpos)
        for n in range(top + 1):
            eqs: dict = {}
            for a in range(n + 1):
                b = n - a
                if b > M:
                    continue
                for e in c_monos:
                    for m, v in app(a, e).items():
                        row = eqs.setdefault(m, {})
                        col = (b, e)
                        w = row.get(col)
                        row[col] = v if w is None else w + v
            rows.extend(eqs.values())
    kernel = nullspace(rows, columns)
    kept = [c for c in columns if c[0] <= N]
    basis = span_rref(({c: v for c, v in vec.items() if c[0] <= N} for vec in kernel), kept)
    elems = [_to_series(vec, cu, N) for vec in basis]
    rep = Report("idealizer", scope={"degree": D, "order": N, "lookahead": lookahead,
                                     "equations_from": "all ideal monomials" if full_basis
                                     else "generators y_i",
                                     "certified": "polynomial/Fourier subalgebra to the stated "
                                                  "degree; smooth statements are not covered"})
    rep.data["dimension"] = len(basis)
    rep.data["basis"] = [format_series(s) for s in elems]
    rep.data["monomial_supported"] = all(len(v) == 1 for v in basis)
    rep.data["support"] = sorted({_support_text(cu, col) for v in basis for col in v})
    rep.add("solved", True, note=f"{len(rows)} equations, {len(columns)} unknowns")
    return IdealizerResult(rep, elems)


def _support_text(cu, col) -> str:
    r, e = col
    return f"nu^{r} " + format_coeff(CoeffFn(cu, {e: Scalar(1)}, _trusted=True))


def _to_series(vec: dict, cu, N: int) -> NuSeries:
    parts = [dict() for _ in range(N + 1)]
    for (r, e), v in vec.items():
        parts[r][e] = v
    return NuSeries([CoeffFn(cu, p) for p in parts])


@dataclass
class IdealizerResult:
    report: Report
    basis: list[NuSeries]

    @property
    def support(self) -> list[str]:
        return self.report.data["support"]


def commutant_action(S: StarProduct, chart: CoisotropicChart, phi):
    """``h = prolong(phi)`` acting on C-functions from the right:
    ``i^* f -> i^*(f * h)`` with f the constant prolongation."""
    u = chart.universe
    h = as_series(phi, chart.c_universe, S.order).map(chart.prolong)

    def act(psi) -> NuSeries:
        f = as_series(psi, chart.c_universe, S.order).map(chart.prolong)
        return S(f, h).map(chart.i_star)

    return act


def membership_check(S: StarProduct, chart: CoisotropicChart, phi: NuSeries, D: int,
                     order: int) -> bool:
    """Direct check that ``i^*(g * prolong phi) = 0`` through ``order`` for all
    ideal monomials g of size <= D."""
    u = chart.universe
    h = NuSeries(list(phi.coeffs) + [CoeffFn.zero(chart.c_universe)] * (S.order - phi.order))
    h = h.map(chart.prolong)
    for e in iter_monomials(u, D):
        if not chart.has_transverse(e):
            continue
        g = CoeffFn(u, {e: Scalar(1)}, _trusted=True)
        out = S(g, h)
        if any(not chart.i_star(out[r]).is_zero() for r in range(order + 1)):
            return False
    return True
