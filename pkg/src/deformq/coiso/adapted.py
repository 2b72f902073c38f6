"""Adaptedness, sidedness, projectability, reduction and the canonical representation."""
from __future__ import annotations

from enum import Enum

from ..algebra.coeff import CoeffFn, iter_monomials
from ..algebra.scalar import ONE
from ..algebra.text import format_coeff
from ..report import Report
from ..starprod.checks import RepresentationSeries, mono_text
from ..starprod.ops import BiDiffOp, DiffOp
from ..starprod.star import EquivalenceTransform, StarProduct, apply_equivalence
from .chart import CoisotropicChart


class NotAdapted(ValueError):
    pass


class NotProjectable(ValueError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


def _term_witness(chart: CoisotropicChart, r: int, key, c: CoeffFn) -> dict:
    from ..cli.serialize import _index_text
    u = chart.universe
    return {"r": r, "I": _index_text(u, key[0]), "J": _index_text(u, key[1]),
            "restricted_coeff": format_coeff(chart.i_star(c))}


def _slot_failure(S: StarProduct, chart: CoisotropicChart, slot: int, order: int):
    """First ``(r, term)`` whose slot carries a transverse derivative and whose
    coefficient does not vanish on C."""
    for r in range(min(order, S.order) + 1):
        for key, c in S.C[r].sorted_terms():
            if chart.has_transverse(key[slot]) and not chart.i_star(c).is_zero():
                return r, key, c
    return None


def adapted_through(S: StarProduct, chart: CoisotropicChart) -> int:
    """Largest r with C_0..C_r adapted (-1 when even C_0 fails)."""
    bad = _slot_failure(S, chart, 1, S.order)
    return S.order if bad is None else bad[0] - 1


def check_adapted(S: StarProduct, chart: CoisotropicChart, order: int | None = None) -> Report:
    """``I[[nu]]`` is a left ideal iff every normal-form coefficient with a
    transverse derivative in the second slot vanishes on C."""
    _same_chart(S, chart)
    order = S.order if order is None else order
    rep = Report("adapted", scope={"order": order})
    bad = _slot_failure(S, chart, 1, order)
    rep.add("I[[nu]] left ideal", bad is None, order=bad and bad[0],
            witness=bad and _term_witness(chart, *bad))
    rep.data["adapted_through"] = order if bad is None else bad[0] - 1
    return rep


def _same_chart(S: StarProduct, chart: CoisotropicChart) -> None:
    if S.universe != chart.universe:
        raise ValueError(f"product variables {S.universe.names} do not match the chart "
                         f"{chart.universe.names}")


class Sidedness(Enum):
    LEFT = "LEFT"
    RIGHT = "RIGHT"
    TWO_SIDED = "TWO_SIDED"
    NEITHER = "NEITHER"
    NOT_SUBALGEBRA = "NOT_SUBALGEBRA"


def _subalgebra_failure(S: StarProduct, chart: CoisotropicChart):
    for r in range(S.order + 1):
        for key, c in S.C[r].sorted_terms():
            if (chart.has_transverse(key[0]) and chart.has_transverse(key[1])
                    and not chart.i_star(c).is_zero()):
                return r, key, c
    return None


def check_ideal_sidedness(S: StarProduct, chart: CoisotropicChart) -> Sidedness:
    """Classify ``I[[nu]]`` by the restricted-coefficient criterion slot by slot.

    For a pair ``(y^a eta^c, y^b eta^d)`` only terms with exactly those
    transverse orders survive restriction, so ``I * I`` lands in I iff every
    term with transverse derivatives in both slots restricts to zero.
    """
    _same_chart(S, chart)
    left = _slot_failure(S, chart, 1, S.order) is None
    right = _slot_failure(S, chart, 0, S.order) is None
    if left and right:
        return Sidedness.TWO_SIDED
    if left:
        return Sidedness.LEFT
    if right:
        return Sidedness.RIGHT
    if _subalgebra_failure(S, chart) is None:
        return Sidedness.NEITHER
    return Sidedness.NOT_SUBALGEBRA


def sidedness_report(S: StarProduct, chart: CoisotropicChart, D: int = 2) -> Report:
    """Sidedness plus a confirmation on concrete ideal monomials to size D."""
    side = check_ideal_sidedness(S, chart)
    rep = Report("sidedness", scope={"degree": D, "order": S.order})
    rep.data["sidedness"] = side.value
    u = chart.universe
    monos = list(iter_monomials(u, D))
    ideal = [e for e in monos if chart.has_transverse(e)]
    left_w = right_w = None
    for g in ideal:
        for f in monos:
            if left_w is None and _restricted_nonzero(S, chart, f, g):
                left_w = {"f": mono_text(u, f), "g": mono_text(u, g)}
            if right_w is None and _restricted_nonzero(S, chart, g, f):
                right_w = {"g": mono_text(u, g), "f": mono_text(u, f)}
        if left_w and right_w:
            break
    want_left = side in (Sidedness.LEFT, Sidedness.TWO_SIDED)
    want_right = side in (Sidedness.RIGHT, Sidedness.TWO_SIDED)
    rep.add("left-ideal samples agree", (left_w is None) or not want_left, witness=left_w)
    rep.add("right-ideal samples agree", (right_w is None) or not want_right, witness=right_w)
    return rep


def _restricted_nonzero(S: StarProduct, chart: CoisotropicChart, e1, e2) -> int | None:
    res = chart.restriction
    for r, d in enumerate(S.mono_product(e1, e2)):
        for e, v in d.items():
            if not v.is_zero() and res.restrict_exp(e) is not None:
                return r
    return None


# -- projectability -------------------------------------------------------------

def default_projectable_degree(S: StarProduct) -> int:
    return S.max_order() + max(c.max_coeff_degree() for c in S.C) + 1


def _leaf_dependent(chart: CoisotropicChart, d: dict) -> bool:
    res = chart.restriction
    lp = chart.leaf_pos
    for e, v in d.items():
        if v.is_zero():
            continue
        if res.restrict_exp(e) is not None and any(e[k] for k in lp):
            return True
    return False


def _restricted_part(chart: CoisotropicChart, d: dict) -> bool:
    res = chart.restriction
    return any(not v.is_zero() and res.restrict_exp(e) is not None for e, v in d.items())


def check_projectable(S: StarProduct, chart: CoisotropicChart, D: int | None = None,
                      max_witnesses: int = 64) -> Report:
    """Subalgebra and two-sided-ideal conditions on spanning monomials to size D.

    ``N(I)`` is spanned by basic monomials (no leaf, no transverse variable)
    together with ideal monomials.  The report records D and every failing
    pair found (up to ``max_witnesses`` per check).
    """
    _same_chart(S, chart)
    if D is None:
        D = default_projectable_degree(S)
    u = chart.universe
    lp, tp = chart.leaf_pos, chart.transverse_pos
    monos = list(iter_monomials(u, D))
    basic = [e for e in monos if not any(e[k] for k in lp + tp)]
    ideal = [e for e in monos if any(e[k] for k in tp)]
    span = basic + ideal
    rep = Report("projectable", scope={"degree": D, "order": S.order,
                                       "basic_monomials": len(basic),
                                       "ideal_monomials": len(ideal)})

    def scan(pairs, bad):
        found = []
        for e1, e2 in pairs:
            for r, d in enumerate(S.mono_product(e1, e2)):
                if bad(d):
                    found.append({"r": r, "f": mono_text(u, e1), "g": mono_text(u, e2)})
                    break
            if len(found) >= max_witnesses:
                break
        return found

    n_fail = scan(((a, b) for a in span for b in span), lambda d: _leaf_dependent(chart, d))
    i_fail = scan(((a, b) for a in ideal for b in ideal), lambda d: _restricted_part(chart, d))
    l_fail = scan(((a, b) for a in span for b in ideal), lambda d: _restricted_part(chart, d))
    r_fail = scan(((a, b) for a in ideal for b in span), lambda d: _restricted_part(chart, d))
    for name, found in (("N(I)[[nu]] subalgebra", n_fail), ("I[[nu]] subalgebra", i_fail),
                        ("N(I) * I in I", l_fail), ("I * N(I) in I", r_fail)):
        rep.add(name, not found, order=found[0]["r"] if found else None,
                witness=found or None)
    return rep


def projectable_witnesses(rep: Report) -> list[tuple[str, str]]:
    out = []
    for r in rep.results:
        for w in r.witness or []:
            out.append((w["f"], w["g"]))
    return out


# -- reduction ------------------------------------------------------------------

def reduced_product(S: StarProduct, chart: CoisotropicChart, verify_degree: int | None = None
                    ) -> StarProduct:
    """Reduced product on the basic chart: ``f_1 *_r f_2 = i^*(f_1 * f_2)``.

    For basic f only terms with basic derivatives in both slots survive, and
    their restricted coefficients must be basic.  Pass ``verify_degree`` to
    run :func:`check_projectable` first.
    """
    _same_chart(S, chart)
    if verify_degree is not None:
        rep = check_projectable(S, chart, verify_degree)
        if not rep.ok:
            raise NotProjectable("product is not projectable", rep.first_failure().witness)
    bc = chart.basic_chart
    bu = bc.universe
    nonbasic = chart.leaf_pos + chart.transverse_pos
    cu = chart.c_universe
    leaf_c = [cu.pos(x) for x in chart.leaf_vars]
    keep = [chart.universe.pos(n) for n in bu.names]
    out = []
    for r, C in enumerate(S.C):
        terms = {}
        for (I, J), c in C.sorted_terms():
            if any(I[k] or J[k] for k in nonbasic):
                continue
            rc = chart.i_star(c)
            if rc.is_zero():
                continue
            if any(any(e[k] for k in leaf_c) for e in rc.terms):
                raise NotProjectable(
                    f"order {r}: restricted coefficient {format_coeff(rc)} depends on a leaf "
                    f"variable", _term_witness(chart, r, (I, J), c))
            key = (tuple(I[k] for k in keep), tuple(J[k] for k in keep))
            terms[key] = rc.project(bu)
        out.append(BiDiffOp(bu, terms))
    return StarProduct(bc, out, (S.name or "product") + "_red")


# -- canonical representation ------------------------------------------------------

def canonical_representation(S: StarProduct, chart: CoisotropicChart) -> RepresentationSeries:
    """``rho(f)(i^* g) = i^*(f * g)`` as explicit operators on C."""
    _same_chart(S, chart)
    bad = _slot_failure(S, chart, 1, S.order)
    if bad is not None:
        raise NotAdapted(f"product not adapted at order {bad[0]}")
    res = chart.restriction
    cpos = [chart.universe.pos(n) for n in res.target.names]
    ops = []
    for C in S.C:
        o = {}
        for (I, J), c in C.terms.items():
            if chart.has_transverse(J):
                continue
            rc = res(c)
            if not rc.is_zero():
                o[(I, tuple(J[k] for k in cpos))] = rc
        ops.append(o)
    return RepresentationSeries(res, ops)


def normalize_representation(rho: RepresentationSeries, S: StarProduct,
                             chart: CoisotropicChart):
    """Return ``(T, S', rho')`` with ``i^*(T f) = rho(f) 1``, ``S' = T(S)`` and
    ``rho' = rho o T^{-1}`` the canonical representation of S'."""
    _same_chart(S, chart)
    if rho.order < S.order:
        raise ValueError("representation truncated below the product order")
    cyc = rho.cyclic_map()[: S.order + 1]
    if not cyc[0].is_identity():
        raise ValueError("rho(.)1 at order 0 is not the restriction map")
    try:
        T = EquivalenceTransform(cyc)
    except ValueError as exc:
        raise ValueError(f"rho(1) is not the identity: {exc}") from None
    S2 = apply_equivalence(T, S)
    inv = T.inverse()
    rho2 = RepresentationSeries(rho.res, rho.ops[: S.order + 1]).precompose(inv.ops)
    return T, S2, rho2
