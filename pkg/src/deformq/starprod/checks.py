"""Exact checkers: star-product axioms, morphisms, representations, bimodules,
and the order-0 Deligne representative on flat charts."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from ..algebra.coeff import CoeffFn, Universe, UniverseError, iter_monomials, mono_derive
from ..algebra.scalar import ONE, ZERO, Scalar
from ..algebra.series import NuSeries
from ..algebra.text import format_coeff
from ..report import Report
from .ops import BiDiffOp, DiffOp, TriDiffOp, _add_idx
from .star import StarProduct, as_series


def mono_text(u: Universe, e) -> str:
    return format_coeff(CoeffFn(u, {tuple(e): ONE}, _trusted=True))


def _raw_add(acc: dict, src: dict, c: Scalar) -> None:
    for e, v in src.items():
        w = acc.get(e)
        acc[e] = v * c if w is None else w + v * c


def _clean(d: dict) -> dict:
    return {e: v for e, v in d.items() if not v.is_zero()}


def _key_text(u: Universe, key) -> list[str]:
    from ..cli.serialize import _index_text
    return [_index_text(u, I) for I in key]


# -- star-product axioms ---------------------------------------------------------

def default_degree(S: StarProduct) -> int:
    return S.max_order() + 2


def check_star_axioms(S: StarProduct, D: int | None = None, method: str = "monomial") -> Report:
    """Exact axiom check; associativity on all monomial triples of size <= D.

    ``method="monomial"`` multiplies out every triple through cached monomial
    products.  ``method="operator"`` composes the associator as a
    tri-differential operator (a proof for all inputs) and then searches the
    same triples for a concrete witness when it is nonzero.
    """
    if D is None:
        D = default_degree(S)
    u = S.universe
    N = S.order
    rep = Report(f"star-axioms[{S.name or 'product'}]",
                 scope={"degree": D, "order": N, "method": method})

    # C_0 is the pointwise product
    rep.add("C0 = pointwise product", S.C[0] == BiDiffOp.identity(u), order=0,
            witness=None if S.C[0] == BiDiffOp.identity(u) else _first_diff(
                u, S.C[0], BiDiffOp.identity(u)))

    # C_r kills constants in both slots
    z = u.zero_exp()
    bad = None
    for r in range(1, N + 1):
        for key, c in S.C[r].sorted_terms():
            if key[0] == z or key[1] == z:
                bad = {"r": r, "term": _key_text(u, key), "coeff": format_coeff(c)}
                break
        if bad:
            break
    rep.add("C_r(1,f) = C_r(f,1) = 0", bad is None, order=bad and bad["r"], witness=bad)

    # antisymmetric part of C_1 is twice the Poisson tensor
    if N >= 1:
        anti = S.C[1] - S.C[1].swap()
        target = S.chart.poisson.scale(2)
        diff = anti - target
        rep.add("C1 - C1^t = 2P", diff.is_zero(), order=1,
                witness=None if diff.is_zero() else _first_diff(u, anti, target))

    monos = list(iter_monomials(u, D))
    if method == "operator":
        _assoc_operator(S, monos, rep)
    else:
        _assoc_monomial(S, monos, rep)
    return rep


def _first_diff(u, A, B) -> dict:
    d = A - B
    key, c = d.sorted_terms()[0]
    return {"term": _key_text(u, key), "difference": format_coeff(c)}


def _star_raw(S: StarProduct, left: Sequence[dict], e3, right_first: bool) -> list[dict]:
    """(sum_r nu^r left_r) * x^e3, or x^e3 * (...) when right_first."""
    N = S.order
    out = [dict() for _ in range(N + 1)]
    for a, la in enumerate(left):
        for m, c in la.items():
            prods = S.mono_product(e3, m) if right_first else S.mono_product(m, e3)
            for b in range(N + 1 - a):
                if prods[b]:
                    _raw_add(out[a + b], prods[b], c)
    return out


def _assoc_monomial(S: StarProduct, monos, rep: Report) -> None:
    u = S.universe
    N = S.order
    witness = None
    worst = None
    for e1 in monos:
        for e2 in monos:
            fg = S.mono_product(e1, e2)
            for e3 in monos:
                gh = S.mono_product(e2, e3)
                left = _star_raw(S, fg, e3, right_first=False)
                right = _star_raw(S, gh, e1, right_first=True)
                for r in range(N + 1):
                    if _clean(left[r]) != _clean(right[r]):
                        if worst is None or r < worst:
                            worst = r
                            witness = {"r": r, "f": mono_text(u, e1), "g": mono_text(u, e2),
                                       "h": mono_text(u, e3)}
                        break
                if worst == 0:
                    break
    rep.add("associativity", witness is None, order=worst, witness=witness,
            note=f"{len(monos) ** 3} monomial triples")


def associator_ops(S: StarProduct) -> list[TriDiffOp]:
    """``A_r = sum_a C_a(C_{r-a}(.,.),.) - C_a(.,C_{r-a}(.,.))`` for r <= N."""
    u = S.universe
    out = []
    for r in range(S.order + 1):
        acc = TriDiffOp.zero(u)
        for a in range(r + 1):
            inner = S.C[r - a]
            if S.C[a].is_zero() or inner.is_zero():
                continue
            acc = acc + S.C[a].compose_slot(0, inner) - S.C[a].compose_slot(1, inner)
        out.append(acc)
    return out


def _assoc_operator(S: StarProduct, monos, rep: Report) -> None:
    u = S.universe
    for r, A in enumerate(associator_ops(S)):
        if A.is_zero():
            continue
        witness = None
        for e1 in monos:
            for e2 in monos:
                for e3 in monos:
                    if A.apply_monomials(e1, e2, e3):
                        witness = {"r": r, "f": mono_text(u, e1), "g": mono_text(u, e2),
                                   "h": mono_text(u, e3)}
                        break
                if witness:
                    break
            if witness:
                break
        if witness is None:
            key, c = A.sorted_terms()[0]
            witness = {"r": r, "associator_term": _key_text(u, key), "coeff": format_coeff(c),
                       "note": "no monomial witness within the degree bound"}
        rep.add("associativity", False, order=r, witness=witness)
        return
    rep.add("associativity", True, note="associator vanishes as an operator")


# -- Deligne order-0 representative ------------------------------------------------

class NonConstantForm(ValueError):
    pass


@dataclass(frozen=True)
class TwoForm:
    """Constant 2-form ``1/2 sum M_ij dx^i ^ dx^j`` on the listed coordinates."""
    names: tuple[str, ...]
    matrix: tuple[tuple[Scalar, ...], ...]

    def is_zero(self) -> bool:
        return all(v.is_zero() for row in self.matrix for v in row)

    def ratio_to(self, other: "TwoForm") -> Scalar | None:
        """``c`` with ``self = c * other``, or None when not proportional."""
        c = None
        for ra, rb in zip(self.matrix, other.matrix):
            for a, b in zip(ra, rb):
                if b.is_zero():
                    if not a.is_zero():
                        return None
                    continue
                q = a / b
                if c is None:
                    c = q
                elif q != c:
                    return None
        return c

    def as_text(self) -> list[list[str]]:
        return [[str(v) for v in row] for row in self.matrix]


def _mat_inverse(M: list[list[Scalar]]) -> list[list[Scalar]]:
    n = len(M)
    A = [list(row) + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not A[r][col].is_zero()), None)
        if piv is None:
            raise ValueError("Poisson tensor is degenerate")
        A[col], A[piv] = A[piv], A[col]
        inv = A[col][col].inverse()
        A[col] = [v * inv for v in A[col]]
        for r in range(n):
            if r != col and not A[r][col].is_zero():
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return [row[n:] for row in A]


def _matmul(A, B):
    n, m, k = len(A), len(B[0]), len(B)
    return [[sum((A[i][t] * B[t][j] for t in range(k)), ZERO) for j in range(m)]
            for i in range(n)]


def poisson_matrix(S: StarProduct) -> list[list[Scalar]]:
    u = S.universe
    n = u.n
    M = [[ZERO] * n for _ in range(n)]
    for (I, J), c in S.chart.poisson.terms.items():
        if sum(I) != 1 or sum(J) != 1 or not c.is_const():
            raise NonConstantForm("Poisson tensor must be constant and first order")
        M[I.index(1)][J.index(1)] = c.const_term()
    return M


def deligne_order0(S: StarProduct) -> TwoForm:
    """Representative ``-(C2^-)#`` of the order-0 class on a flat chart.

    ``M_ab = (C2(x^a, x^b) - C2(x^b, x^a)) / 2`` is ``(C2^-)#(X_a, X_b)`` with
    ``X_a = P(., dx^a)``; undoing the Hamiltonian substitution gives
    ``zeta = P^{-T} M P^{-1}`` and the class representative is ``-zeta``.
    """
    u = S.universe
    if u.angles:
        raise NonConstantForm("flat polynomial chart required")
    if S.order < 2:
        raise ValueError("need C_2")
    n = u.n
    P = poisson_matrix(S)
    C2 = S.C[2]
    M = [[ZERO] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            xa, xb = CoeffFn.var(u, u.names[a]), CoeffFn.var(u, u.names[b])
            v = C2.apply(xa, xb) - C2.apply(xb, xa)
            if not v.is_const():
                raise NonConstantForm(
                    f"C2 antisymmetric part on ({u.names[a]}, {u.names[b]}) is {format_coeff(v)}")
            M[a][b] = v.const_term() / 2
    Pinv = _mat_inverse(P)
    PinvT = [list(r) for r in zip(*Pinv)]
    zeta = _matmul(_matmul(PinvT, M), Pinv)
    return TwoForm(u.names, tuple(tuple(-v for v in row) for row in zeta))


# -- morphisms -------------------------------------------------------------------

class MorphismSeries:
    """``Phi = sum nu^r phi^* o D_r``: differential operators on the source
    followed by pullback along the substitution ``images``."""

    def __init__(self, src: Universe, dst: Universe, ops: Sequence[DiffOp],
                 images: Mapping[str, CoeffFn] | None = None):
        self.src, self.dst = src, dst
        self.ops = tuple(ops)
        self.images = dict(images or {})
        if not self.ops[0].is_identity():
            raise ValueError("order-0 term must be the plain pullback")
        for v in src.names:
            if v not in self.images and v not in dst.index:
                raise UniverseError(f"no image for source variable {v!r}")

    @property
    def order(self) -> int:
        return len(self.ops) - 1

    @classmethod
    def pullback(cls, src: Universe, dst: Universe, order: int, images=None) -> "MorphismSeries":
        return cls(src, dst, [DiffOp.identity(src)] + [DiffOp.zero(src)] * order, images)

    @classmethod
    def from_equivalence(cls, T) -> "MorphismSeries":
        return cls(T.universe, T.universe, T.ops)

    def pull(self, f: CoeffFn) -> CoeffFn:
        return f.substitute(self.images, self.dst)

    def apply(self, f) -> NuSeries:
        N = self.order
        f = as_series(f, self.src, N)
        out = []
        for r in range(N + 1):
            acc = CoeffFn.zero(self.src)
            for a in range(r + 1):
                if not self.ops[a].is_zero() and not f[r - a].is_zero():
                    acc = acc + self.ops[a].apply(f[r - a])
            out.append(self.pull(acc))
        return NuSeries(out)


def check_morphism(phi: MorphismSeries, S_src: StarProduct, S_dst: StarProduct,
                   D: int = 2) -> Report:
    rep = Report("morphism", scope={"degree": D, "order": min(S_src.order, S_dst.order)})
    N = min(S_src.order, S_dst.order, phi.order)
    one = phi.apply(CoeffFn.one(phi.src))
    unit_ok = one[0] == CoeffFn.one(phi.dst) and all(c.is_zero() for c in one.coeffs[1:N + 1])
    rep.add("Phi(1) = 1", unit_ok, order=0 if not unit_ok else None)
    u = S_src.universe
    found = None
    for e1 in iter_monomials(u, D):
        f = CoeffFn(u, {e1: ONE}, _trusted=True)
        pf = phi.apply(f)
        for e2 in iter_monomials(u, D):
            g = CoeffFn(u, {e2: ONE}, _trusted=True)
            lhs = phi.apply(S_src(f, g))
            rhs = S_dst(pf, phi.apply(g))
            for r in range(N + 1):
                if lhs[r] != rhs[r]:
                    found = {"r": r, "f": mono_text(u, e1), "g": mono_text(u, e2),
                             "lhs": format_coeff(lhs[r]), "rhs": format_coeff(rhs[r])}
                    break
            if found:
                break
        if found:
            break
    rep.add("Phi(f*g) = Phi(f)*'Phi(g)", found is None, order=found and found["r"],
            witness=found)
    return rep


# -- representations ---------------------------------------------------------------

class Restriction:
    """Pullback ``i^*`` to ``C = {transverse = 0}`` inside a flat chart."""

    def __init__(self, ambient: Universe, transverse: Sequence[str]):
        self.ambient = ambient
        self.transverse = tuple(transverse)
        for y in self.transverse:
            if ambient.is_angle(y):
                raise UniverseError(f"transverse variable {y!r} cannot be periodic")
        self.target = ambient.sub([n for n in ambient.names if n not in self.transverse])
        self._pos = [ambient.pos(n) for n in self.target.names]
        self._ypos = [ambient.pos(n) for n in self.transverse]

    def __call__(self, f: CoeffFn) -> CoeffFn:
        out = {}
        for e, c in f.terms.items():
            if any(e[k] for k in self._ypos):
                continue
            out[tuple(e[k] for k in self._pos)] = c
        return CoeffFn(self.target, out, _trusted=True)

    def restrict_exp(self, e):
        if any(e[k] for k in self._ypos):
            return None
        return tuple(e[k] for k in self._pos)

    def prolong(self, psi: CoeffFn) -> CoeffFn:
        """Extend a function on C constantly in the transverse directions."""
        return psi.embed(self.ambient)

    def lift_index(self, J) -> tuple[int, ...]:
        e = [0] * self.ambient.n
        for k, v in zip(self._pos, J):
            e[k] = v
        return tuple(e)

    def __eq__(self, other):
        return (isinstance(other, Restriction) and self.ambient == other.ambient
                and self.transverse == other.transverse)

    def __hash__(self):
        return hash((self.ambient, self.transverse))


class RepresentationSeries:
    """``rho(f) psi = sum_r nu^r sum c_IJ (d^I f)|_C d^J psi``.

    ``ops[r]`` maps ``(I, J)`` (I on the ambient chart, J on C) to a
    coefficient function on C.
    """

    def __init__(self, restriction: Restriction, ops: Sequence[Mapping]):
        self.res = restriction
        self.ops = tuple(dict(o) for o in ops)
        for o in self.ops:
            for (I, J), c in list(o.items()):
                if c.universe != restriction.target:
                    raise UniverseError("representation coefficients must live on C")
                if c.is_zero():
                    del o[(I, J)]

    @property
    def order(self) -> int:
        return len(self.ops) - 1

    def __eq__(self, other):
        return isinstance(other, RepresentationSeries) and self.res == other.res and \
            self.ops == other.ops

    @classmethod
    def restriction_only(cls, res: Restriction, order: int) -> "RepresentationSeries":
        z_m, z_c = res.ambient.zero_exp(), res.target.zero_exp()
        ops = [{(z_m, z_c): CoeffFn.one(res.target)}] + [{} for _ in range(order)]
        return cls(res, ops)

    def apply_op(self, r: int, f: CoeffFn, psi: CoeffFn) -> CoeffFn:
        out = CoeffFn.zero(self.res.target)
        fcache, pcache = {}, {}
        for (I, J), c in self.ops[r].items():
            df = fcache.get(I)
            if df is None:
                df = fcache[I] = self.res(f.derive_multi(I))
            if df.is_zero():
                continue
            dp = pcache.get(J)
            if dp is None:
                dp = pcache[J] = psi.derive_multi(J)
            if dp.is_zero():
                continue
            out = out + c * df * dp
        return out

    def apply(self, f, psi) -> NuSeries:
        N = self.order
        f = as_series(f, self.res.ambient, N)
        psi = as_series(psi, self.res.target, N)
        out = []
        for r in range(N + 1):
            acc = CoeffFn.zero(self.res.target)
            for a in range(r + 1):
                for b in range(r - a + 1):
                    c = r - a - b
                    if f[b].is_zero() or psi[c].is_zero():
                        continue
                    acc = acc + self.apply_op(a, f[b], psi[c])
            out.append(acc)
        return NuSeries(out)

    def __call__(self, f, psi) -> NuSeries:
        return self.apply(f, psi)

    def cyclic_map(self) -> list[DiffOp]:
        """``f -> rho(f) 1`` as differential operators on the ambient chart,
        coefficients prolonged off C."""
        u = self.res.ambient
        z_c = self.res.target.zero_exp()
        out = []
        for o in self.ops:
            terms = {}
            for (I, J), c in o.items():
                if J == z_c:
                    terms[(I,)] = self.res.prolong(c)
            out.append(DiffOp(u, terms))
        return out

    def precompose(self, T: Sequence[DiffOp]) -> "RepresentationSeries":
        """``f -> rho(T f)`` for a series of ambient differential operators."""
        N = self.order
        res = self.res
        out = [dict() for _ in range(N + 1)]
        for a in range(N + 1):
            for b in range(N + 1 - a):
                if T[b].is_zero():
                    continue
                for (I, J), c in self.ops[a].items():
                    # d^I (t(x) d^K f) restricted to C
                    for (K,), t in T[b].terms.items():
                        from .ops import leibniz_splits
                        for (I0, I1), w in leibniz_splits(I, 2):
                            dt = res(t.derive_multi(I0))
                            if dt.is_zero():
                                continue
                            key = (_add_idx(I1, K), J)
                            v = (c * dt).scale(w)
                            out[a + b][key] = out[a + b][key] + v if key in out[a + b] else v
        return RepresentationSeries(res, out)


def check_representation(rho: RepresentationSeries, S: StarProduct, D: int = 2) -> Report:
    """``rho(f*g) = rho(f) rho(g)`` and ``rho(1) = id`` on monomials to size D."""
    res = rho.res
    N = min(rho.order, S.order)
    rep = Report("representation", scope={"degree": D, "order": N})
    um, uc = res.ambient, res.target
    psis = [CoeffFn(uc, {e: ONE}, _trusted=True) for e in iter_monomials(uc, D)]
    one = CoeffFn.one(um)
    bad = None
    for psi in psis:
        out = rho(one, psi)
        for r in range(N + 1):
            want = psi if r == 0 else CoeffFn.zero(uc)
            if out[r] != want:
                bad = {"r": r, "psi": format_coeff(psi), "got": format_coeff(out[r])}
                break
        if bad:
            break
    rep.add("rho(1) = id", bad is None, order=bad and bad["r"], witness=bad)

    monos = [CoeffFn(um, {e: ONE}, _trusted=True) for e in iter_monomials(um, D)]
    found = None
    for f in monos:
        for g in monos:
            fg = S(f, g)
            for psi in psis:
                lhs = rho(fg, psi)
                rhs = rho(f, rho(g, psi))
                for r in range(N + 1):
                    if lhs[r] != rhs[r]:
                        found = {"r": r, "f": format_coeff(f), "g": format_coeff(g),
                                 "psi": format_coeff(psi), "lhs": format_coeff(lhs[r]),
                                 "rhs": format_coeff(rhs[r])}
                        break
                if found:
                    break
            if found:
                break
        if found:
            break
    rep.add("rho(f*g) = rho(f) rho(g)", found is None, order=found and found["r"],
            witness=found)
    return rep


def check_bimodule(rho: RepresentationSeries, rho_right, D: int = 2) -> Report:
    """The two actions commute: ``rho(f)(rho~(h) psi) = rho~(h)(rho(f) psi)``.

    ``rho_right`` is any object with ``.apply(h, psi)``, ``.order`` and an
    ambient universe ``.res.ambient`` (or ``.ambient``) for the test inputs.
    """
    uc = rho.res.target
    amb2 = rho_right.res.ambient if hasattr(rho_right, "res") else rho_right.ambient
    N = min(rho.order, rho_right.order)
    rep = Report("bimodule", scope={"degree": D, "order": N})
    found = None
    for e1 in iter_monomials(rho.res.ambient, D):
        f = CoeffFn(rho.res.ambient, {e1: ONE}, _trusted=True)
        for e2 in iter_monomials(amb2, D):
            h = CoeffFn(amb2, {e2: ONE}, _trusted=True)
            for e3 in iter_monomials(uc, D):
                psi = CoeffFn(uc, {e3: ONE}, _trusted=True)
                a = rho.apply(f, rho_right.apply(h, psi))
                b = rho_right.apply(h, rho.apply(f, psi))
                for r in range(N + 1):
                    if a[r] != b[r]:
                        found = {"r": r, "f": format_coeff(f), "h": format_coeff(h),
                                 "psi": format_coeff(psi)}
                        break
                if found:
                    break
            if found:
                break
        if found:
            break
    rep.add("actions commute", found is None, order=found and found["r"], witness=found)
    return rep
