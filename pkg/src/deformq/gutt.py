"""Gutt star product on the dual of a Lie algebra.

Polynomials on g* are symmetric-algebra elements in the basis symbols.  The
product symmetrizes both factors into the enveloping algebra of
``(g[[nu]], 2nu[,])``, multiplies there in PBW normal order and maps the
result back through the inverse of symmetrization.  Because every commutation
spends one bracket and one power of nu, the result is exact at every order.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .algebra.coeff import CoeffFn, Universe, iter_monomials
from .algebra.scalar import ONE, ZERO, Scalar, parse_scalar
from .algebra.series import NuSeries
from .report import Report
from .starprod.ops import BiDiffOp
from .starprod.star import Chart, StarProduct, as_series

MAX_BCH_DEPTH = 8


class LieAlgebraError(ValueError):
    pass


def _acc(d: dict, key, val: Scalar) -> None:
    w = d.get(key)
    if w is None:
        d[key] = val
    else:
        s = w + val
        if s.is_zero():
            del d[key]
        else:
            d[key] = s


@dataclass(frozen=True, eq=False)
class LieAlgebraData:
    """Basis names and structure constants ``[e_i, e_j] = sum_k c[i, j][k] e_k``.

    Only pairs with ``i < j`` are stored; antisymmetry fills the rest and the
    Jacobi identity is checked on construction.
    """
    names: tuple[str, ...]
    brackets: Mapping[tuple[int, int], Mapping[int, Scalar]]

    def __post_init__(self):
        n = len(self.names)
        if len(set(self.names)) != n:
            raise LieAlgebraError("duplicate basis names")
        table = {}
        for (i, j), row in self.brackets.items():
            if not (0 <= i < n and 0 <= j < n):
                raise LieAlgebraError(f"bracket index ({i}, {j}) out of range")
            row = {k: Scalar.coerce(v) for k, v in row.items() if not Scalar.coerce(v).is_zero()}
            if i == j:
                if row:
                    raise LieAlgebraError(f"[{self.names[i]}, {self.names[i]}] must vanish")
                continue
            if (j, i) in table:
                if table[(j, i)] != {k: -v for k, v in row.items()}:
                    raise LieAlgebraError(f"bracket of {self.names[i]}, {self.names[j]} "
                                          "is not antisymmetric")
                continue
            table[(i, j)] = row
        full = {}
        for (i, j), row in table.items():
            if row:
                full[(i, j)] = row
                full[(j, i)] = {k: -v for k, v in row.items()}
        object.__setattr__(self, "brackets", full)
        bad = self.jacobi_failure()
        if bad is not None:
            raise LieAlgebraError("Jacobi identity fails on " +
                                  ", ".join(self.names[t] for t in bad))

    @cached_property
    def _key(self):
        return (self.names, tuple(sorted((k, tuple(sorted(v.items())))
                                         for k, v in self.brackets.items())))

    def __eq__(self, other):
        return isinstance(other, LieAlgebraData) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    @property
    def n(self) -> int:
        return len(self.names)

    def c(self, i: int, j: int) -> Mapping[int, Scalar]:
        return self.brackets.get((i, j), {})

    def bracket(self, a: Mapping[int, Scalar], b: Mapping[int, Scalar]) -> dict:
        out: dict = {}
        for i, x in a.items():
            for j, y in b.items():
                for k, c in self.c(i, j).items():
                    _acc(out, k, x * y * c)
        return out

    def jacobi_failure(self):
        n = self.n
        for i, j, k in itertools.combinations(range(n), 3):
            ei, ej, ek = ({i: ONE}, {j: ONE}, {k: ONE})
            tot: dict = {}
            for a, b, c in ((ei, ej, ek), (ej, ek, ei), (ek, ei, ej)):
                for m, v in self.bracket(a, self.bracket(b, c)).items():
                    _acc(tot, m, v)
            if tot:
                return (i, j, k)
        return None

    def is_abelian(self) -> bool:
        return not self.brackets

    @classmethod
    def from_table(cls, table: Mapping) -> "LieAlgebraData":
        """``{"basis": [...], "brackets": {"X,Y": {"Z": "1"}}}``; values parse as scalars."""
        names = tuple(table["basis"])
        pos = {n: i for i, n in enumerate(names)}
        br = {}
        for key, row in table.get("brackets", {}).items():
            a, b = (s.strip() for s in key.split(","))
            if a not in pos or b not in pos:
                raise LieAlgebraError(f"unknown basis element in bracket '{key}'")
            br[(pos[a], pos[b])] = {pos[k]: (parse_scalar(v) if isinstance(v, str) else v)
                                    for k, v in row.items()}
        return cls(names, br)

    def to_table(self) -> dict:
        out = {}
        for (i, j), row in sorted(self.brackets.items()):
            if i < j:
                out[f"{self.names[i]},{self.names[j]}"] = {self.names[k]: str(v)
                                                           for k, v in sorted(row.items())}
        return {"basis": list(self.names), "brackets": out}

    @cached_property
    def universe(self) -> Universe:
        return Universe(self.names)

    def linear_poisson(self) -> BiDiffOp:
        """``P = sum c^k_ij x_k d_i (x) d_j`` so that ``C1 - C1^t = 2P``."""
        u = self.universe
        terms = {}
        for (i, j), row in self.brackets.items():
            c = CoeffFn(u, {u.unit(self.names[k]): v for k, v in row.items()})
            terms[(u.unit(self.names[i]), u.unit(self.names[j]))] = c
        return BiDiffOp(u, terms)

    def chart(self) -> Chart:
        return Chart(self.universe, self.linear_poisson(), ())


def heisenberg() -> LieAlgebraData:
    """heis(3): ``[X, Y] = Z``."""
    return LieAlgebraData(("X", "Y", "Z"), {(0, 1): {2: ONE}})


def so3() -> LieAlgebraData:
    """so(3): ``[L1, L2] = L3`` and cyclic."""
    return LieAlgebraData(("L1", "L2", "L3"), {(0, 1): {2: ONE}, (1, 2): {0: ONE},
                                               (2, 0): {1: ONE}})


def abelian(names: Sequence[str]) -> LieAlgebraData:
    return LieAlgebraData(tuple(names), {})


BUILTIN_LIE = {"heis3": heisenberg, "so3": so3}


# -- polynomials on g* -----------------------------------------------------------

class GuttPolynomial:
    """``sum c * nu^k * xi^e`` as ``{(k, e): Scalar}``."""

    __slots__ = ("lie", "terms")

    def __init__(self, lie: LieAlgebraData, terms: Mapping | None = None):
        self.lie = lie
        self.terms = {k: v for k, v in (terms or {}).items() if not v.is_zero()}

    @classmethod
    def basis(cls, lie: LieAlgebraData, i: int, power: int = 1) -> "GuttPolynomial":
        e = tuple(power if j == i else 0 for j in range(lie.n))
        return cls(lie, {(0, e): ONE})

    @classmethod
    def monomial(cls, lie: LieAlgebraData, e, c=1, k: int = 0) -> "GuttPolynomial":
        return cls(lie, {(k, tuple(e)): Scalar.coerce(c)})

    @classmethod
    def from_vector(cls, lie: LieAlgebraData, vec: Mapping[int, Scalar], k: int = 0):
        return cls(lie, {(k, tuple(1 if j == i else 0 for j in range(lie.n))): v
                         for i, v in vec.items()})

    @classmethod
    def from_coeff(cls, lie: LieAlgebraData, f: CoeffFn, k: int = 0) -> "GuttPolynomial":
        if f.universe != lie.universe:
            raise ValueError("polynomial lives on a different universe")
        return cls(lie, {(k, e): v for e, v in f.terms.items()})

    def __eq__(self, other):
        return isinstance(other, GuttPolynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            _acc(out, k, v)
        return GuttPolynomial(self.lie, out)

    def __neg__(self):
        return GuttPolynomial(self.lie, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c, k: int = 0) -> "GuttPolynomial":
        c = Scalar.coerce(c)
        return GuttPolynomial(self.lie, {(a + k, e): v * c for (a, e), v in self.terms.items()})

    def pointwise(self, other: "GuttPolynomial") -> "GuttPolynomial":
        out: dict = {}
        for (k1, e1), v1 in self.terms.items():
            for (k2, e2), v2 in other.terms.items():
                _acc(out, (k1 + k2, tuple(a + b for a, b in zip(e1, e2))), v1 * v2)
        return GuttPolynomial(self.lie, out)

    def degree(self) -> int:
        return max((sum(e) for _, e in self.terms), default=0)

    def nu_order(self) -> int:
        return max((k for k, _ in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def to_series(self, order: int) -> NuSeries:
        u = self.lie.universe
        parts = [dict() for _ in range(order + 1)]
        for (k, e), v in self.terms.items():
            if k > order:
                raise ValueError(f"term of order nu^{k} exceeds the series order {order}")
            parts[k][e] = v
        return NuSeries([CoeffFn(u, p) for p in parts])

    def coeff_at(self, k: int) -> CoeffFn:
        return CoeffFn(self.lie.universe, {e: v for (a, e), v in self.terms.items() if a == k})

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (k, e), v in sorted(self.terms.items()):
            mono = " ".join(f"{n}^{p}" if p > 1 else n
                            for n, p in zip(self.lie.names, e) if p) or "1"
            parts.append(f"({v}) nu^{k} {mono}")
        return " + ".join(parts)

    def __repr__(self):
        return f"GuttPolynomial({self.to_text()})"


# -- enveloping algebra of (g[[nu]], 2nu[,]) -----------------------------------------

class PBWAlgebra:
    """Normal-ordered elements ``{(k, e): Scalar}`` meaning ``nu^k e_1^{e1}...e_n^{en}``."""

    def __init__(self, lie: LieAlgebraData):
        self.lie = lie
        self._right: dict = {}
        self._sym: dict = {}
        self._mono: dict = {}
        self._gutt: dict = {}

    def gutt_monomials(self, e: tuple, f: tuple) -> dict:
        """``xi^e *_G xi^f`` as ``{(k, g): Scalar}``."""
        key = (e, f)
        hit = self._gutt.get(key)
        if hit is None:
            hit = self.to_poly(self.mul(self.symmetrize(e), self.symmetrize(f))).terms
            self._gutt[key] = hit
        return hit

    def right_mul_gen(self, e: tuple, j: int) -> dict:
        """``w_e * e_j`` in normal order, using ``e_m e_j = e_j e_m + 2nu [e_m, e_j]``."""
        key = (e, j)
        hit = self._right.get(key)
        if hit is not None:
            return hit
        m = max((i for i, a in enumerate(e) if a), default=-1)
        if m <= j:
            ne = e[:j] + (e[j] + 1,) + e[j + 1:]
            hit = {(0, ne): ONE}
        else:
            head = e[:m] + (e[m] - 1,) + e[m + 1:]
            hit = {}
            for (k, f), v in self.right_mul_gen(head, j).items():
                for kk, vv in self.right_mul_gen(f, m).items():
                    _acc(hit, (k + kk[0], kk[1]), v * vv)
            for c_idx, c in self.lie.c(m, j).items():
                for (k, f), v in self.right_mul_gen(head, c_idx).items():
                    _acc(hit, (k + 1, f), v * c * 2)
        self._right[key] = hit
        return hit

    def right_mul_word(self, elem: dict, word: Iterable[int]) -> dict:
        cur = elem
        for j in word:
            nxt: dict = {}
            for (k, e), v in cur.items():
                for (kk, f), vv in self.right_mul_gen(e, j).items():
                    _acc(nxt, (k + kk, f), v * vv)
            cur = nxt
        return cur

    @staticmethod
    def word(e: tuple) -> tuple:
        return tuple(i for i, a in enumerate(e) for _ in range(a))

    def mono_mul(self, e: tuple, f: tuple) -> dict:
        key = (e, f)
        hit = self._mono.get(key)
        if hit is None:
            hit = self.right_mul_word({(0, e): ONE}, self.word(f))
            self._mono[key] = hit
        return hit

    def mul(self, a: dict, b: dict) -> dict:
        out: dict = {}
        for (k1, e), v1 in a.items():
            for (k2, f), v2 in b.items():
                for (k, g), v in self.mono_mul(e, f).items():
                    _acc(out, (k1 + k2 + k, g), v1 * v2 * v)
        return out

    def symmetrize(self, e: tuple) -> dict:
        """Normal form of ``(1/k!) sum_perm`` of the letters of ``xi^e``."""
        hit = self._sym.get(e)
        if hit is not None:
            return hit
        k = sum(e)
        out: dict = {}
        if k <= 1:
            out = {(0, e): ONE}
        else:
            # averaging over arrangements = averaging over the last letter
            for i, a in enumerate(e):
                if not a:
                    continue
                head = e[:i] + (a - 1,) + e[i + 1:]
                w = Scalar(a) / k
                for (kk, f), v in self.symmetrize(head).items():
                    for (k2, g), v2 in self.right_mul_gen(f, i).items():
                        _acc(out, (kk + k2, g), v * v2 * w)
        self._sym[e] = out
        return out

    def from_poly(self, P: GuttPolynomial) -> dict:
        out: dict = {}
        for (k, e), v in P.terms.items():
            for (kk, f), vv in self.symmetrize(e).items():
                _acc(out, (k + kk, f), v * vv)
        return out

    def to_poly(self, elem: dict) -> GuttPolynomial:
        """Inverse symmetrization, peeling off the top symmetric degree."""
        rest = dict(elem)
        out: dict = {}
        while rest:
            (k, e), v = max(rest.items(), key=lambda kv: (sum(kv[0][1]), kv[0][1], -kv[0][0]))
            _acc(out, (k, e), v)
            for (kk, f), vv in self.symmetrize(e).items():
                _acc(rest, (k + kk, f), -(v * vv))
        return GuttPolynomial(self.lie, out)


_PBW_CACHE: dict = {}


def pbw_for(lie: LieAlgebraData) -> PBWAlgebra:
    alg = _PBW_CACHE.get(lie)
    if alg is None:
        alg = _PBW_CACHE[lie] = PBWAlgebra(lie)
    return alg


def gutt_mul(P: GuttPolynomial, Q: GuttPolynomial) -> GuttPolynomial:
    if P.lie != Q.lie:
        raise ValueError("polynomials on different Lie algebras")
    alg = pbw_for(P.lie)
    out: dict = {}
    for (k1, e), v1 in P.terms.items():
        for (k2, f), v2 in Q.terms.items():
            v = v1 * v2
            for (k, g), c in alg.gutt_monomials(e, f).items():
                _acc(out, (k1 + k2 + k, g), v * c)
    return GuttPolynomial(P.lie, out)


# -- Baker-Campbell-Hausdorff ---------------------------------------------------------

LieSeries = dict  # {(k, i): Scalar} meaning nu^k e_i


def _lie_bracket_nu(lie: LieAlgebraData, a: LieSeries, b: LieSeries) -> LieSeries:
    """``2nu [a, b]`` on nu-polynomial vectors."""
    out: dict = {}
    for (k1, i), x in a.items():
        for (k2, j), y in b.items():
            for m, c in lie.c(i, j).items():
                _acc(out, (k1 + k2 + 1, m), x * y * c * 2)
    return out


def _compositions_rs(total: int, parts: int):
    """Sequences of ``parts`` pairs ``(r, s)`` with ``r + s >= 1`` summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for t in range(1, total - parts + 2):
        for r in range(t + 1):
            for rest in _compositions_rs(total - t, parts - 1):
                yield ((r, t - r),) + rest


def bch_graded(lie: LieAlgebraData, X: LieSeries, Y: LieSeries, depth: int) -> dict:
    """Dynkin series of ``log(e^X e^Y)`` for the bracket ``2nu[,]``, grouped by
    the number of X and Y letters: ``{(p, q): LieSeries}`` with ``p + q <= depth``."""
    if depth > MAX_BCH_DEPTH:
        raise ValueError(f"BCH depth {depth} exceeds the implemented bound {MAX_BCH_DEPTH}")
    if depth < 1:
        raise ValueError("BCH depth must be at least 1")
    out: dict = {}
    for m in range(1, depth + 1):
        for n in range(1, m + 1):
            sign = 1 if n % 2 else -1
            for seq in _compositions_rs(m, n):
                letters = []
                denom = 1
                for r, s in seq:
                    letters += ["X"] * r + ["Y"] * s
                    denom *= math.factorial(r) * math.factorial(s)
                # right-nested bracket [w1, [w2, ... [w_{m-1}, w_m]]]
                if m > 1 and letters[-1] == letters[-2]:
                    continue
                cur = X if letters[-1] == "X" else Y
                for ch in reversed(letters[:-1]):
                    cur = _lie_bracket_nu(lie, X if ch == "X" else Y, cur)
                    if not cur:
                        break
                if not cur:
                    continue
                coef = Scalar(sign) / (n * m * denom)
                key = (letters.count("X"), letters.count("Y"))
                slot = out.setdefault(key, {})
                for kk, v in cur.items():
                    _acc(slot, kk, v * coef)
    return {k: v for k, v in out.items() if v}


def bch_truncated(lie: LieAlgebraData, X: LieSeries, Y: LieSeries, depth: int = 4) -> LieSeries:
    total: dict = {}
    for part in bch_graded(lie, X, Y, depth).values():
        for k, v in part.items():
            _acc(total, k, v)
    return total


def vector(lie: LieAlgebraData, spec: Mapping[str, object]) -> LieSeries:
    pos = {n: i for i, n in enumerate(lie.names)}
    return {(0, pos[n]): Scalar.coerce(c) for n, c in spec.items() if not Scalar.coerce(c).is_zero()}


def bch_exponential_check(lie: LieAlgebraData, a: int, b: int, depth: int = 4) -> Report:
    """``e_{ta} *_G e_{sb} = e_{H(ta, sb)}`` coefficientwise in ``t^i s^j``, ``i + j <= depth``.

    The left side at ``t^i s^j`` is ``a^i/i! *_G b^j/j!``; the right side
    expands the pointwise exponential of the graded BCH series.
    """
    rep = Report("gutt-bch", scope={"depth": depth, "a": lie.names[a], "b": lie.names[b]})
    H = bch_graded(lie, {(0, a): ONE}, {(0, b): ONE}, depth)
    Hpoly = {pq: _series_to_poly(lie, v) for pq, v in H.items()}
    # exp(H) graded by (i, j): sum over multisets of H-pieces
    expo = {(0, 0): GuttPolynomial.monomial(lie, (0,) * lie.n)}
    power = dict(expo)
    for m in range(1, depth + 1):
        nxt: dict = {}
        for (i, j), P in power.items():
            for (p, q), Hp in Hpoly.items():
                if i + p + j + q > depth:
                    continue
                key = (i + p, j + q)
                nxt[key] = nxt[key] + P.pointwise(Hp) if key in nxt else P.pointwise(Hp)
        power = nxt
        inv = Scalar(1) / math.factorial(m)
        for key, P in power.items():
            expo[key] = expo[key] + P.scale(inv) if key in expo else P.scale(inv)
    ok_all = True
    for i in range(depth + 1):
        for j in range(depth + 1 - i):
            lhs = gutt_mul(GuttPolynomial.basis(lie, a, i).scale(Scalar(1) / math.factorial(i)),
                           GuttPolynomial.basis(lie, b, j).scale(Scalar(1) / math.factorial(j)))
            rhs = expo.get((i, j), GuttPolynomial(lie))
            ok = lhs == rhs
            ok_all &= ok
            if not ok:
                rep.add(f"t^{i} s^{j}", False, witness={"lhs": lhs.to_text(), "rhs": rhs.to_text()})
    rep.add("e_a * e_b = e_H through BCH depth", ok_all, note=f"depth {depth}")
    return rep


def _series_to_poly(lie: LieAlgebraData, v: LieSeries) -> GuttPolynomial:
    terms: dict = {}
    for (k, i), c in v.items():
        _acc(terms, (k, tuple(1 if j == i else 0 for j in range(lie.n))), c)
    return GuttPolynomial(lie, terms)


# -- checks ---------------------------------------------------------------------------

def check_gutt_identities(lie: LieAlgebraData, max_power: int = 5, assoc_degree: int = 4,
                          assoc_total: int | None = None) -> Report:
    """Commutator and power identities on the basis, and associativity on
    monomial triples with each factor of degree <= ``assoc_degree`` (and total
    degree <= ``assoc_total`` when given)."""
    rep = Report("gutt-identities", scope={"algebra": ",".join(lie.names),
                                           "max_power": max_power,
                                           "assoc_degree": assoc_degree,
                                           "assoc_total": assoc_total})
    n = lie.n
    gens = [GuttPolynomial.basis(lie, i) for i in range(n)]
    bad = None
    for i, j in itertools.product(range(n), repeat=2):
        lhs = gutt_mul(gens[i], gens[j]) - gutt_mul(gens[j], gens[i])
        rhs = GuttPolynomial.from_vector(lie, lie.c(i, j), k=1).scale(2)
        if lhs != rhs:
            bad = {"xi": lie.names[i], "eta": lie.names[j], "lhs": lhs.to_text(),
                   "rhs": rhs.to_text()}
            break
    rep.add("xi * eta - eta * xi = 2nu [xi, eta]", bad is None, witness=bad)
    bad = None
    for i in range(n):
        acc = gens[i]
        for k in range(2, max_power + 1):
            acc = gutt_mul(acc, gens[i])
            if acc != GuttPolynomial.basis(lie, i, k):
                bad = {"xi": lie.names[i], "k": k, "got": acc.to_text()}
                break
        if bad:
            break
    rep.add("xi * ... * xi = xi^k", bad is None, witness=bad, note=f"k <= {max_power}")
    monos = list(iter_monomials(lie.universe, assoc_degree))
    bad = None
    count = 0
    for e1, e2, e3 in itertools.product(monos, repeat=3):
        if assoc_total is not None and sum(e1) + sum(e2) + sum(e3) > assoc_total:
            continue
        A, B, C = (GuttPolynomial.monomial(lie, e) for e in (e1, e2, e3))
        count += 1
        if gutt_mul(gutt_mul(A, B), C) != gutt_mul(A, gutt_mul(B, C)):
            bad = {"f": A.to_text(), "g": B.to_text(), "h": C.to_text()}
            break
    rep.add("associativity", bad is None, witness=bad, note=f"{count} monomial triples")
    if lie.is_abelian():
        bad = None
        for e1, e2 in itertools.product(monos, repeat=2):
            A, B = GuttPolynomial.monomial(lie, e1), GuttPolynomial.monomial(lie, e2)
            if gutt_mul(A, B) != A.pointwise(B):
                bad = {"f": A.to_text(), "g": B.to_text()}
                break
        rep.add("abelian: pointwise product", bad is None, witness=bad)
    return rep


def gutt_star(lie: LieAlgebraData, order: int) -> StarProduct:
    """The Gutt product as bidifferential operators ``C_r`` on g*.

    ``C_r`` has order <= r in each argument; its coefficients are fitted
    triangularly from products of monomials of degree <= r.
    """
    u = lie.universe
    ops = []
    for r in range(order + 1):
        monos = sorted(iter_monomials(u, r), key=sum)
        pairs = sorted(itertools.product(monos, repeat=2), key=lambda p: sum(p[0]) + sum(p[1]))
        terms: dict = {}
        for I, J in pairs:
            target = gutt_mul(GuttPolynomial.monomial(lie, I),
                              GuttPolynomial.monomial(lie, J)).coeff_at(r)
            have = BiDiffOp(u, dict(terms)).apply_monomials(I, J) if terms else {}
            resid = target - CoeffFn(u, have)
            if resid.is_zero():
                continue
            fact = math.prod(math.factorial(a) for a in I + J)
            terms[(I, J)] = resid.scale(Scalar(1) / fact)
        ops.append(BiDiffOp(u, terms))
    return StarProduct(lie.chart(), ops, f"gutt[{','.join(lie.names)}]")


def check_gutt_star(lie: LieAlgebraData, S: StarProduct, D: int) -> Report:
    """Operator form agrees with ``gutt_mul`` on monomials of degree <= D through S's order."""
    rep = Report("gutt-operators", scope={"degree": D, "order": S.order})
    bad = None
    for I, J in itertools.product(list(iter_monomials(lie.universe, D)), repeat=2):
        want = gutt_mul(GuttPolynomial.monomial(lie, I), GuttPolynomial.monomial(lie, J))
        got = S(CoeffFn.monomial(lie.universe, I), CoeffFn.monomial(lie.universe, J))
        for r in range(S.order + 1):
            if got[r] != want.coeff_at(r):
                bad = {"I": list(I), "J": list(J), "order": r}
                break
        if bad:
            break
    rep.add("C_r match PBW product", bad is None, witness=bad)
    return rep


def quantum_moment_check(lie: LieAlgebraData, J: Sequence, S: StarProduct, D: int = 2) -> Report:
    """``J[i]`` is ``<J, e_i>`` (a CoeffFn or NuSeries on S's universe).

    Checks ``J_i * J_j - J_j * J_i = 2nu <J, [e_i, e_j]>`` and that
    ``xi^e -> symmetrized *-product of the J's`` intertwines ``gutt_mul`` with S
    on monomials with total degree <= D, through S's order.
    """
    N = S.order
    u = S.universe
    if len(J) != lie.n:
        raise ValueError("J needs one component per basis element")
    Js = [as_series(j, u, N) for j in J]
    zero = CoeffFn.zero(u)

    def lin(vec: Mapping[int, Scalar], k: int) -> NuSeries:
        acc = NuSeries.zeros(zero, N)
        for i, c in vec.items():
            acc = acc + Js[i].map(lambda f, c=c: f.scale(c))
        return acc.shift(k, zero)

    rep = Report("quantum-moment", scope={"degree": D, "order": N, "product": S.name})
    bad = None
    for i, j in itertools.combinations(range(lie.n), 2):
        lhs = S(Js[i], Js[j]) - S(Js[j], Js[i])
        rhs = lin(lie.c(i, j), 1).map(lambda f: f.scale(2))
        if lhs != rhs:
            r = (lhs - rhs).first_nonzero()
            bad = {"xi": lie.names[i], "eta": lie.names[j], "order": r,
                   "lhs": str(lhs[r]), "rhs": str(rhs[r])}
            break
    rep.add("J_xi * J_eta - J_eta * J_xi = 2nu J_[xi,eta]", bad is None, witness=bad)

    cache: dict = {}

    def phi_word(w: tuple) -> NuSeries:
        hit = cache.get(w)
        if hit is None:
            if not w:
                hit = as_series(CoeffFn.one(u), u, N)
            else:
                hit = S(phi_word(w[:-1]), Js[w[-1]])
            cache[w] = hit
        return hit

    def phi(P: GuttPolynomial) -> NuSeries:
        acc = NuSeries.zeros(zero, N)
        for (k, e), v in P.terms.items():
            if k > N:
                continue
            letters = PBWAlgebra.word(e)
            arr = set(itertools.permutations(letters))
            w8 = v * Scalar(math.prod(math.factorial(a) for a in e)) / math.factorial(len(letters))
            part = NuSeries.zeros(zero, N)
            for w in arr:
                part = part + phi_word(w)
            acc = acc + part.map(lambda f, w8=w8: f.scale(w8)).shift(k, zero)
        return acc

    bad = None
    monos = list(iter_monomials(lie.universe, D))
    for e1, e2 in itertools.product(monos, repeat=2):
        if sum(e1) + sum(e2) > D:
            continue
        A, B = GuttPolynomial.monomial(lie, e1), GuttPolynomial.monomial(lie, e2)
        lhs = phi(gutt_mul(A, B))
        rhs = S(phi(A), phi(B))
        if lhs != rhs:
            r = (lhs - rhs).first_nonzero()
            bad = {"f": A.to_text(), "g": B.to_text(), "order": r}
            break
    rep.add("J extends to a morphism from the Gutt product", bad is None, witness=bad,
            note=f"total degree <= {D}")
    return rep
