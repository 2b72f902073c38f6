"""Multi-differential operators with coefficient functions, in normal form.

An operator of arity k is a finite sum ``c(x) * d^{I_1} (.) ... d^{I_k} (.)``
stored as ``{(I_1, ..., I_k): c}`` with dense multi-indices aligned to the
universe.  At most one term per index tuple; zero coefficients are dropped.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product as _cartesian
from math import comb
from typing import Iterable, Mapping, Sequence

from ..algebra.coeff import CoeffFn, Universe, UniverseError, glex_key, mono_derive
from ..algebra.scalar import ONE, ZERO, Scalar

Index = tuple[int, ...]


def _add_idx(a: Index, b: Index) -> Index:
    return tuple(x + y for x, y in zip(a, b))


@lru_cache(maxsize=None)
def _var_splits(n: int, parts: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Compositions of n into ``parts`` ordered parts with multinomial weights."""
    if parts == 1:
        return (((n,), 1),)
    out = []
    for first in range(n + 1):
        for rest, w in _var_splits(n - first, parts - 1):
            out.append(((first,) + rest, w * comb(n, first)))
    return tuple(out)


@lru_cache(maxsize=None)
def leibniz_splits(K: Index, parts: int) -> tuple[tuple[tuple[Index, ...], int], ...]:
    """All ways to write K = K_0 + ... + K_{parts-1}, with multinomial weights."""
    per_var = [_var_splits(k, parts) for k in K]
    out = []
    for choice in _cartesian(*per_var):
        w = 1
        for _, wv in choice:
            w *= wv
        pieces = tuple(tuple(c[0][j] for c in choice) for j in range(parts))
        out.append((pieces, w))
    return tuple(out)


class MultiDiffOp:
    arity = 0
    __slots__ = ("universe", "terms")

    def __init__(self, universe: Universe, terms: Mapping | None = None, *, _trusted=False):
        self.universe = universe
        if _trusted:
            self.terms = terms
            return
        clean: dict = {}
        for key, c in (terms or {}).items():
            key = tuple(tuple(i) for i in key)
            if len(key) != self.arity or any(len(i) != universe.n for i in key):
                raise UniverseError(f"bad index tuple {key} for arity {self.arity}")
            if any(k < 0 for i in key for k in i):
                raise ValueError("derivative orders must be non-negative")
            if not isinstance(c, CoeffFn):
                c = CoeffFn.const(universe, c)
            elif c.universe != universe:
                raise UniverseError("coefficient universe mismatch")
            if c.is_zero():
                continue
            prev = clean.get(key)
            c = c if prev is None else prev + c
            if c.is_zero():
                clean.pop(key, None)
            else:
                clean[key] = c
        self.terms = clean

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, u: Universe):
        return cls(u, {}, _trusted=True)

    @classmethod
    def identity(cls, u: Universe):
        z = u.zero_exp()
        return cls(u, {(z,) * cls.arity: CoeffFn.one(u)}, _trusted=True)

    @classmethod
    def from_spec(cls, u: Universe, items: Iterable[tuple]):
        """Build from ``(coeff, spec_1, ..., spec_k)`` with specs like ``{"q": 2}``."""
        terms: dict = {}
        for item in items:
            c, specs = item[0], item[1:]
            key = tuple(u.multi_index(s) for s in specs)
            if not isinstance(c, CoeffFn):
                c = CoeffFn.const(u, c)
            terms[key] = terms[key] + c if key in terms else c
        return cls(u, terms)

    def _new(self, terms: dict):
        return type(self)(self.universe, terms, _trusted=True)

    # -- queries -----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_identity(self) -> bool:
        z = self.universe.zero_exp()
        return (len(self.terms) == 1 and self.terms.get((z,) * self.arity) is not None
                and self.terms[(z,) * self.arity] == CoeffFn.one(self.universe))

    def is_constant(self) -> bool:
        return all(c.is_const() for c in self.terms.values())

    def max_order(self) -> int:
        return max((sum(i) for key in self.terms for i in key), default=0)

    def max_coeff_degree(self) -> int:
        return max((c.degree() for c in self.terms.values()), default=0)

    def sorted_terms(self):
        return sorted(self.terms.items(),
                      key=lambda t: (sum(sum(i) for i in t[0]), [glex_key(i) for i in t[0]]))

    def __eq__(self, other):
        if not isinstance(other, MultiDiffOp):
            return NotImplemented
        return (self.arity == other.arity and self.universe == other.universe
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.arity, self.universe, frozenset(self.terms.items())))

    # -- linear structure --------------------------------------------------
    def _check(self, other):
        if not isinstance(other, MultiDiffOp) or other.arity != self.arity:
            raise TypeError("operator arity mismatch")
        if other.universe != self.universe:
            raise UniverseError(
                f"universe mismatch: {self.universe.names} vs {other.universe.names}")

    def __add__(self, other):
        self._check(other)
        if not other.terms:
            return self
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k)
            v = c if v is None else v + c
            if v.is_zero():
                out.pop(k, None)
            else:
                out[k] = v
        return self._new(out)

    def __neg__(self):
        return self._new({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "MultiDiffOp":
        """Multiply every coefficient by a scalar or a coefficient function."""
        if isinstance(c, CoeffFn):
            return type(self)(self.universe, {k: v * c for k, v in self.terms.items()})
        c = Scalar.coerce(c)
        if c.is_zero():
            return self.zero(self.universe)
        return self._new({k: v.scale(c) for k, v in self.terms.items()})

    def map_coeffs(self, fn) -> "MultiDiffOp":
        return type(self)(self.universe, {k: fn(v) for k, v in self.terms.items()})

    # -- evaluation --------------------------------------------------------
    def apply(self, *fs: CoeffFn) -> CoeffFn:
        if len(fs) != self.arity:
            raise TypeError(f"expected {self.arity} arguments")
        for f in fs:
            if f.universe != self.universe:
                raise UniverseError(
                    f"universe mismatch: {f.universe.names} vs {self.universe.names}")
        caches = [dict() for _ in fs]
        out = CoeffFn.zero(self.universe)
        for key, c in self.terms.items():
            prod = c
            for j, (I, f) in enumerate(zip(key, fs)):
                d = caches[j].get(I)
                if d is None:
                    d = caches[j][I] = f.derive_multi(I)
                if d.is_zero():
                    prod = None
                    break
                prod = prod * d
            if prod is not None:
                out = out + prod
        return out

    def apply_monomials(self, *exps: Index) -> dict:
        """Raw evaluation on monomials: returns ``{exponent: Scalar}``."""
        mask = self.universe.angle_mask()
        out: dict = {}
        for key, c in self.terms.items():
            fac = ONE
            e_tot = None
            for I, e in zip(key, exps):
                r = mono_derive(e, I, mask)
                if r is None:
                    break
                fac = fac * r[0]
                e_tot = r[1] if e_tot is None else _add_idx(e_tot, r[1])
            else:
                for ce, cv in c.terms.items():
                    e = _add_idx(ce, e_tot)
                    v = cv * fac
                    w = out.get(e)
                    out[e] = v if w is None else w + v
        return {e: v for e, v in out.items() if not v.is_zero()}

    # -- composition -------------------------------------------------------
    def compose_outer(self, D: "DiffOp") -> "MultiDiffOp":
        """``D o self``: apply the differential operator D to the output."""
        if D.universe != self.universe:
            raise UniverseError("universe mismatch in composition")
        if D.is_identity():
            return self
        k = self.arity
        acc: dict = {}
        for (K,), d in D.terms.items():
            for key, c in self.terms.items():
                for pieces, w in leibniz_splits(K, k + 1):
                    dc = c.derive_multi(pieces[0])
                    if dc.is_zero():
                        continue
                    nk = tuple(_add_idx(I, P) for I, P in zip(key, pieces[1:]))
                    t = (d * dc).scale(w)
                    prev = acc.get(nk)
                    acc[nk] = t if prev is None else prev + t
        return type(self)(self.universe, acc)

    def compose_slot(self, j: int, E: "MultiDiffOp") -> "MultiDiffOp":
        """Substitute the operator E into argument slot j."""
        if E.universe != self.universe:
            raise UniverseError("universe mismatch in composition")
        k = self.arity + E.arity - 1
        cls = op_class(k)
        if E.arity == 1 and E.is_identity():
            return self
        acc: dict = {}
        for key, c in self.terms.items():
            I = key[j]
            splits = leibniz_splits(I, E.arity + 1)
            for ekey, e in E.terms.items():
                for pieces, w in splits:
                    de = e.derive_multi(pieces[0])
                    if de.is_zero():
                        continue
                    inner = tuple(_add_idx(L, P) for L, P in zip(ekey, pieces[1:]))
                    nk = key[:j] + inner + key[j + 1:]
                    t = (c * de).scale(w)
                    prev = acc.get(nk)
                    acc[nk] = t if prev is None else prev + t
        return cls(self.universe, acc)

    def permute(self, perm: Sequence[int]) -> "MultiDiffOp":
        """Reorder slots: new slot j reads old slot perm[j]."""
        return self._new({tuple(key[p] for p in perm): c for key, c in self.terms.items()})

    def embed(self, target: Universe) -> "MultiDiffOp":
        pos = [target.pos(n) for n in self.universe.names]

        def move(I):
            e = [0] * target.n
            for p, v in zip(pos, I):
                e[p] = v
            return tuple(e)

        return type(self)(target, {tuple(move(I) for I in key): c.embed(target)
                                   for key, c in self.terms.items()}, _trusted=True)

    def __repr__(self):
        from ..cli.serialize import format_op
        return f"{type(self).__name__}<{format_op(self)}>"


class DiffOp(MultiDiffOp):
    arity = 1

    def __call__(self, f: CoeffFn) -> CoeffFn:
        return self.apply(f)

    def then(self, other: "DiffOp") -> "DiffOp":
        """``other o self``."""
        return self.compose_outer(other)

    def kills_constants(self) -> bool:
        return (self.universe.zero_exp(),) not in self.terms


class BiDiffOp(MultiDiffOp):
    arity = 2

    def swap(self) -> "BiDiffOp":
        return self.permute((1, 0))


class TriDiffOp(MultiDiffOp):
    arity = 3


class QuadDiffOp(MultiDiffOp):
    arity = 4


_CLASSES = {1: DiffOp, 2: BiDiffOp, 3: TriDiffOp, 4: QuadDiffOp}


def op_class(arity: int):
    try:
        return _CLASSES[arity]
    except KeyError:
        cls = type(f"DiffOp{arity}", (MultiDiffOp,), {"arity": arity, "__slots__": ()})
        _CLASSES[arity] = cls
        return cls


def apply_bidiffop(C: BiDiffOp, f: CoeffFn, g: CoeffFn) -> CoeffFn:
    return C.apply(f, g)


def const_symbol_mul(A: MultiDiffOp, B: MultiDiffOp) -> MultiDiffOp:
    """Composition of constant-coefficient operators (symbols multiply)."""
    if not (A.is_constant() and B.is_constant()):
        raise ValueError("symbol multiplication needs constant coefficients")
    A._check(B)
    acc: dict = {}
    for k1, c1 in A.terms.items():
        s1 = c1.const_term()
        for k2, c2 in B.terms.items():
            key = tuple(_add_idx(a, b) for a, b in zip(k1, k2))
            acc[key] = acc.get(key, ZERO) + s1 * c2.const_term()
    u = A.universe
    return type(A)(u, {k: CoeffFn.const(u, v) for k, v in acc.items() if not v.is_zero()})


def exp_symbol_series(E: Sequence[MultiDiffOp], order: int) -> list[MultiDiffOp]:
    """``exp(E)`` for a series ``E = sum_{r>=1} nu^r E_r`` of constant symbols."""
    if E and not E[0].is_zero():
        raise ValueError("exponent must start at order 1")
    cls = type(E[1]) if len(E) > 1 else type(E[0])
    u = E[0].universe if E else None
    E = list(E) + [cls.zero(u)] * (order + 1 - len(E))
    result = [cls.identity(u)] + [cls.zero(u) for _ in range(order)]
    power = list(result)  # E^0
    fact = 1
    for k in range(1, order + 1):
        new = [cls.zero(u) for _ in range(order + 1)]
        for a in range(order + 1):
            if power[a].is_zero():
                continue
            for b in range(1, order + 1 - a):
                if not E[b].is_zero():
                    new[a + b] = new[a + b] + const_symbol_mul(power[a], E[b])
        power = new
        fact *= k
        inv = Scalar(1) / fact
        result = [r + p.scale(inv) for r, p in zip(result, power)]
    return result


# -- series of operators ----------------------------------------------------------

def compose_series(A: Sequence[DiffOp], B: Sequence[DiffOp]) -> list[DiffOp]:
    """``(A o B)_r = sum_a A_a o B_{r-a}``."""
    n = len(A) - 1
    u = A[0].universe
    out = []
    for r in range(n + 1):
        acc = DiffOp.zero(u)
        for a in range(r + 1):
            if A[a].is_zero() or B[r - a].is_zero():
                continue
            acc = acc + B[r - a].compose_outer(A[a])
        out.append(acc)
    return out


def inverse_series(T: Sequence[DiffOp]) -> list[DiffOp]:
    """Inverse of ``id + X`` by the nu-adic geometric series."""
    n = len(T) - 1
    u = T[0].universe
    if not T[0].is_identity():
        raise ValueError("order-0 term must be the identity")
    X = [DiffOp.zero(u)] + list(T[1:])
    neg = [DiffOp.zero(u)] + [-x for x in X[1:]]
    result = [DiffOp.identity(u)] + [DiffOp.zero(u)] * n
    power = list(result)
    for _ in range(n):
        power = compose_series(power, neg)
        if all(p.is_zero() for p in power):
            break
        result = [a + b for a, b in zip(result, power)]
    return result


def exp_series(X: Sequence[DiffOp], order: int) -> list[DiffOp]:
    """``exp(X)`` for ``X = sum_{r>=1} nu^r X_r`` under composition."""
    u = X[0].universe
    X = list(X) + [DiffOp.zero(u)] * (order + 1 - len(X))
    X = X[: order + 1]
    if not X[0].is_zero():
        raise ValueError("exponent must start at order 1")
    result = [DiffOp.identity(u)] + [DiffOp.zero(u)] * order
    power = list(result)
    fact = 1
    for k in range(1, order + 1):
        power = compose_series(power, X)
        fact *= k
        inv = Scalar(1) / fact
        result = [r + p.scale(inv) for r, p in zip(result, power)]
    return result
