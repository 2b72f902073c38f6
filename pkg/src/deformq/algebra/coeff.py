"""Polynomial and Laurent coefficient functions on a fixed variable universe.

Exponent vectors are dense tuples aligned with the universe.  Angle
coordinates (declared periodic) carry the exponent of the unit
``e^{i*phi}``; their exponents may be negative and their derivative is
``d/dphi e^{ik phi} = ik e^{ik phi}``, i.e. ``i*u*d/du`` on ``u = e^{i phi}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import product as _cartesian
from typing import Iterable, Iterator, Mapping

from .scalar import I, ONE, ZERO, Scalar


class Flavor(Enum):
    POLY = "POLY"
    LAURENT = "LAURENT"
    EXPPOLY = "EXPPOLY"


class FlavorError(TypeError):
    pass


class UniverseError(ValueError):
    pass


@dataclass(frozen=True)
class Universe:
    names: tuple[str, ...]
    angles: frozenset[str] = frozenset()
    index: Mapping[str, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "angles", frozenset(self.angles))
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise UniverseError(f"duplicate variable(s): {', '.join(dup)}")
        for a in self.angles:
            if a not in names:
                raise UniverseError(f"angle {a!r} is not a declared variable")
        object.__setattr__(self, "index", {n: k for k, n in enumerate(names)})

    @property
    def n(self) -> int:
        return len(self.names)

    def is_angle(self, name: str) -> bool:
        return name in self.angles

    def angle_mask(self) -> tuple[bool, ...]:
        return tuple(n in self.angles for n in self.names)

    def pos(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise UniverseError(f"unknown variable {name!r}") from None

    def zero_exp(self) -> tuple[int, ...]:
        return (0,) * len(self.names)

    def unit(self, name: str, k: int = 1) -> tuple[int, ...]:
        e = [0] * len(self.names)
        e[self.pos(name)] = k
        return tuple(e)

    def multi_index(self, spec: Mapping[str, int] | Iterable[str]) -> tuple[int, ...]:
        """Dense exponent tuple from ``{"q": 2}`` or ``["q", "q"]``."""
        e = [0] * len(self.names)
        items = spec.items() if isinstance(spec, Mapping) else ((v, 1) for v in spec)
        for v, k in items:
            e[self.pos(v)] += k
        return tuple(e)

    def union(self, other: "Universe") -> "Universe":
        clash = set(self.names) & set(other.names)
        if clash:
            raise UniverseError(f"variable collision: {', '.join(sorted(clash))}")
        return Universe(self.names + other.names, self.angles | other.angles)

    def sub(self, names: Iterable[str]) -> "Universe":
        keep = [n for n in self.names if n in set(names)]
        return Universe(tuple(keep), frozenset(a for a in self.angles if a in keep))


def order(e: tuple[int, ...]) -> int:
    return sum(e)


def size(e: tuple[int, ...]) -> int:
    return sum(abs(k) for k in e)


def glex_key(e: tuple[int, ...]):
    # graded lex: lower total size first, then larger leading exponents first
    return (size(e), tuple(-k for k in e))


def _falling(n: int, k: int) -> int:
    out = 1
    for j in range(k):
        out *= n - j
    return out


def mono_derive(e: tuple[int, ...], idx: tuple[int, ...], angles: tuple[bool, ...]):
    """``d^idx x^e`` as ``(factor, exponent)``; None when it vanishes."""
    fac_int = 1
    ipow = 0
    new = list(e)
    for k, (ek, ik) in enumerate(zip(e, idx)):
        if ik == 0:
            continue
        if angles[k]:
            if ek == 0:
                return None
            fac_int *= ek ** ik
            ipow += ik
        else:
            if ik > ek:
                return None
            fac_int *= _falling(ek, ik)
            new[k] = ek - ik
    fac = Scalar._raw(fac_int, 0, 1)
    if ipow % 4:
        fac = fac * (I ** (ipow % 4))
    return fac, tuple(new)


def mono_mul(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(x + y for x, y in zip(a, b))


class CoeffFn:
    """Immutable exact polynomial / Laurent polynomial.

    ``terms`` maps dense exponent tuples to nonzero Scalars.
    """

    __slots__ = ("universe", "terms", "_hash")

    def __init__(self, universe: Universe, terms: Mapping[tuple[int, ...], object] | None = None,
                 *, _trusted: bool = False):
        self.universe = universe
        if _trusted:
            self.terms = terms
        else:
            clean = {}
            n = universe.n
            mask = universe.angle_mask()
            for e, c in (terms or {}).items():
                e = tuple(e)
                if len(e) != n:
                    raise UniverseError(f"exponent {e} does not match universe {universe.names}")
                for k, ek in enumerate(e):
                    if ek < 0 and not mask[k]:
                        raise FlavorError(
                            f"negative exponent on non-periodic variable {universe.names[k]!r}")
                c = Scalar.coerce(c)
                if not c.is_zero():
                    clean[e] = clean.get(e, ZERO) + c
                    if clean[e].is_zero():
                        del clean[e]
            self.terms = clean
        self._hash = None

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, u: Universe) -> "CoeffFn":
        return cls(u, {}, _trusted=True)

    @classmethod
    def const(cls, u: Universe, c=1) -> "CoeffFn":
        c = Scalar.coerce(c)
        return cls(u, {} if c.is_zero() else {u.zero_exp(): c}, _trusted=True)

    @classmethod
    def one(cls, u: Universe) -> "CoeffFn":
        return cls.const(u, ONE)

    @classmethod
    def var(cls, u: Universe, name: str, k: int = 1) -> "CoeffFn":
        return cls(u, {u.unit(name, k): ONE}, _trusted=True)

    @classmethod
    def monomial(cls, u: Universe, e: tuple[int, ...], c=1) -> "CoeffFn":
        return cls(u, {tuple(e): c})

    @classmethod
    def from_spec(cls, u: Universe, spec: Mapping[str, int], c=1) -> "CoeffFn":
        return cls(u, {u.multi_index(spec): c})

    # -- basic queries -----------------------------------------------------
    @property
    def flavor(self) -> Flavor:
        return Flavor.LAURENT if self.universe.angles else Flavor.POLY

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.universe.zero_exp() in self.terms)

    def const_term(self) -> Scalar:
        return self.terms.get(self.universe.zero_exp(), ZERO)

    def degree(self) -> int:
        return max((size(e) for e in self.terms), default=-1)

    def depends_on(self, name: str) -> bool:
        k = self.universe.pos(name)
        return any(e[k] != 0 for e in self.terms)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Scalar]]:
        return sorted(self.terms.items(), key=lambda t: glex_key(t[0]))

    def __eq__(self, other):
        if isinstance(other, CoeffFn):
            return self.universe == other.universe and self.terms == other.terms
        if isinstance(other, (int, Scalar)):
            return self == CoeffFn.const(self.universe, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.universe, frozenset(self.terms.items())))
        return self._hash

    def _check(self, other: "CoeffFn"):
        if not isinstance(other, CoeffFn):
            raise FlavorError(f"cannot combine CoeffFn with {type(other).__name__}")
        if other.universe != self.universe:
            raise UniverseError(
                f"universe mismatch: {self.universe.names} vs {other.universe.names}")

    # -- ring operations ---------------------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, Scalar)):
            other = CoeffFn.const(self.universe, other)
        self._check(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v.is_zero():
                    del out[e]
                else:
                    out[e] = v
        return CoeffFn(self.universe, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return CoeffFn(self.universe, {e: -c for e, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        if isinstance(other, (int, Scalar)):
            other = CoeffFn.const(self.universe, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "CoeffFn":
        c = Scalar.coerce(c)
        if c.is_zero():
            return CoeffFn.zero(self.universe)
        return CoeffFn(self.universe, {e: v * c for e, v in self.terms.items()}, _trusted=True)

    def __mul__(self, other):
        if isinstance(other, (int, Scalar)):
            return self.scale(other)
        self._check(other)
        if not self.terms or not other.terms:
            return CoeffFn.zero(self.universe)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                v = c1 * c2
                w = out.get(e)
                out[e] = v if w is None else w + v
        return CoeffFn(self.universe, {e: c for e, c in out.items() if not c.is_zero()},
                       _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = CoeffFn.one(self.universe)
        for _ in range(k):
            out = out * self
        return out

    # -- calculus ----------------------------------------------------------
    def derive(self, name: str, k: int = 1) -> "CoeffFn":
        return self.derive_multi(self.universe.unit(name, k))

    def derive_multi(self, idx: tuple[int, ...]) -> "CoeffFn":
        if not any(idx):
            return self
        mask = self.universe.angle_mask()
        out: dict = {}
        for e, c in self.terms.items():
            r = mono_derive(e, idx, mask)
            if r is None:
                continue
            fac, ne = r
            v = c * fac
            w = out.get(ne)
            out[ne] = v if w is None else w + v
        return CoeffFn(self.universe, {e: c for e, c in out.items() if not c.is_zero()},
                       _trusted=True)

    # -- variable bookkeeping ----------------------------------------------
    def restrict_zero(self, names: Iterable[str]) -> "CoeffFn":
        """Set the listed (polynomial) variables to zero; universe unchanged."""
        ks = [self.universe.pos(n) for n in names]
        for n in names:
            if self.universe.is_angle(n):
                raise FlavorError(f"cannot set periodic variable {n!r} to zero")
        return CoeffFn(self.universe, {e: c for e, c in self.terms.items()
                                       if all(e[k] == 0 for k in ks)}, _trusted=True)

    def project(self, target: Universe) -> "CoeffFn":
        """Re-express in a sub-universe; dropped variables must not occur."""
        pos = [self.universe.pos(n) for n in target.names]
        dropped = [k for k in range(self.universe.n) if k not in set(pos)]
        out = {}
        for e, c in self.terms.items():
            if any(e[k] for k in dropped):
                bad = [self.universe.names[k] for k in dropped if e[k]]
                raise UniverseError(f"cannot drop variable(s) {bad} that occur")
            out[tuple(e[k] for k in pos)] = c
        return CoeffFn(target, out, _trusted=True)

    def embed(self, target: Universe) -> "CoeffFn":
        """Re-express in a universe containing every variable of this one."""
        if target == self.universe:
            return self
        pos = [target.pos(n) for n in self.universe.names]
        for n in self.universe.angles:
            if not target.is_angle(n):
                raise UniverseError(f"{n!r} is periodic here but not in the target")
        out = {}
        z = [0] * target.n
        for e, c in self.terms.items():
            ne = list(z)
            for k, ek in zip(pos, e):
                ne[k] = ek
            out[tuple(ne)] = c
        return CoeffFn(target, out, _trusted=True)

    def substitute(self, images: Mapping[str, "CoeffFn"], target: Universe) -> "CoeffFn":
        """Pull back along ``v -> images[v]`` (missing variables map to themselves).

        Periodic variables need monomial images with coefficient 1 so that
        negative powers stay exact.
        """
        imgs = []
        for n in self.universe.names:
            img = images.get(n)
            if img is None:
                img = CoeffFn.var(target, n)
            if self.universe.is_angle(n):
                if len(img.terms) != 1 or next(iter(img.terms.values())) != ONE:
                    raise FlavorError(f"periodic variable {n!r} needs a unit monomial image")
            imgs.append(img)
        cache: dict = {}

        def power(k: int, p: int) -> CoeffFn:
            key = (k, p)
            if key not in cache:
                if p < 0:
                    (e, _), = imgs[k].terms.items()
                    cache[key] = CoeffFn(target, {tuple(-p * x for x in e): ONE}, _trusted=True)
                else:
                    cache[key] = imgs[k] ** p
            return cache[key]

        out = CoeffFn.zero(target)
        for e, c in self.terms.items():
            t = CoeffFn.const(target, c)
            for k, p in enumerate(e):
                if p:
                    t = t * power(k, p)
            out = out + t
        return out

    def __repr__(self):
        from .text import format_coeff
        return f"CoeffFn<{format_coeff(self)}>"

    def __str__(self):
        from .text import format_coeff
        return format_coeff(self)


def coeff_mul(a, b):
    """Product of two coefficient functions of the same flavor and universe."""
    from .exppoly import ExpPoly
    if isinstance(a, ExpPoly) or isinstance(b, ExpPoly):
        if not (isinstance(a, ExpPoly) and isinstance(b, ExpPoly)):
            raise FlavorError("flavor mismatch: EXPPOLY with polynomial")
        return a * b
    if a.flavor != b.flavor:
        raise FlavorError(f"flavor mismatch: {a.flavor.value} vs {b.flavor.value}")
    return a * b


def coeff_derive(a, v: str):
    return a.derive(v)


def iter_monomials(u: Universe, max_size: int, min_size: int = 0) -> Iterator[tuple[int, ...]]:
    """All exponent tuples with ``min_size <= size <= max_size`` in glex order.

    Periodic coordinates take both signs and count ``|k|`` toward the size.
    """
    mask = u.angle_mask()
    for d in range(min_size, max_size + 1):
        found = []
        for parts in _compositions(d, u.n):
            signs = [(1, -1) if (mask[k] and parts[k]) else (1,) for k in range(u.n)]
            for sg in _cartesian(*signs):
                found.append(tuple(p * s for p, s in zip(parts, sg)))
        found.sort(key=glex_key)
        yield from found


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest
