"""Coisotropic charts ``C = {y = 0}`` and the vanishing ideal."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from ..algebra.coeff import CoeffFn, Universe, UniverseError
from ..algebra.scalar import Scalar
from ..starprod.checks import Restriction
from ..starprod.star import Chart


class NotInIdeal(ValueError):
    pass


@dataclass(frozen=True)
class CoisotropicChart:
    """Darboux chart with basic pairs ``(q, p)`` and leaf pairs ``(x, y)``.

    ``{q, p} = {x, y} = 1``.  The tangential variables are q, p, x; the
    transverse variables y cut out ``C``.  Leaves of the characteristic
    foliation are the x-directions, since ``X_{y_i} = d/dx^i`` on C.
    """
    basic: tuple[tuple[str, str], ...]
    leaves: tuple[tuple[str, str], ...]
    angles: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "basic", tuple(tuple(p) for p in self.basic))
        object.__setattr__(self, "leaves", tuple(tuple(p) for p in self.leaves))
        object.__setattr__(self, "angles", frozenset(self.angles))
        names = [v for pr in self.basic + self.leaves for v in pr]
        seen, dup = set(), []
        for n in names:
            if n in seen:
                dup.append(n)
            seen.add(n)
        if dup:
            raise UniverseError(f"duplicate variable(s) {sorted(set(dup))} in chart")
        unknown = self.angles - seen
        if unknown:
            raise UniverseError(f"angle variable(s) {sorted(unknown)} not in chart")
        for _, y in self.leaves:
            if y in self.angles:
                raise UniverseError(f"transverse variable {y!r} cannot be periodic")

    @classmethod
    def from_spec(cls, spec: dict) -> "CoisotropicChart":
        """``{"pairs": [[q, p], ...], "leaves": [[x, y], ...], "angles": [...]}``."""
        extra = set(spec) - {"pairs", "leaves", "angles"}
        if extra:
            raise ValueError(f"unknown chart field(s): {sorted(extra)}")
        for key in ("pairs", "leaves"):
            for item in spec.get(key, []):
                if not (isinstance(item, (list, tuple)) and len(item) == 2
                        and all(isinstance(v, str) for v in item)):
                    raise ValueError(f"chart field {key!r}: expected [name, name], got {item!r}")
        return cls(tuple(spec.get("pairs", ())), tuple(spec.get("leaves", ())),
                   frozenset(spec.get("angles", ())))

    def to_spec(self) -> dict:
        return {"pairs": [list(p) for p in self.basic], "leaves": [list(p) for p in self.leaves],
                "angles": sorted(self.angles)}

    @cached_property
    def chart(self) -> Chart:
        return Chart.darboux(self.basic + self.leaves, self.angles)

    @property
    def universe(self) -> Universe:
        return self.chart.universe

    @property
    def transverse(self) -> tuple[str, ...]:
        return tuple(y for _, y in self.leaves)

    @property
    def leaf_vars(self) -> tuple[str, ...]:
        return tuple(x for x, _ in self.leaves)

    @property
    def basic_vars(self) -> tuple[str, ...]:
        return tuple(v for pr in self.basic for v in pr)

    @property
    def codim(self) -> int:
        return len(self.leaves)

    @cached_property
    def restriction(self) -> Restriction:
        return Restriction(self.universe, self.transverse)

    @property
    def c_universe(self) -> Universe:
        return self.restriction.target

    @cached_property
    def basic_chart(self) -> Chart:
        return Chart.darboux(self.basic, self.angles & set(self.basic_vars))

    @cached_property
    def transverse_pos(self) -> tuple[int, ...]:
        return tuple(self.universe.pos(y) for y in self.transverse)

    @cached_property
    def leaf_pos(self) -> tuple[int, ...]:
        return tuple(self.universe.pos(x) for x in self.leaf_vars)

    def has_transverse(self, I) -> bool:
        return any(I[k] for k in self.transverse_pos)

    def transverse_order(self, I) -> int:
        return sum(I[k] for k in self.transverse_pos)

    def i_star(self, f: CoeffFn) -> CoeffFn:
        return self.restriction(f)

    def prolong(self, phi: CoeffFn) -> CoeffFn:
        return self.restriction.prolong(phi)

    def y(self, i: int) -> CoeffFn:
        return CoeffFn.var(self.universe, self.transverse[i])


def ideal_member(f: CoeffFn, chart: CoisotropicChart) -> bool:
    """True iff every monomial of f carries a transverse factor."""
    if f.universe != chart.universe:
        raise UniverseError("function does not live on the chart")
    pos = chart.transverse_pos
    return all(any(e[k] for k in pos) for e in f.terms)


def koszul_split(g: CoeffFn, chart: CoisotropicChart) -> tuple[CoeffFn, ...]:
    """``g = sum_i g^i y_i`` with ``g^i = int_0^1 dg/dy_i(eta, t y) dt``.

    On a monomial ``c eta^a y^b`` the integral gives ``c b_i / |b| eta^a y^(b - e_i)``.
    """
    if not ideal_member(g, chart):
        raise NotInIdeal("function is not in the vanishing ideal")
    u = chart.universe
    pos = chart.transverse_pos
    parts = [dict() for _ in pos]
    for e, c in g.terms.items():
        tot = sum(e[k] for k in pos)
        for i, k in enumerate(pos):
            if e[k]:
                ne = list(e)
                ne[k] -= 1
                parts[i][tuple(ne)] = c * (Scalar(e[k]) / tot)
    return tuple(CoeffFn(u, p, _trusted=True) for p in parts)
