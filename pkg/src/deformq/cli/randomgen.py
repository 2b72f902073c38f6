"""Seeded random objects for serialization round trips."""
from __future__ import annotations

import random

from ..algebra.coeff import CoeffFn, Universe, iter_monomials
from ..algebra.exppoly import ExpPoly
from ..algebra.scalar import Scalar
from ..algebra.series import NuSeries
from ..report import Report
from ..starprod.ops import BiDiffOp, DiffOp
from ..starprod.star import Chart, EquivalenceTransform, StarProduct

_NAMES = ("q", "p", "x", "y", "phi", "J")


def random_scalar(rng: random.Random) -> Scalar:
    den = rng.randint(1, 5)
    return Scalar(rng.randint(-6, 6) or 1, rng.choice((0, 0, rng.randint(-3, 3)))) / den


def random_universe(rng: random.Random) -> Universe:
    k = rng.randint(1, 4)
    names = tuple(rng.sample(_NAMES, k))
    angles = frozenset(n for n in names if n == "phi")
    return Universe(names, angles)


def random_coeff(rng: random.Random, u: Universe, degree: int = 3, terms: int = 3) -> CoeffFn:
    monos = list(iter_monomials(u, degree))
    out = {}
    for e in rng.sample(monos, min(terms, len(monos))):
        out[e] = random_scalar(rng)
    return CoeffFn(u, out)


def random_op(rng: random.Random, u: Universe, arity: int, order: int = 2, terms: int = 3,
              kill_constants: bool = False):
    low = 1 if kill_constants else 0
    monos = [e for e in iter_monomials(u, order, low) if min(e, default=0) >= 0]
    out = {}
    for _ in range(terms):
        key = tuple(rng.choice(monos) for _ in range(arity))
        out[key] = random_coeff(rng, u, 2, 2)
    return (DiffOp if arity == 1 else BiDiffOp)(u, out)


def random_star(rng: random.Random) -> StarProduct:
    pairs = rng.choice(([("q", "p")], [("q", "p"), ("x", "y")], [("phi", "J")]))
    ch = Chart.darboux(pairs, angles=[v for pr in pairs for v in pr if v == "phi"])
    N = rng.randint(0, 3)
    ops = [BiDiffOp.identity(ch.universe)] + [random_op(rng, ch.universe, 2) for _ in range(N)]
    return StarProduct(ch, ops)


def random_equivalence(rng: random.Random) -> EquivalenceTransform:
    u = random_universe(rng)
    N = rng.randint(1, 3)
    return EquivalenceTransform([DiffOp.identity(u)] +
                                [random_op(rng, u, 1, kill_constants=True) for _ in range(N)])


def random_series(rng: random.Random) -> NuSeries:
    u = random_universe(rng)
    return NuSeries([random_coeff(rng, u) for _ in range(rng.randint(1, 4))])


def random_exppoly(rng: random.Random) -> ExpPoly:
    n = rng.randint(0, 3)
    poly = [{k: random_scalar(rng) for k in rng.sample(range(4), 2)} for _ in range(n + 1)]
    return ExpPoly(poly, [random_scalar(rng)] + [0] * n)


def random_report(rng: random.Random) -> Report:
    rep = Report("random", scope={"seed": rng.randint(0, 99)})
    for k in range(rng.randint(1, 4)):
        rep.add(f"check {k}", rng.random() < 0.7, order=rng.choice((None, k)),
                witness=rng.choice((None, {"f": "(1) * q", "r": k})))
    return rep


def random_objects(rng: random.Random, count: int) -> list:
    makers = (
        lambda: random_coeff(rng, random_universe(rng)),
        lambda: random_op(rng, random_universe(rng), 1),
        lambda: random_op(rng, random_universe(rng), 2),
        lambda: random_star(rng),
        lambda: random_equivalence(rng),
        lambda: random_series(rng),
        lambda: random_exppoly(rng),
        lambda: random_report(rng),
    )
    return [makers[k % len(makers)]() for k in range(count)]
