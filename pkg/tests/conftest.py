import random

import pytest

from deformq.algebra import CoeffFn, Scalar, iter_monomials
from deformq.coiso import CoisotropicChart
from deformq.starprod import (DiffOp, EquivalenceTransform, apply_equivalence,
                              build_exponential_star)


def rational(rng):
    return Scalar(rng.randint(-3, 3) or 1) / rng.randint(1, 3)


def random_poly(rng, u, degree=2, terms=3):
    monos = list(iter_monomials(u, degree))
    return CoeffFn(u, {e: rational(rng) for e in rng.sample(monos, min(terms, len(monos)))})


def random_vector_op(rng, u, max_order=2, degree=2, terms=3):
    """Constant-killing differential operator with polynomial coefficients of degree <= 2."""
    monos = [e for e in iter_monomials(u, max_order, 1)]
    out = {}
    for _ in range(terms):
        out[(rng.choice(monos),)] = random_poly(rng, u, degree, 2)
    return DiffOp(u, out)


def random_conjugate(S, seed, orders=None):
    """S conjugated by prod_r exp(nu^r X_r) with random X_r."""
    rng = random.Random(seed)
    u = S.universe
    N = S.order
    T = EquivalenceTransform.identity(u, N)
    for r in (orders or range(1, N + 1)):
        T = T.then(EquivalenceTransform.single(u, N, r, random_vector_op(rng, u)))
    return apply_equivalence(T, S), T


def chart_r4():
    return CoisotropicChart([("q", "p")], [("x", "y")])


def chart_codim2():
    return CoisotropicChart([], [("q1", "p1"), ("q2", "p2")])


def star0(ch, order):
    return build_exponential_star(ch.chart, "STANDARD", order)


@pytest.fixture
def rng():
    return random.Random(1234)
