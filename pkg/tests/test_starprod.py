import random

import pytest
import sympy as sp

from conftest import random_conjugate, random_poly

from deformq.algebra import CoeffFn, Scalar
from deformq.starprod import (BiDiffOp, Chart, ChartError, DiffOp, EquivalenceTransform,
                              MorphismSeries, apply_equivalence, build_exponential_star,
                              check_morphism, check_star_axioms, deligne_order0,
                              hochschild_coboundary, opposite_star, replace_order, tensor_star)

CH = Chart.standard(1)
U = CH.universe
q, p = CoeffFn.var(U, "q"), CoeffFn.var(U, "p")
Q, P = sp.symbols("q p")


def sym(f):
    return sp.expand(sum(sp.Rational(c.real.numerator, c.real.denominator)
                         * Q ** e[0] * P ** e[1] for e, c in f.terms.items()))


def moyal_oracle(f, g, N):
    """Sum_r nu^r / r! (d_q (x) d_p - d_p (x) d_q)^r, written out in sympy."""
    out = []
    for r in range(N + 1):
        acc = 0
        for k in range(r + 1):
            left = sp.diff(f, Q, k, P, r - k) if r else f
            right = sp.diff(g, P, k, Q, r - k) if r else g
            acc += sp.binomial(r, k) * (-1) ** (r - k) * left * right
        out.append(sp.expand(acc / sp.factorial(r)))
    return out


def test_weyl_product_matches_sympy_oracle():
    W = build_exponential_star(CH, "WEYL", 4)
    rng = random.Random(5)
    for _ in range(15):
        f, g = random_poly(rng, U, 4, 4), random_poly(rng, U, 4, 4)
        got = W(f, g)
        want = moyal_oracle(sym(f), sym(g), 4)
        assert [sym(c) for c in got.coeffs] == want


def test_standard_ordering_values():
    S0 = build_exponential_star(CH, "STANDARD", 3)
    assert list(S0(p, q).coeffs) == [p * q, CoeffFn.const(U, -2), CoeffFn.zero(U),
                                     CoeffFn.zero(U)]
    assert list(S0(q, p).coeffs) == [p * q] + [CoeffFn.zero(U)] * 3


@pytest.mark.parametrize("ordering", ["STANDARD", "WEYL"])
def test_axioms_hold(ordering):
    rep = check_star_axioms(build_exponential_star(Chart.standard(2), ordering, 3), 3)
    assert rep.ok, rep.first_failure()


def test_operator_method_agrees():
    S = build_exponential_star(CH, "WEYL", 3)
    assert check_star_axioms(S, 3, method="operator").ok


def test_broken_product_fails_with_witness():
    S = build_exponential_star(CH, "WEYL", 3)
    bad = replace_order(S, 2, S.C[2] + BiDiffOp.from_spec(U, [(1, {"q": 1}, {"q": 2})]))
    rep = check_star_axioms(bad, 3)
    assert not rep.ok
    fail = rep.get("associativity")
    # d_q (x) d_q^2 is not a Hochschild cocycle, so order 2 already fails
    assert not fail.ok and fail.witness["r"] == 2


def test_constants_axiom_failure_is_reported():
    S = build_exponential_star(CH, "WEYL", 2)
    bad = replace_order(S, 1, S.C[1] + BiDiffOp.from_spec(U, [(1, {}, {"q": 1})]))
    assert not check_star_axioms(bad, 2).get("C_r(1,f) = C_r(f,1) = 0").ok


def test_standard_to_weyl_equivalence():
    # T = exp(nu d_q d_p) maps star0 onto the Weyl product
    N = 4
    X = DiffOp.from_spec(U, [(1, {"q": 1, "p": 1})])
    T = EquivalenceTransform.exp([DiffOp.zero(U), X], N)
    S0 = build_exponential_star(CH, "STANDARD", N)
    W = build_exponential_star(CH, "WEYL", N)
    assert apply_equivalence(T, S0) == W
    assert check_morphism(MorphismSeries.from_equivalence(T), S0, W, 3).ok
    assert apply_equivalence(T.inverse(), W) == S0


def test_random_equivalence_preserves_axioms():
    S0 = build_exponential_star(Chart.standard(2), "STANDARD", 3)
    for seed in range(3):
        C, T = random_conjugate(S0, seed)
        assert check_star_axioms(C, 2).ok
        assert apply_equivalence(T.inverse(), C) == S0


def test_deligne_class_of_exponential_products_vanishes():
    for ordering in ("STANDARD", "WEYL"):
        assert deligne_order0(build_exponential_star(Chart.standard(2), ordering, 2)).is_zero()


def test_coboundary_changes_only_symmetric_part():
    W = build_exponential_star(CH, "WEYL", 2)
    B = DiffOp.from_spec(U, [(Scalar(3), {"q": 2}), (1, {"q": 1, "p": 1})])
    bB = hochschild_coboundary(B)
    assert bB == bB.swap()
    assert deligne_order0(replace_order(W, 2, W.C[2] + bB)).is_zero()


def test_opposite_and_tensor():
    S0 = build_exponential_star(CH, "STANDARD", 3)
    opp = opposite_star(S0)
    assert check_star_axioms(opp, 2).ok
    assert opposite_star(opp) == S0
    other = build_exponential_star(Chart.darboux([("x", "y")]), "WEYL", 3)
    assert check_star_axioms(tensor_star(S0, other), 2).ok


def test_standard_ordering_needs_pairs():
    with pytest.raises(ChartError):
        build_exponential_star(Chart.darboux([]), "STANDARD", 2)
