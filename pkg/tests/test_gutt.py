import itertools

import pytest
import sympy as sp

from deformq.algebra import CoeffFn, NuSeries, Scalar, iter_monomials
from deformq.gutt import (GuttPolynomial, LieAlgebraData, LieAlgebraError, abelian,
                          bch_exponential_check, bch_truncated, check_gutt_identities,
                          check_gutt_star, gutt_mul, gutt_star, heisenberg, pbw_for,
                          quantum_moment_check, so3, vector)
from deformq.starprod import Chart, build_exponential_star, check_star_axioms

X, Y, Z, NU = sp.symbols("X Y Z nu")


def to_sym(P):
    out = 0
    for (k, e), c in P.terms.items():
        out += sp.Rational(c.real.numerator, c.real.denominator) * NU ** k * \
            X ** e[0] * Y ** e[1] * Z ** e[2]
    return sp.expand(out)


def heis_oracle(f, g, N):
    """Symmetric ordering on heis(3): exp(nu z (d_X (x) d_Y - d_Y (x) d_X))."""
    tot = 0
    for r in range(N + 1):
        acc = 0
        for k in range(r + 1):
            acc += sp.binomial(r, k) * (-1) ** (r - k) * \
                sp.diff(f, X, k, Y, r - k) * sp.diff(g, Y, k, X, r - k)
        tot += (NU * Z) ** r / sp.factorial(r) * acc
    return sp.expand(tot)


def test_heisenberg_product_matches_symmetric_ordering():
    lie = heisenberg()
    monos = list(iter_monomials(lie.universe, 3))
    for e1, e2 in itertools.product(monos, repeat=2):
        A, B = GuttPolynomial.monomial(lie, e1), GuttPolynomial.monomial(lie, e2)
        assert to_sym(gutt_mul(A, B)) == heis_oracle(to_sym(A), to_sym(B), 6)


def test_so3_low_degree_values():
    lie = so3()
    L1, L2 = GuttPolynomial.basis(lie, 0), GuttPolynomial.basis(lie, 1)
    got = gutt_mul(L1, L2)
    want = GuttPolynomial.monomial(lie, (1, 1, 0)) + GuttPolynomial.monomial(lie, (0, 0, 1), 1, 1)
    assert got == want


@pytest.mark.parametrize("make", [heisenberg, so3])
def test_identities_small(make):
    rep = check_gutt_identities(make(), max_power=5, assoc_degree=2)
    assert rep.ok, rep.first_failure()


def test_abelian_is_pointwise():
    rep = check_gutt_identities(abelian(["a", "b"]), max_power=4, assoc_degree=3)
    assert rep.ok
    assert rep.get("abelian: pointwise product").ok


def test_symmetrization_roundtrip():
    lie = so3()
    pbw = pbw_for(lie)
    for e in iter_monomials(lie.universe, 4):
        P = GuttPolynomial.monomial(lie, e)
        assert pbw.to_poly(pbw.from_poly(P)) == P


def test_bch_heisenberg():
    lie = heisenberg()
    H = bch_truncated(lie, vector(lie, {"X": 1}), vector(lie, {"Y": 1}), 4)
    assert H == {(0, 0): Scalar(1), (0, 1): Scalar(1), (1, 2): Scalar(1)}
    assert bch_truncated(lie, vector(lie, {"X": 1}), vector(lie, {"X": -1}), 4) == {}
    a = abelian(["a", "b"])
    assert bch_truncated(a, vector(a, {"a": 2}), vector(a, {"b": 3}), 4) == \
        {(0, 0): Scalar(2), (0, 1): Scalar(3)}


@pytest.mark.parametrize("make", [heisenberg, so3])
def test_bch_exponential_law(make):
    lie = make()
    assert bch_exponential_check(lie, 0, 1, 4).ok


def test_jacobi_and_antisymmetry_enforced():
    with pytest.raises(LieAlgebraError, match="Jacobi"):
        LieAlgebraData(("a", "b", "c"), {(0, 1): {0: 1}, (0, 2): {1: 1}})
    with pytest.raises(LieAlgebraError, match="antisymmetric"):
        LieAlgebraData(("a", "b"), {(0, 1): {0: 1}, (1, 0): {0: 1}})
    with pytest.raises(LieAlgebraError):
        LieAlgebraData(("a", "a"), {})


def test_table_roundtrip():
    lie = so3()
    assert LieAlgebraData.from_table(lie.to_table()) == lie
    t = {"basis": ["X", "Y", "Z"], "brackets": {"X,Y": {"Z": "1"}}}
    assert LieAlgebraData.from_table(t) == heisenberg()


@pytest.mark.parametrize("make", [heisenberg, so3])
def test_operator_form(make):
    lie = make()
    S = gutt_star(lie, 3)
    assert check_gutt_star(lie, S, 3).ok
    assert check_star_axioms(S, 2).ok


def test_identity_moment_map():
    lie = so3()
    S = gutt_star(lie, 3)
    J = [CoeffFn.var(lie.universe, n) for n in lie.names]
    assert quantum_moment_check(lie, J, S, 2).ok


def test_heisenberg_acting_by_translations():
    lie = heisenberg()
    ch = Chart.standard(1)
    u = ch.universe
    S0 = build_exponential_star(ch, "STANDARD", 3)
    J = [CoeffFn.var(u, "q"), CoeffFn.var(u, "p"), CoeffFn.one(u)]
    assert quantum_moment_check(lie, J, S0, 3).ok


def test_broken_moment_map_fails_with_witness():
    lie = heisenberg()
    S = gutt_star(lie, 3)
    u = lie.universe
    x, y, z = (CoeffFn.var(u, n) for n in lie.names)
    rep = quantum_moment_check(lie, [x, y, z + x * x], S, 2)
    assert not rep.ok
    assert rep.first_failure().witness
    with pytest.raises(ValueError):
        quantum_moment_check(lie, [x, y], S, 2)
    ser = NuSeries([x, CoeffFn.zero(u), CoeffFn.zero(u), CoeffFn.zero(u)])
    assert quantum_moment_check(lie, [ser, y, z], S, 2).ok
