from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from deformq.algebra import (CoeffFn, ExpPoly, FlavorError, I, NuSeries, OrderMismatch,
                             ParseError, Scalar, Universe, UniverseError, dump_series,
                             format_coeff, format_exppoly, parse_coeff, parse_exppoly,
                             parse_scalar, parse_series, scalar_series, scalar_series_inverse,
                             series_mul_truncate)
from deformq.algebra.linalg import nullspace, rref

U = Universe(("q", "p", "phi"), frozenset({"phi"}))
SYM = {n: sp.Symbol(n) for n in U.names}

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
scalars = st.builds(Scalar, fractions, fractions)
exps = st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(-2, 2))
coeffs = st.dictionaries(exps, scalars, max_size=5).map(lambda d: CoeffFn(U, d))


def to_sympy(f: CoeffFn):
    out = 0
    for e, c in f.terms.items():
        t = sp.Rational(c.real.numerator, c.real.denominator) + \
            sp.I * sp.Rational(c.imag.numerator, c.imag.denominator)
        for name, k in zip(U.names, e):
            t *= sp.exp(sp.I * k * SYM[name]) if U.is_angle(name) else SYM[name] ** k
        out += t
    return sp.expand(out)


# -- scalars ---------------------------------------------------------------------

@given(scalars, scalars, scalars)
def test_scalar_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    if not a.is_zero():
        assert a * a.inverse() == Scalar(1)


@given(scalars)
def test_scalar_text_roundtrip(a):
    assert parse_scalar(str(a)) == a


def test_scalar_normal_form_and_hash():
    assert Scalar(Fraction(2, 4), Fraction(1, 2)) == Scalar(Fraction(1, 2), Fraction(1, 2))
    assert hash(Scalar(2, 0)) == hash(Scalar(Fraction(4, 2)))
    assert I * I == Scalar(-1)
    assert (Scalar(1, 1) ** -2) == Scalar(0, Fraction(-1, 2))


def test_scalar_rejects_floats():
    with pytest.raises(TypeError):
        Scalar.coerce(0.5)


# -- coefficient functions ---------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(coeffs, coeffs)
def test_coeff_arithmetic_matches_sympy(f, g):
    assert sp.expand(to_sympy(f * g) - to_sympy(f) * to_sympy(g)) == 0
    assert sp.expand(to_sympy(f + g) - to_sympy(f) - to_sympy(g)) == 0


@settings(max_examples=60, deadline=None)
@given(coeffs, st.sampled_from(U.names), st.integers(1, 3))
def test_derivatives_match_sympy(f, name, k):
    assert sp.expand(to_sympy(f.derive(name, k)) - sp.diff(to_sympy(f), SYM[name], k)) == 0


@given(coeffs)
def test_coeff_text_roundtrip(f):
    assert parse_coeff(format_coeff(f), U) == f


def test_flavor_and_universe_errors():
    with pytest.raises(FlavorError):
        CoeffFn(U, {(-1, 0, 0): 1})
    with pytest.raises(UniverseError):
        CoeffFn(U, {(1, 0): 1})
    with pytest.raises(UniverseError):
        CoeffFn.var(U, "q") + CoeffFn.var(Universe(("q",)), "q")


def test_restrict_and_substitute():
    q, p = CoeffFn.var(U, "q"), CoeffFn.var(U, "p")
    f = q * q * p + p + CoeffFn.const(U, 3)
    assert f.restrict_zero(["p"]) == CoeffFn.const(U, 3)
    g = f.substitute({"p": q + p}, U)
    assert to_sympy(g) == sp.expand(to_sympy(f).subs(SYM["p"], SYM["q"] + SYM["p"]))


# -- series --------------------------------------------------------------------------

def test_series_product_and_inverse():
    a = scalar_series([1, 2, Fraction(1, 3)])
    b = scalar_series_inverse(a)
    assert series_mul_truncate(a, b) == scalar_series([1, 0, 0])
    with pytest.raises(ZeroDivisionError):
        scalar_series_inverse(scalar_series([0, 1]))
    with pytest.raises(OrderMismatch):
        series_mul_truncate(a, scalar_series([1, 1]))


def test_series_text_roundtrip():
    q = CoeffFn.var(U, "q")
    s = NuSeries([q, CoeffFn.zero(U), q * q - CoeffFn.var(U, "phi", -1)])
    assert parse_series(dump_series(s, U)) == s


# -- exponential polynomials ------------------------------------------------------------

def test_exppoly_normalization_matches_sympy_series():
    x, lam = sp.symbols("x lam")
    # exp((1 + 2 lam) x) normalized to exp(x) * (series in lam)
    e = ExpPoly.exponential([1, 2], 3)
    n = e.normalized()
    assert n.alpha == (Scalar(1),) + (Scalar(0),) * 3
    want = sp.series(sp.exp(2 * lam * x), lam, 0, 4).removeO()
    for k in range(4):
        got = sum(sp.Rational(c.real.numerator, c.real.denominator) * x ** m
                  for m, c in n.poly[k].items())
        assert sp.expand(got - want.coeff(lam, k)) == 0
    assert e == n


def test_exppoly_derivative_and_text():
    e = ExpPoly.exponential(2, 2) * ExpPoly.polynomial({1: 1}, 2)   # x e^{2x}
    d = e.derive()
    assert d == ExpPoly.exponential(2, 2) * ExpPoly.polynomial({0: 1, 1: 2}, 2)
    assert parse_exppoly(format_exppoly(d)) == d


# -- parse errors --------------------------------------------------------------------------

@pytest.mark.parametrize("text", ["(1) * q +", "(1/0) * q", "(1) * r", "(1) ** q"])
def test_parse_errors_carry_position(text):
    with pytest.raises(ParseError) as exc:
        parse_coeff(text, U)
    assert "line 1, column" in str(exc.value)


# -- exact linear algebra ---------------------------------------------------------------------

def test_rref_and_nullspace():
    rows = [{"a": Scalar(1), "b": Scalar(2)}, {"a": Scalar(2), "b": Scalar(4)},
            {"c": Scalar(1)}]
    basis, pivots = rref(rows, ["a", "b", "c"])
    assert len(basis) == 2
    ns = nullspace(rows, ["a", "b", "c"])
    assert len(ns) == 1
    v = ns[0]
    assert v.get("a", Scalar(0)) + 2 * v.get("b", Scalar(0)) == Scalar(0)
