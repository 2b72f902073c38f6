import json
from pathlib import Path

import pytest
import sympy as sp

from deformq.algebra import CoeffFn, ExpPoly, Scalar
from deformq.casebook import (cpn_report, displayed_reduced, torus_chart, torus_equivalence,
                              torus_products, torus_report)
from deformq.casebook.cpn import (CapacityError, RadialFn, apply_symbol, cpn_change_of_D,
                                  cpn_check_homomorphism, cpn_radial_star, cpn_SD,
                                  cpn_SD_inverse, symbol_scale)
from deformq.cli.serialize import dumps
from deformq.coiso import check_adapted, check_projectable, reduced_product
from deformq.starprod import apply_equivalence

GOLDEN = Path(__file__).parent / "golden" / "torus_report.json"
N = 6


# -- CP^n radial case ----------------------------------------------------------------

def test_radial_product_values():
    x = RadialFn.poly({1: 1}, N)
    assert cpn_radial_star(x, x) == RadialFn.poly({2: 1}, N) + \
        RadialFn.from_exppoly(ExpPoly.polynomial({1: 1}, N).lam_shift(1))
    one = RadialFn.poly({0: 1}, N)
    e = RadialFn.exp(3, N)
    assert cpn_radial_star(one, e) == e == cpn_radial_star(e, one)


def test_exponentials_multiply_by_group_law():
    # e_a * e_b = e_{a + b + lam a b}
    for a in (1, 2, Scalar(1, 1)):
        for b in (1, -3):
            got = cpn_radial_star(RadialFn.exp(a, N), RadialFn.exp(b, N))
            a_, b_ = Scalar.coerce(a), Scalar.coerce(b)
            assert got == RadialFn.exp([a_ + b_, a_ * b_], N)


def test_SD_on_exponential_matches_sympy_series():
    x, lam = sp.symbols("x lam")
    a = 2
    got = cpn_SD(RadialFn.exp(a, N), [1])
    (alpha, payload), = got.parts.items()
    assert alpha == Scalar(a)
    want = sp.series(sp.exp(x * (sp.log(1 + lam * a) / lam - a)), lam, 0, N + 1).removeO()
    for k in range(N + 1):
        poly = sum(sp.Rational(c.real.numerator, c.real.denominator) * x ** m
                   for m, c in payload.poly[k].items())
        assert sp.expand(poly - want.coeff(lam, k)) == 0


def test_SD_inverse_is_inverse_on_mixed_functions():
    phi = RadialFn.exp(1, N) * RadialFn.poly({0: 2, 2: -1}, N) + RadialFn.exp(-2, N)
    for D in ([1], [1, 1]):
        assert cpn_SD(cpn_SD_inverse(phi, D), D) == phi
        assert cpn_SD_inverse(cpn_SD(phi, D), D) == phi


@pytest.mark.parametrize("D", [[1], [1, 1]])
def test_homomorphism_reports(D):
    assert cpn_check_homomorphism(D, 1, 2, 5).ok


def test_identity_symbol_is_not_a_homomorphism():
    ea, eb = RadialFn.exp(1, 4), RadialFn.exp(2, 4)
    ident = symbol_scale([1])
    lhs = apply_symbol(cpn_radial_star(ea, eb), ident)
    rhs = apply_symbol(ea, ident) * apply_symbol(eb, ident)
    assert lhs != rhs


def test_change_of_D():
    assert cpn_change_of_D([1], [1, 1], 2, 5).ok


def test_capacity_bound():
    with pytest.raises(CapacityError):
        RadialFn.exp(1, 13)


def test_cpn_report_passes():
    assert cpn_report(4).ok


# -- cotangent bundle of the torus ----------------------------------------------------

def _mono(u, **spec):
    return CoeffFn(u, {u.multi_index(spec): Scalar(1)})


def test_torus_displayed_value():
    prods = torus_products(4)
    u = torus_chart().universe
    got = prods["*'"](_mono(u, J=1, psi=1), _mono(u, phi=1))
    assert got[0] == _mono(u, J=1, phi=1, psi=1)
    assert got[1].is_zero()
    assert got[2] == _mono(u, phi=1, psi=1).scale(-4)


def test_torus_structure():
    tch = torus_chart()
    prods = torus_products(4)
    star, sp1, sp2 = prods["*"], prods["*'"], prods["*''"]
    assert apply_equivalence(torus_equivalence(4), star) == sp1
    for S in prods.values():
        assert check_adapted(S, tch).ok
    assert check_projectable(star, tch, 2).ok
    assert not check_projectable(sp1, tch, 2).ok
    assert not check_projectable(sp2, tch, 2).ok
    assert reduced_product(star, tch) == displayed_reduced(4)


def test_torus_report_small():
    rep = torus_report(order=4, N=2, D=2, axiom_degree=1)
    assert rep.ok, rep.first_failure()
    assert rep.data["*'' projectable"] is False


@pytest.mark.slow
def test_torus_report_golden():
    text = dumps(torus_report())
    assert text == GOLDEN.read_text()
    body = json.loads(text.split("\n", 1)[1])
    dims = {k: v["dimension"] for k, v in body["data"]["commutant"].items()}
    assert dims == {"*": 125, "*'": 25, "*''": 45}
