import random

import pytest
import sympy as sp

from deformq.algebra import CoeffFn, Scalar
from deformq.fedosov import (FedosovData, NegativeNuPower, WeylSpace, _check_nonnegative,
                             curvature_residual, fedosov_D, fedosov_star, fedosov_taylor,
                             random_element, solve_r)
from deformq.starprod import Chart, build_exponential_star, check_star_axioms

R2 = Chart.standard(1)
R4 = Chart.standard(2)
M = 7


def panel(space, seed, count=12, **kw):
    rng = random.Random(seed)
    return [random_element(space, rng, **kw) for _ in range(count)]


def test_delta_identities():
    sp_ = WeylSpace(R4, M)
    for a in panel(sp_, 1, max_deg=M - 1):
        assert a.delta().delta().is_zero()
        assert a.delta_inv().delta_inv().is_zero()
        # delta delta^-1 + delta^-1 delta + sigma = id
        assert a.delta().delta_inv() + a.delta_inv().delta() + a.sigma() == a


def test_partial_identities():
    sp_ = WeylSpace(R4, M)
    for a in panel(sp_, 2, x_degree=3):
        assert a.partial().partial().is_zero()
        assert (a.delta().partial() + a.partial().delta()).is_zero()


def test_delta_is_graded_derivation():
    sp_ = WeylSpace(R4, M)
    els = panel(sp_, 3, 8, max_deg=4)
    for a, b in zip(els, els[1:]):
        lhs = a.mul(b).delta().truncate(M - 1)
        rhs = sp_.zero()
        for fd, part in a.form_split().items():
            rhs = rhs + part.delta().mul(b) + part.mul(b.delta()).scale((-1) ** fd)
        assert lhs == rhs.truncate(M - 1)


def test_fiber_product_associative_and_commutator():
    sp_ = WeylSpace(R4, M)
    els = panel(sp_, 4, 9, max_deg=3, form_degrees=[0, 1])
    for a, b, c in zip(els, els[1:], els[2:]):
        assert a.mul(b).mul(c) == a.mul(b.mul(c))
    for i in range(4):
        for j in range(4):
            comm = sp_.y(i).mul(sp_.y(j)) - sp_.y(j).mul(sp_.y(i))
            assert comm == sp_.scalar(2 * sp_.P[i][j], 1)


def test_fiber_product_matches_sympy_oracle():
    sp_ = WeylSpace(R2, M)
    nu, yq, yp = sp.symbols("nu yq yp")

    def to_sym(x):
        out = 0
        for (j, k, xe, ye, f), c in x.terms.items():
            assert not j and not f and not any(xe)
            out += sp.Rational(c.real.numerator, c.real.denominator) * nu ** k * yq ** ye[0] * yp ** ye[1]
        return sp.expand(out)

    def trunc(expr):
        keep = 0
        for t in sp.Add.make_args(sp.expand(expr)):
            if t != 0 and 2 * sp.degree(t, nu) + sp.Poly(t, yq, yp).total_degree() <= M:
                keep += t
        return keep

    def fiber(f, g):
        tot = 0
        for r in range(M // 2 + 2):
            acc = 0
            for k in range(r + 1):
                acc += sp.binomial(r, k) * (-1) ** (r - k) * \
                    sp.diff(f, yq, k, yp, r - k) * sp.diff(g, yp, k, yq, r - k)
            tot += nu ** r / sp.factorial(r) * acc
        return trunc(tot)

    rng = random.Random(9)
    for _ in range(10):
        a, b = (random_element(sp_, rng, 4, max_deg=5, form_degrees=[0], x_degree=0)
                for _ in range(2))
        a, b = (sp_.element({k: Scalar(v.real) for k, v in x.terms.items()}) for x in (a, b))
        assert to_sym(a.mul(b)) == fiber(to_sym(a), to_sym(b))


def test_flat_r_vanishes_and_weyl_recovered():
    data = FedosovData.for_order(R2, 3)
    assert solve_r(data).is_zero()
    res = fedosov_star(data)
    assert res.report.ok
    assert res.product == build_exponential_star(R2, "WEYL", 3)


def test_flat_r4_equals_weyl():
    res = fedosov_star(FedosovData.for_order(R4, 2))
    assert res.report.ok
    assert res.product == build_exponential_star(R4, "WEYL", 2)


def test_r3_for_constant_omega_matches_hand_expansion():
    u = R2.universe
    b = 3
    data = FedosovData.for_order(R2, 2, omega={1: {(0, 1): CoeffFn.const(u, b)}})
    sp_ = data.space
    r = solve_r(data)
    # r_3 = (nu b / 2)(y^q dp - y^p dq)
    want = sp_.y(0, Scalar(b, 0) / 2, 1).mul(sp_.dx(1)) - sp_.y(1, Scalar(b, 0) / 2, 1).mul(sp_.dx(0))
    assert r.part(deg=3) == want
    assert curvature_residual(r, data).is_zero()
    x = sp_.base_function(CoeffFn.var(u, "q"))
    tau = fedosov_taylor(x, r)
    # tau(q) = q + (1 - nu b / 2) y^q + ...
    assert tau.part(deg=1) == sp_.y(0)
    assert tau.part(deg=3).part(sym_degree=1) == sp_.y(0, Scalar(-b, 0) / 2, 1)


def test_D_squared_vanishes():
    u = R2.universe
    data = FedosovData.for_order(R2, 3, omega={1: {(0, 1): CoeffFn.const(u, 2)}})
    r = solve_r(data)
    sp_ = data.space
    for x in panel(sp_, 5, 8, max_deg=3):
        once = fedosov_D(x, r, M - 1)
        assert fedosov_D(once, r, M - 2).is_zero()


def test_normalization_s():
    sp_ = WeylSpace(R2, 8)
    s = sp_.y(0, 1, 1)           # nu y^q has Deg 3 and sigma(s) = 0
    data = FedosovData(R2, 8, {}, s)
    res = fedosov_star(data)
    assert res.report.ok
    assert res.r.delta_inv() == s
    assert check_star_axioms(res.product, 2).ok


def test_nonconstant_omega_gives_star_product():
    u = R2.universe
    omega = {1: {(0, 1): CoeffFn.const(u, 1) + CoeffFn.var(u, "q")}}
    res = fedosov_star(FedosovData.for_order(R2, 2, omega=omega))
    assert res.report.ok
    assert check_star_axioms(res.product, 2).ok


def test_input_validation():
    u = R4.universe
    with pytest.raises(ValueError, match="not closed"):
        FedosovData.for_order(R4, 2, omega={1: {(0, 1): CoeffFn.var(u, "q2")}}).check_inputs()
    with pytest.raises(ValueError, match="i < j"):
        FedosovData.for_order(R4, 2, omega={1: {(1, 0): CoeffFn.const(u, 1)}}).check_inputs()
    sp_ = WeylSpace(R2, 6)
    with pytest.raises(ValueError, match="sigma"):
        FedosovData(R2, 6, {}, sp_.scalar(1, 2)).check_inputs()
    with pytest.raises(ValueError, match="Deg"):
        FedosovData(R2, 6, {}, sp_.y(0).mul(sp_.y(0))).check_inputs()


def test_negative_nu_power_is_reported():
    sp_ = WeylSpace(R2, 6)
    with pytest.raises(NegativeNuPower):
        _check_nonnegative(sp_.y(0).nu_shift(-1), "test element")
