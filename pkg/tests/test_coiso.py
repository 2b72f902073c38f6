import pytest

from conftest import chart_codim2, chart_r4, random_conjugate, star0

from deformq.algebra import CoeffFn, NuSeries, Scalar
from deformq.coiso import (CoisotropicChart, NotAdapted, NotClosed, NotInIdeal, Sidedness,
                           VerticalForm, adapt, adapted_through, canonical_representation,
                           check_adapted, check_ideal_sidedness, check_projectable,
                           commutant_action, idealizer_commutant, ideal_member, koszul_split,
                           membership_check, normalize_representation, obstruction_cocycle,
                           reduced_product, vertical_primitive)
from deformq.starprod import (DiffOp, EquivalenceTransform, apply_equivalence,
                              build_exponential_star, check_representation, check_star_axioms)


def test_ideal_membership_and_koszul_split():
    ch = chart_codim2()
    u = ch.universe
    q1, p1, q2, p2 = (CoeffFn.var(u, n) for n in ("q1", "p1", "q2", "p2"))
    g = q1 * p1 + p2 * p2 * q2 + p1 * p2
    assert ideal_member(g, ch)
    assert not ideal_member(g + q1, ch)
    parts = koszul_split(g, ch)
    assert p1 * parts[0] + p2 * parts[1] == g
    with pytest.raises(NotInIdeal):
        koszul_split(q1, ch)


def test_star0_adapted_weyl_not():
    ch = chart_r4()
    assert check_adapted(star0(ch, 3), ch).ok
    W = build_exponential_star(ch.chart, "WEYL", 3)
    rep = check_adapted(W, ch)
    assert not rep.ok and rep.first_failure().witness is not None
    assert adapted_through(W, ch) == 0


def test_adapt_weyl_product():
    ch = chart_r4()
    W = build_exponential_star(ch.chart, "WEYL", 3)
    res = adapt(W, ch)
    assert res.report.ok
    assert check_adapted(res.product, ch).ok
    assert check_star_axioms(res.product, 2).ok
    assert apply_equivalence(res.transform, W) == res.product


def test_known_obstruction_is_removed():
    ch = chart_codim2()
    u = ch.universe
    S = star0(ch, 4)
    X = DiffOp(u, {(u.unit("p2"),): CoeffFn.var(u, "q1")})
    C = apply_equivalence(EquivalenceTransform.single(u, 4, 1, X), S)
    r = adapted_through(C, ch)
    co = obstruction_cocycle(C, ch, r, samples=20)
    assert not co.is_zero()
    assert co.identities.ok
    cu = ch.c_universe
    assert set(co.beta.components) == {(0, 1)}
    assert co.beta[(0, 1)] == CoeffFn.const(cu, 2) or co.beta[(1, 0)] == CoeffFn.const(cu, 2)
    res = adapt(C, ch)
    assert res.report.ok
    assert any(not o["zero"] for o in res.obstructions)


def test_vertical_primitive():
    ch = chart_codim2()
    cu = ch.c_universe
    x1 = CoeffFn.var(cu, "q1")
    gamma = VerticalForm(ch.leaf_vars, cu, 1, {0: CoeffFn.zero(cu), 1: x1 * x1})
    beta = gamma.d()
    prim = vertical_primitive(beta)
    assert prim.d() == beta
    # closedness only constrains 2-forms once there are three leaf directions
    three = CoisotropicChart([], [("a", "b"), ("c", "d"), ("e", "f")])
    tu = three.c_universe
    nonclosed = VerticalForm(three.leaf_vars, tu, 2,
                             {(0, 1): CoeffFn.var(tu, "e"), (0, 2): CoeffFn.zero(tu),
                              (1, 2): CoeffFn.zero(tu)})
    with pytest.raises(NotClosed):
        vertical_primitive(nonclosed)


def test_sidedness_classification():
    ch = chart_r4()
    S = star0(ch, 3)
    assert check_ideal_sidedness(S, ch) is Sidedness.LEFT
    W = build_exponential_star(ch.chart, "WEYL", 3)
    assert check_ideal_sidedness(W, ch) not in (Sidedness.LEFT, Sidedness.TWO_SIDED)


def test_projectable_and_reduced_product():
    ch = chart_r4()
    S = star0(ch, 3)
    assert check_projectable(S, ch, 3).ok
    R = reduced_product(S, ch, verify_degree=3)
    assert R == build_exponential_star(ch.basic_chart, "STANDARD", 3)


def test_canonical_representation_and_normalization():
    ch = chart_codim2()
    S = star0(ch, 3)
    rho = canonical_representation(S, ch)
    assert check_representation(rho, S, 2).ok
    C, _ = random_conjugate(S, 3)
    adapted = adapt(C, ch).product
    rho2 = canonical_representation(adapted, ch)
    T, S2, rho3 = normalize_representation(rho2, adapted, ch)
    assert check_representation(rho3, S2, 2).ok
    one = CoeffFn.one(ch.c_universe)
    u = ch.universe
    f = CoeffFn.var(u, "q1") * CoeffFn.var(u, "p2")
    # rho(f) 1 = i^* f after normalization
    got = rho3(f, one)
    assert got[0] == ch.i_star(f) and all(c.is_zero() for c in got.coeffs[1:])
    with pytest.raises(NotAdapted):
        canonical_representation(build_exponential_star(ch.chart, "WEYL", 2), ch)


def test_idealizer_membership_and_action():
    ch = chart_r4()
    S = star0(ch, 4)
    cu = ch.c_universe
    res = idealizer_commutant(S, ch, 2, 1)
    assert res.report.ok
    for phi in res.basis:
        assert membership_check(S, ch, phi, 2, 1)
    q = NuSeries([CoeffFn.var(cu, "q"), CoeffFn.zero(cu)])
    x = NuSeries([CoeffFn.var(cu, "x"), CoeffFn.zero(cu)])
    assert membership_check(S, ch, q, 2, 1)
    assert not membership_check(S, ch, x, 2, 1)
    act = commutant_action(S, ch, CoeffFn.var(cu, "q"))
    assert act(CoeffFn.one(cu))[0] == CoeffFn.var(cu, "q")
    assert act(CoeffFn.var(cu, "p"))[1] == CoeffFn.const(cu, Scalar(-2))
