"""The eight headline acceptance criteria, each printing one PASS/FAIL line."""
import random

import pytest

from conftest import chart_codim2, chart_r4, random_conjugate, random_poly, star0
from test_fedosov_oracle import ORACLE_FACTOR, oracle_factor

from deformq.algebra import CoeffFn
from deformq.casebook import cpn_report, torus_chart, torus_products, torus_report
from deformq.cli.main import RunConfig, run
from deformq.cli.randomgen import random_objects
from deformq.cli.serialize import dumps, loads, roundtrip_equal
from deformq.coiso import (CoisotropicChart, Sidedness, adapt, adapted_through, check_adapted,
                           check_ideal_sidedness, obstruction_cocycle)
from deformq.fedosov import FedosovData, fedosov_star
from deformq.gutt import check_gutt_identities, heisenberg, so3
from deformq.starprod import (Chart, DiffOp, EquivalenceTransform, apply_equivalence,
                              build_exponential_star, check_star_axioms, deligne_order0,
                              opposite_star)


@pytest.fixture
def verdict(capsys):
    def say(label, ok, detail=""):
        with capsys.disabled():
            print(f"\n{label}: {'PASS' if ok else 'FAIL'}{'  ' + detail if detail else ''}")
        assert ok, detail
    return say


def test_criterion_1_axiom_suite(verdict):
    ch = Chart.standard(2)
    fails = []
    for ordering in ("STANDARD", "WEYL"):
        rep = check_star_axioms(build_exponential_star(ch, ordering, 5), 3)
        if not rep.ok:
            fails.append(f"{ordering}: {rep.first_failure().check}")
    verdict("criterion 1 (axioms of star0 and Weyl on R^4, N=5, degree 3)", not fails,
            "; ".join(fails))


def test_criterion_2_fedosov_equals_moyal(verdict):
    ch = Chart.standard(1)
    u = ch.universe
    flat = fedosov_star(FedosovData(ch, 10), order=4)
    weyl = build_exponential_star(ch, "WEYL", 4)
    same = flat.report.ok and flat.product == weyl
    factor_ok = oracle_factor() == ORACLE_FACTOR
    for b in (1, 3):
        res = fedosov_star(FedosovData.for_order(ch, 2, omega={1: {(0, 1): CoeffFn.const(u, b)}}))
        form = deligne_order0(res.product)
        factor_ok &= res.report.ok and form.matrix[0][1] == ORACLE_FACTOR * b
    verdict("criterion 2 (flat Fedosov = Weyl through nu^4; class factor matches oracle)",
            same and factor_ok, f"weyl={same} factor={factor_ok}")


@pytest.mark.slow
def test_criterion_3_gutt_identities(verdict):
    fails = []
    for lie in (heisenberg(), so3()):
        rep = check_gutt_identities(lie, max_power=5, assoc_degree=4)
        if not rep.ok:
            fails.append(f"{','.join(lie.names)}: {rep.first_failure().check}")
    verdict("criterion 3 (Gutt commutator, power and associativity on heis3, so3)", not fails,
            "; ".join(fails))


def test_criterion_4_torus(verdict):
    rep = torus_report(order=6, N=4, D=4)
    bad = rep.first_failure()
    verdict("criterion 4 (torus: value, adaptedness, projectability, reduction, commutants)",
            rep.ok, bad.check if bad else "")


def test_criterion_5_cpn(verdict):
    rep = cpn_report(6)
    bad = rep.first_failure()
    verdict("criterion 5 (CP^n radial S_D homomorphism and inverse through lam^6)", rep.ok,
            bad.check if bad else "")


def _vertical_perturbation(ch, S, seed):
    rng = random.Random(seed)
    u = S.universe
    X = DiffOp(u, {(u.unit(y),): random_poly(rng, u, 2, 3) for y in ch.transverse})
    return apply_equivalence(EquivalenceTransform.single(u, S.order, 1 + seed % 2, X), S)


def test_criterion_6_obstructions(verdict):
    problems = []
    # adapted products: every B- cocycle vanishes
    tch = torus_chart()
    adapted = [(star0(chart_r4(), 4), chart_r4()), (star0(chart_codim2(), 4), chart_codim2())]
    adapted += [(S, tch) for S in torus_products(5).values()]
    for S, ch in adapted:
        for r in range(S.order):
            if not obstruction_cocycle(S, ch, r).is_zero():
                problems.append(f"adapted product {S.name}: beta_{r + 1} nonzero")
    # recursive identities on a 50-instance panel
    ch = chart_codim2()
    base = star0(ch, 4)
    nonzero = 0
    for seed in range(50):
        C = _vertical_perturbation(ch, base, seed)
        r = min(adapted_through(C, ch), C.order - 1)
        co = obstruction_cocycle(C, ch, r, samples=2, seed=seed)
        nonzero += not co.is_zero()
        if not co.identities.ok:
            problems.append(f"panel {seed}: {co.identities.first_failure().check}")
    if nonzero < 25:
        problems.append(f"panel too degenerate ({nonzero} nonzero cocycles)")
    # adapt() on random conjugates of star0 at N=4
    for seed in range(4):
        C, _ = random_conjugate(base, seed)
        res = adapt(C, ch, 4)
        if not res.report.ok or apply_equivalence(res.transform, C) != res.product:
            problems.append(f"adapt seed {seed}: {res.report.first_failure()}")
        for r in range(5):
            if not check_adapted(res.product, ch, order=r).ok:
                problems.append(f"adapt seed {seed}: not adapted at order {r}")
    # codimension one: no obstruction is ever reported
    for ch1 in (CoisotropicChart([], [("q", "p")]), chart_r4()):
        for seed in range(4):
            C, _ = random_conjugate(star0(ch1, 4), seed)
            res = adapt(C, ch1, 4)
            if not res.report.ok or not all(o["zero"] for o in res.obstructions):
                problems.append(f"codim 1 seed {seed}: obstruction reported")
    verdict("criterion 6 (obstruction cocycles, recursive identities, adapt, codim 1)",
            not problems, "; ".join(problems[:3]) + f" [{nonzero}/50 nonzero cocycles]")


def test_criterion_7_sidedness(verdict):
    cases = [(chart_r4(), star0(chart_r4(), 4)), (chart_codim2(), star0(chart_codim2(), 4)),
             (CoisotropicChart([], [("q", "p")]), star0(CoisotropicChart([], [("q", "p")]), 4)),
             (torus_chart(), torus_products(4)["*"]), (torus_chart(), torus_products(4)["*'"])]
    ch = chart_codim2()
    for seed in range(3):
        C, _ = random_conjugate(star0(ch, 3), seed)
        cases.append((ch, adapt(C, ch).product))
    seen = []
    for chart, S in cases:
        seen.append((check_ideal_sidedness(S, chart), check_ideal_sidedness(opposite_star(S), chart)))
    ok = all(a is Sidedness.LEFT and b is Sidedness.RIGHT for a, b in seen)
    verdict("criterion 7 (LEFT for adapted products, RIGHT for opposites, never NEITHER)", ok,
            str([(a.value, b.value) for a, b in seen]))


def test_criterion_8_roundtrip_and_determinism(verdict):
    objs = random_objects(random.Random(2024), 100)
    bad = [k for k, o in enumerate(objs) if not (roundtrip_equal(o) and loads(dumps(o)) == o)]
    texts = []
    for _ in range(2):
        outs = []
        for cfg in (RunConfig("casebook", case="torus"), RunConfig("roundtrip", count=100, seed=7),
                    RunConfig("verify-axioms", builtin="weyl", dim=4, order=3, degree=2)):
            outs.append(dumps(run(cfg)[1]))
        texts.append("\n".join(outs))
    verdict("criterion 8 (print/parse identity on 100 objects; byte-identical reports)",
            not bad and texts[0] == texts[1], f"bad objects {bad}" if bad else "")
