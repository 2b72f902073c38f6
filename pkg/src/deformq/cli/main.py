"""``deformq`` command line: batch verification runs emitting structured reports.

Exit status is 0 when every check passes, 1 when a mathematical check fails
(the report carries the witness) and 2 on input errors.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from pathlib import Path

from ..algebra.coeff import CoeffFn, UniverseError
from ..algebra.scalar import Scalar, parse_scalar
from ..algebra.text import ParseError, parse_coeff
from ..report import Report
from ..starprod.checks import check_star_axioms
from ..starprod.star import Chart, ChartError, StarProduct, build_exponential_star
from .serialize import dumps, loads, roundtrip_equal

PRODUCT_BUILTINS = ("star0", "weyl", "torus", "torus'", "torus''", "gutt-heis3", "gutt-so3")


class InputError(Exception):
    """Bad configuration; reported with exit status 2."""


@dataclass
class RunConfig:
    command: str
    order: int = 3
    degree: int | None = None
    chart: str | None = None
    product: str | None = None
    builtin: str | None = None
    dim: int = 2
    out: str | None = None
    emit: str | None = None
    config: str | None = None
    case: str | None = None
    count: int = 100
    seed: int = 0

    def validate(self) -> None:
        if self.order < 0:
            raise InputError("order: must be >= 0")
        if self.degree is not None and self.degree < 1:
            raise InputError("degree: must be >= 1")
        if self.dim < 2 or self.dim % 2:
            raise InputError("dim: must be a positive even number")


# -- inputs --------------------------------------------------------------------------

def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def load_chart(path: str):
    from ..coiso.chart import CoisotropicChart
    try:
        spec = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"chart {path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(spec, dict):
        raise InputError(f"chart {path}: expected a JSON object")
    try:
        return CoisotropicChart.from_spec(spec)
    except (ValueError, UniverseError) as exc:
        raise InputError(f"chart {path}: {exc}") from None


def default_chart(dim: int):
    """``R^dim`` with the last conjugate pair as the leaf pair."""
    from ..coiso.chart import CoisotropicChart
    n = dim // 2
    if n == 1:
        return CoisotropicChart([], [("q", "p")])
    pairs = [(f"q{i}", f"p{i}") for i in range(1, n + 1)]
    return CoisotropicChart(pairs[:-1], pairs[-1:])


def builtin_product(name: str, order: int, chart: Chart):
    if name == "star0":
        return build_exponential_star(chart, "STANDARD", order)
    if name == "weyl":
        return build_exponential_star(chart, "WEYL", order)
    if name in ("torus", "torus'", "torus''"):
        from ..casebook.torus import torus_products
        return torus_products(order)["*" + name[len("torus"):]]
    if name in ("gutt-heis3", "gutt-so3"):
        from ..gutt import BUILTIN_LIE, gutt_star
        return gutt_star(BUILTIN_LIE[name[len("gutt-"):]](), order)
    raise InputError(f"builtin: unknown product {name!r}; choose from {', '.join(PRODUCT_BUILTINS)}")


def resolve(cfg: RunConfig, need_chart: bool = False):
    """``(product, coisotropic chart or None)`` from the flags."""
    coiso = None
    if cfg.chart:
        coiso = load_chart(cfg.chart)
    elif cfg.builtin and cfg.builtin.startswith("torus"):
        from ..casebook.torus import torus_chart
        coiso = torus_chart()
    elif need_chart or cfg.builtin in ("star0", "weyl"):
        coiso = default_chart(cfg.dim)
    if cfg.product and cfg.builtin:
        raise InputError("product: give either --product or --builtin, not both")
    if cfg.product:
        if cfg.product in PRODUCT_BUILTINS:
            cfg.builtin = cfg.product
        else:
            try:
                S = loads(_read(cfg.product))
            except ParseError as exc:
                raise InputError(f"product {cfg.product}: {exc}") from None
            if not isinstance(S, StarProduct):
                raise InputError(f"product {cfg.product}: document is not a star product")
            return S, coiso
    if not cfg.builtin:
        raise InputError("product: one of --product or --builtin is required")
    base = coiso.chart if coiso is not None else Chart.standard(cfg.dim // 2)
    return builtin_product(cfg.builtin, cfg.order, base), coiso


def _need_coiso(coiso, S):
    if coiso is None:
        raise InputError("chart: this command needs --chart (or a builtin with a default chart)")
    if coiso.universe != S.universe:
        raise InputError(f"chart: variables {coiso.universe.names} differ from the product's "
                         f"{S.universe.names}")
    return coiso


def _emit(cfg: RunConfig, obj) -> None:
    if cfg.emit:
        Path(cfg.emit).write_text(dumps(obj))


# -- commands ------------------------------------------------------------------------

def cmd_verify_axioms(cfg: RunConfig) -> Report:
    S, _ = resolve(cfg)
    return check_star_axioms(S, cfg.degree)


def cmd_adapt(cfg: RunConfig) -> Report:
    from ..coiso.adapted import check_adapted
    from ..coiso.obstruction import adapt
    S, coiso = resolve(cfg, need_chart=True)
    coiso = _need_coiso(coiso, S)
    res = adapt(S, coiso)
    rep = res.report
    final = check_adapted(res.product, coiso)
    rep.extend(final, prefix="result: ")
    rep.data["obstructions"] = res.obstructions
    rep.data["transform_terms"] = res.transform.term_count()
    _emit(cfg, res.product)
    return rep


def cmd_reduce(cfg: RunConfig) -> Report:
    from ..coiso.adapted import check_projectable, reduced_product
    S, coiso = resolve(cfg, need_chart=True)
    coiso = _need_coiso(coiso, S)
    rep = check_projectable(S, coiso, cfg.degree)
    rep.name = "reduce"
    if rep.ok:
        R = reduced_product(S, coiso)
        rep.data["reduced"] = dumps(R).splitlines()[1:]
        _emit(cfg, R)
    return rep


def cmd_commutant(cfg: RunConfig) -> Report:
    from ..coiso.idealizer import idealizer_commutant
    S, coiso = resolve(cfg, need_chart=True)
    coiso = _need_coiso(coiso, S)
    D = cfg.degree or 2
    N = max(S.order - 2, 0)
    return idealizer_commutant(S, coiso, D, N).report


def _fedosov_from_config(path: str | None, cfg: RunConfig):
    from ..fedosov import FedosovData
    spec = {}
    if path:
        try:
            spec = json.loads(_read(path))
        except json.JSONDecodeError as exc:
            raise InputError(f"config {path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") \
                from None
    extra = set(spec) - {"pairs", "order", "max_deg", "omega", "s"}
    if extra:
        raise InputError(f"config: unknown field(s) {sorted(extra)}")
    pairs = spec.get("pairs")
    chart = Chart.darboux([tuple(p) for p in pairs]) if pairs else Chart.standard(cfg.dim // 2)
    u = chart.universe
    order = int(spec.get("order", cfg.order))
    max_deg = int(spec.get("max_deg", 2 * order + 2))
    omega = {}
    try:
        for r, comps in spec.get("omega", {}).items():
            row = {}
            for key, text in comps.items():
                a, b = (s.strip() for s in key.split(","))
                i, j = u.pos(a), u.pos(b)
                c = parse_coeff(text, u)
                if i > j:
                    i, j, c = j, i, -c
                row[(i, j)] = row[(i, j)] + c if (i, j) in row else c
            omega[int(r)] = row
        data = FedosovData(chart, max_deg, omega, None)
        if "s" in spec:
            data.s = _parse_s(data, spec["s"])
        data.check_inputs()
    except (ParseError, ValueError, UniverseError) as exc:
        raise InputError(f"config: {exc}") from None
    return data, order


def _parse_s(data, items):
    """``[{"nu": k, "y": {"q": 2}, "c": "1/2"}]`` as ``sum c nu^k y^...``."""
    sp = data.space
    z = sp.zero_x
    terms = {}
    for it in items:
        ye = list(z)
        for name, k in it.get("y", {}).items():
            ye[sp.base.pos(name)] = int(k)
        c = parse_scalar(str(it.get("c", "1")))
        terms[((), int(it.get("nu", 0)), z, tuple(ye), ())] = c
    return sp.element(terms)


def cmd_fedosov_build(cfg: RunConfig) -> Report:
    from ..fedosov import fedosov_star
    data, order = _fedosov_from_config(cfg.config, cfg)
    res = fedosov_star(data, order)
    rep = res.report
    ax = check_star_axioms(res.product, cfg.degree or 2)
    rep.extend(ax, prefix="axioms: ")
    if not data.omega and data.s is None:
        W = build_exponential_star(data.chart, "WEYL", order)
        rep.add("equals the Weyl product", res.product == W,
                order=res.product.differs_at(W))
    _emit(cfg, res.product)
    return rep


def cmd_gutt_check(cfg: RunConfig) -> Report:
    from ..gutt import (BUILTIN_LIE, LieAlgebraData, LieAlgebraError, bch_exponential_check,
                        check_gutt_identities, check_gutt_star, gutt_star, quantum_moment_check)
    if cfg.config:
        try:
            lie = LieAlgebraData.from_table(json.loads(_read(cfg.config)))
        except (json.JSONDecodeError, LieAlgebraError, KeyError, ParseError) as exc:
            raise InputError(f"lie algebra {cfg.config}: {exc}") from None
    else:
        name = cfg.builtin or "heis3"
        if name not in BUILTIN_LIE:
            raise InputError(f"builtin: unknown Lie algebra {name!r}; choose from "
                             f"{', '.join(BUILTIN_LIE)}")
        lie = BUILTIN_LIE[name]()
    D = cfg.degree or 3
    rep = Report("gutt-check", scope={"algebra": ",".join(lie.names), "order": cfg.order,
                                      "degree": D})
    rep.extend(check_gutt_identities(lie, max_power=5, assoc_degree=2))
    for a in range(lie.n):
        for b in range(lie.n):
            if a != b:
                rep.extend(bch_exponential_check(lie, a, b, 4),
                           prefix=f"{lie.names[a]},{lie.names[b]}: ")
    S = gutt_star(lie, cfg.order)
    rep.extend(check_gutt_star(lie, S, D))
    rep.extend(check_star_axioms(S, 2), prefix="axioms: ")
    J = [CoeffFn.var(lie.universe, n) for n in lie.names]
    rep.extend(quantum_moment_check(lie, J, S, D), prefix="J = id: ")
    return rep


def cmd_casebook(cfg: RunConfig) -> Report:
    if cfg.case == "torus":
        from ..casebook.torus import torus_report
        return torus_report()
    if cfg.case == "cpn":
        from ..casebook.cpn import cpn_report
        return cpn_report(cfg.order if cfg.order != 3 else 6)
    raise InputError(f"casebook: unknown case {cfg.case!r}; choose torus or cpn")


def cmd_roundtrip(cfg: RunConfig) -> Report:
    from .randomgen import random_objects
    rep = Report("roundtrip", scope={"count": cfg.count, "seed": cfg.seed})
    if cfg.product or cfg.builtin:
        S, _ = resolve(cfg)
        rep.add("given product", roundtrip_equal(S))
    bad = None
    objs = random_objects(random.Random(cfg.seed), cfg.count)
    for k, obj in enumerate(objs):
        if not (roundtrip_equal(obj) and loads(dumps(obj, compact=True)) == obj):
            bad = {"index": k, "kind": type(obj).__name__}
            break
    rep.add("print o parse = id on random objects", bad is None, witness=bad,
            note=f"{len(objs)} objects")
    return rep


COMMANDS = {
    "verify-axioms": cmd_verify_axioms,
    "adapt": cmd_adapt,
    "reduce": cmd_reduce,
    "commutant": cmd_commutant,
    "fedosov-build": cmd_fedosov_build,
    "gutt-check": cmd_gutt_check,
    "casebook": cmd_casebook,
    "roundtrip": cmd_roundtrip,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="deformq", description="Exact star-product verification.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        if name == "casebook":
            p.add_argument("case", choices=["torus", "cpn"])
        p.add_argument("--order", type=int, default=3, help="truncation order N")
        p.add_argument("--degree", type=int, default=None, help="degree bound D")
        p.add_argument("--chart", help="coisotropic chart file (JSON)")
        p.add_argument("--product", help="builtin name or serialized product file")
        p.add_argument("--builtin", help="builtin product or Lie algebra")
        p.add_argument("--dim", type=int, default=2, help="dimension for builtin flat products")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--emit", help="write the resulting product here")
        p.add_argument("--config", help="Fedosov or Lie-algebra config file (JSON)")
        p.add_argument("--count", type=int, default=100, help="random objects for roundtrip")
        p.add_argument("--seed", type=int, default=0)
    return ap


def run(cfg: RunConfig) -> tuple[int, Report]:
    cfg.validate()
    rep = COMMANDS[cfg.command](cfg)
    return (0 if rep.ok else 1), rep


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    cfg = RunConfig(**{k: v for k, v in vars(args).items()})
    try:
        status, rep = run(cfg)
    except (InputError, ParseError, ChartError, UniverseError) as exc:
        print(f"deformq: error: {exc}", file=sys.stderr)
        return 2
    text = dumps(rep)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    if status:
        first = rep.first_failure()
        print(f"deformq: check failed: {first.check}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
