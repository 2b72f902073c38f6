"""Document-level text format for coefficients, operators, products and reports.

Every document starts with the version header ``%deformq-text 1``.  Reports
are JSON after the header.  See ``docs/grammar.md`` for the grammar.
"""
from __future__ import annotations

import json

from ..algebra.coeff import CoeffFn, Universe
from ..algebra.exppoly import ExpPoly
from ..algebra.series import NuSeries
from ..algebra.text import (HEADER, ParseError, Parser, format_coeff, format_exppoly,
                            format_series, format_universe)
from ..report import Report
from ..starprod.ops import BiDiffOp, DiffOp, MultiDiffOp, op_class
from ..starprod.star import Chart, EquivalenceTransform, StarProduct


# -- printing ------------------------------------------------------------------

def _index_text(u: Universe, I) -> str:
    parts = []
    for name, k in zip(u.names, I):
        if k:
            parts.append(name if k == 1 else f"{name}^{k}")
    return "d[" + " ".join(parts) + "]"


def format_op(op: MultiDiffOp) -> str:
    if op.is_zero():
        return "0"
    u = op.universe
    out = []
    for key, c in op.sorted_terms():
        out.append("{" + format_coeff(c) + "} " + " # ".join(_index_text(u, I) for I in key))
    return " + ".join(out)


def _op_kind(op: MultiDiffOp) -> str:
    return {1: "diffop", 2: "bidiffop"}.get(op.arity, f"op{op.arity}")


def format_star(S: StarProduct) -> str:
    u = S.universe
    lines = [f"star {format_universe(u)} N={S.order}"]
    lines.append("pairs : " + " ".join(f"[{q} {p}]" for q, p in S.chart.pairs))
    lines.append("poisson : " + format_op(S.chart.poisson))
    for r, C in enumerate(S.C):
        lines.append(f"C{r} : " + format_op(C))
    return "\n".join(lines)


def format_equivalence(T: EquivalenceTransform) -> str:
    lines = [f"equivalence {format_universe(T.universe)} N={T.order}"]
    for r, t in enumerate(T.ops[1:], 1):
        lines.append(f"T{r} : " + format_op(t))
    return "\n".join(lines)


def dumps(obj, compact: bool = False) -> str:
    """Serialize with the version header; the result parses back to an equal value.

    ``compact`` puts the body on one line; both forms parse identically.
    """
    if isinstance(obj, Report):
        if compact:
            return HEADER + "\n" + json.dumps(obj.to_dict(), separators=(",", ":"),
                                              ensure_ascii=False) + "\n"
        return HEADER + "\n" + obj.to_json()
    if isinstance(obj, CoeffFn):
        body = f"coeff {format_universe(obj.universe)} : {format_coeff(obj)}"
    elif isinstance(obj, ExpPoly):
        body = "exppoly " + format_exppoly(obj)
    elif isinstance(obj, NuSeries):
        c0 = obj[0]
        if isinstance(c0, CoeffFn):
            body = f"series N={obj.order} {format_universe(c0.universe)} : {format_series(obj)}"
        else:
            body = f"series N={obj.order} : {format_series(obj)}"
    elif isinstance(obj, MultiDiffOp):
        body = f"{_op_kind(obj)} {format_universe(obj.universe)} : {format_op(obj)}"
    elif isinstance(obj, StarProduct):
        body = format_star(obj)
    elif isinstance(obj, EquivalenceTransform):
        body = format_equivalence(obj)
    else:
        raise TypeError(f"no text form for {type(obj).__name__}")
    if compact:
        body = " ".join(body.split())
    return HEADER + "\n" + body + "\n"


# -- parsing -------------------------------------------------------------------

class DocParser(Parser):
    def index(self, u: Universe):
        self.expect("d")
        self.expect("[")
        spec: dict[str, int] = {}
        while not self.at("]"):
            tok = self.peek()
            name = self.expect_name()
            if name not in u.index:
                self.error(f"unknown variable {name!r}", tok)
            if name in spec:
                self.error(f"repeated variable {name!r} in derivative", tok)
            k = 1
            if self.at("^"):
                self.next()
                k = self.expect_int()
                if k <= 0:
                    self.error("derivative orders must be positive", tok)
            spec[name] = k
        self.expect("]")
        return u.multi_index(spec)

    def op(self, u: Universe, arity: int) -> MultiDiffOp:
        cls = op_class(arity)
        if self.peek().kind == "int" and self.peek().value == "0":
            self.next()
            return cls.zero(u)
        terms: dict = {}
        while True:
            self.expect("{")
            c = self.coeff_body(u)
            self.expect("}")
            key = [self.index(u)]
            for _ in range(arity - 1):
                self.expect("#")
                key.append(self.index(u))
            if self.at("#"):
                self.error(f"too many slots for arity {arity}")
            key = tuple(key)
            if key in terms:
                self.error("repeated derivative key (operators print in normal form)")
            terms[key] = c
            if not self.at("+"):
                return cls(u, terms)
            self.next()

    def label(self, prefix: str, r: int):
        tok = self.peek()
        if tok.kind != "name" or tok.value != f"{prefix}{r}":
            self.error(f"expected {prefix}{r}", tok)
        self.next()
        self.expect(":")

    def star(self) -> StarProduct:
        u = self.universe()
        order = self.keyval_int("N")
        self.expect("pairs")
        self.expect(":")
        pairs = []
        while self.at("["):
            self.next()
            q = self.expect_name()
            p = self.expect_name()
            self.expect("]")
            for v in (q, p):
                if v not in u.index:
                    self.error(f"unknown variable {v!r} in pairs")
            pairs.append((q, p))
        self.expect("poisson")
        self.expect(":")
        P = self.op(u, 2)
        C = []
        for r in range(order + 1):
            self.label("C", r)
            C.append(self.op(u, 2))
        return StarProduct(Chart(u, P, tuple(pairs)), C)

    def equivalence(self) -> EquivalenceTransform:
        u = self.universe()
        order = self.keyval_int("N")
        ops = [DiffOp.identity(u)]
        for r in range(1, order + 1):
            self.label("T", r)
            ops.append(self.op(u, 1))
        try:
            return EquivalenceTransform(ops)
        except ValueError as exc:
            self.error(str(exc))


def loads(text: str):
    """Parse any document produced by :func:`dumps`."""
    stripped = text.lstrip()
    first, _, rest = stripped.partition("\n")
    if first.strip() != HEADER:
        if first.startswith("%"):
            raise ParseError(f"unsupported header {first.strip()!r}; expected {HEADER!r}",
                             text, 0)
        raise ParseError(f"missing header {HEADER!r}", text, 0)
    if rest.lstrip().startswith("{"):
        try:
            return Report.from_json(rest)
        except (json.JSONDecodeError, KeyError) as exc:
            raise ParseError(f"bad report document: {exc}", rest, 0) from None
    p = DocParser(rest)
    kind = p.expect_name()
    if kind == "coeff":
        u = p.universe()
        p.expect(":")
        obj = p.coeff_body(u)
    elif kind == "exppoly":
        obj = p.exppoly()
    elif kind == "series":
        order = p.keyval_int("N")
        u = p.universe() if p.at("<") else None
        p.expect(":")
        obj = p.series_body(u, order)
    elif kind in ("diffop", "bidiffop") or (kind.startswith("op") and kind[2:].isdigit()):
        arity = {"diffop": 1, "bidiffop": 2}.get(kind) or int(kind[2:])
        u = p.universe()
        p.expect(":")
        obj = p.op(u, arity)
    elif kind == "star":
        obj = p.star()
    elif kind == "equivalence":
        obj = p.equivalence()
    else:
        raise ParseError(f"unknown document kind {kind!r}", rest, 0)
    p.expect_eof()
    return obj


def roundtrip_equal(obj) -> bool:
    text = dumps(obj)
    back = loads(text)
    return back == obj and dumps(back) == text
