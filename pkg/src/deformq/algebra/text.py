"""Text form of coefficient functions and truncated series.

Grammar (whitespace, including newlines, is insignificant)::

    universe := "<" [var {"," var}] ">"        var := ["~"] NAME
    sum      := "0" | term {("+" | "-") term}
    term     := [PARAM ["^" INT] "*"] "(" scalar ")" ["*" factor {["*"] factor}]
    factor   := ["~"] NAME ["^" INT]
    scalar   := RATIONAL | RATIONAL ("+" | "-") RATIONAL "i"

``~phi`` is the unit ``e^{i*phi}`` of a periodic coordinate, so ``~phi^-2``
means ``e^{-2i*phi}``.  ``PARAM`` is ``nu`` for deformation series and
``lam`` for the radial parameter.  An exponential-polynomial prints as
``[x N=2] exp {alpha series} * {polynomial series}``.  A ``-`` between terms negates the next
coefficient; the printer only emits ``+`` so printing is canonical.
The full document grammar lives in ``docs/grammar.md``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .coeff import CoeffFn, Universe, glex_key
from .exppoly import ExpPoly
from .scalar import ONE, ZERO, Scalar, format_scalar, parse_scalar
from .series import NuSeries

FORMAT_VERSION = 1
HEADER = f"%deformq-text {FORMAT_VERSION}"
RESERVED = {"nu", "lam", "d"}


class ParseError(ValueError):
    def __init__(self, msg: str, text: str = "", pos: int = 0):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line, self.col = line, col


# -- printing ------------------------------------------------------------------

def format_universe(u: Universe) -> str:
    return "<" + ", ".join(("~" + n) if u.is_angle(n) else n for n in u.names) + ">"


def _factors(u: Universe, e: tuple[int, ...]) -> str:
    parts = []
    for name, k in zip(u.names, e):
        if k == 0:
            continue
        base = ("~" + name) if u.is_angle(name) else name
        parts.append(base if k == 1 else f"{base}^{k}")
    return " ".join(parts)


def _term(c: Scalar, fac: str, prefix: str = "") -> str:
    s = f"{prefix}({format_scalar(c)})"
    return f"{s} * {fac}" if fac else s


def format_coeff(f: CoeffFn) -> str:
    if f.is_zero():
        return "0"
    return " + ".join(_term(c, _factors(f.universe, e)) for e, c in f.sorted_terms())


def _param_prefix(param: str, r: int) -> str:
    if r == 0:
        return ""
    return f"{param} * " if r == 1 else f"{param}^{r} * "


def format_series(s: NuSeries, param: str = "nu") -> str:
    terms = []
    for r, c in enumerate(s.coeffs):
        pre = _param_prefix(param, r)
        if isinstance(c, CoeffFn):
            for e, v in c.sorted_terms():
                terms.append(_term(v, _factors(c.universe, e), pre))
        else:
            c = Scalar.coerce(c)
            if not c.is_zero():
                terms.append(_term(c, "", pre))
    return " + ".join(terms) if terms else "0"


def _upoly_terms(p: dict, var: str, pre: str) -> list[str]:
    out = []
    for k in sorted(p):
        fac = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        out.append(_term(p[k], fac, pre))
    return out


def format_exppoly(f: ExpPoly) -> str:
    alpha = format_series(NuSeries(f.alpha), "lam")
    terms = []
    for r, p in enumerate(f.poly):
        terms += _upoly_terms(p, f.var, _param_prefix("lam", r))
    return f"[{f.var} N={f.order}] exp {{{alpha}}} * {{{' + '.join(terms) or '0'}}}"


def dump_coeff(f: CoeffFn) -> str:
    return f"coeff {format_universe(f.universe)} : {format_coeff(f)}"


def dump_series(s: NuSeries, universe: Universe | None = None) -> str:
    head = f"series N={s.order}"
    if universe is not None:
        head += " " + format_universe(universe)
    return f"{head} : {format_series(s)}"


# -- lexing / parsing ------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<scalar>\((?:[^()]*)\))
  | (?P<int>-?\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[~^*+\-<>,:\[\]{}#=()%])
""", re.VERBOSE)


@dataclass
class Tok:
    kind: str
    value: str
    pos: int


def tokenize(text: str) -> list[Tok]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Tok(kind, m.group(), pos))
        pos = m.end()
    out.append(Tok("eof", "", len(text)))
    return out


class Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    # token helpers
    def peek(self, k: int = 0) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Tok:
        t = self.peek()
        self.i += 1
        return t

    def error(self, msg: str, tok: Tok | None = None):
        tok = tok or self.peek()
        raise ParseError(msg, self.text, tok.pos)

    def at(self, value: str) -> bool:
        t = self.peek()
        return t.kind in ("op", "name") and t.value == value

    def expect(self, value: str) -> Tok:
        t = self.peek()
        if t.value != value or t.kind not in ("op", "name"):
            self.error(f"expected {value!r}, found {t.value or 'end of input'!r}")
        return self.next()

    def expect_name(self) -> str:
        t = self.peek()
        if t.kind != "name":
            self.error(f"expected a name, found {t.value or 'end of input'!r}")
        return self.next().value

    def expect_int(self) -> int:
        t = self.peek()
        if t.kind != "int":
            self.error(f"expected an integer, found {t.value or 'end of input'!r}")
        return int(self.next().value)

    def expect_eof(self):
        if self.peek().kind != "eof":
            self.error(f"trailing input {self.peek().value!r}")

    def keyval_int(self, key: str) -> int:
        self.expect(key)
        self.expect("=")
        return self.expect_int()

    # grammar pieces
    def universe(self) -> Universe:
        self.expect("<")
        names, angles = [], set()
        while not self.at(">"):
            if names:
                self.expect(",")
            angle = False
            if self.at("~"):
                self.next()
                angle = True
            tok = self.peek()
            name = self.expect_name()
            if name in RESERVED:
                self.error(f"{name!r} is reserved", tok)
            if name in names:
                self.error(f"duplicate variable {name!r}", tok)
            names.append(name)
            if angle:
                angles.add(name)
        self.expect(">")
        return Universe(tuple(names), frozenset(angles))

    def scalar(self) -> Scalar:
        t = self.peek()
        if t.kind != "scalar":
            self.error(f"expected a parenthesised scalar, found {t.value or 'end of input'!r}")
        self.next()
        try:
            return parse_scalar(t.value[1:-1])
        except (ValueError, ZeroDivisionError) as exc:
            self.error(f"bad scalar {t.value}: {exc}", t)

    def _factor(self, u: Universe | None, radial: str | None) -> tuple[str, int, bool]:
        angle = False
        if self.at("~"):
            self.next()
            angle = True
        tok = self.peek()
        name = self.expect_name()
        k = 1
        if self.at("^"):
            self.next()
            k = self.expect_int()
        if radial is not None:
            if name != radial or angle:
                self.error(f"unknown variable {name!r}", tok)
            return name, k, angle
        if name not in u.index:
            self.error(f"unknown variable {name!r}", tok)
        if angle != u.is_angle(name):
            self.error(f"periodic marker mismatch for {name!r}", tok)
        if k < 0 and not angle:
            self.error(f"negative exponent on non-periodic {name!r}", tok)
        return name, k, angle

    def _is_factor_start(self, k: int = 0) -> bool:
        t = self.peek(k)
        if t.kind == "op" and t.value == "~":
            return True
        return t.kind == "name" and t.value not in RESERVED

    def terms(self, u: Universe | None, param: str | None = None, radial: str | None = None):
        """Yield ``(param_power, scalar, {var: exp})`` for a sum."""
        if self.peek().kind == "int" and self.peek().value == "0":
            self.next()
            return []
        out = []
        sign = ONE
        while True:
            r = 0
            if param is not None and self.at(param):
                self.next()
                r = 1
                if self.at("^"):
                    self.next()
                    r = self.expect_int()
                    if r < 0:
                        self.error("negative parameter power")
                self.expect("*")
            c = self.scalar() * sign
            expo: dict[str, int] = {}
            while True:
                if self.at("*") and self._is_factor_start(1):
                    self.next()
                elif not (expo and self._is_factor_start()):
                    break
                name, k, _ = self._factor(u, radial)
                if name in expo:
                    self.error(f"repeated factor {name!r}")
                expo[name] = k
            out.append((r, c, expo))
            if self.at("+"):
                self.next()
                sign = ONE
            elif self.at("-"):
                self.next()
                sign = -ONE
            else:
                return out

    def coeff_body(self, u: Universe) -> CoeffFn:
        acc: dict = {}
        for r, c, expo in self.terms(u):
            e = u.multi_index(expo)
            acc[e] = acc.get(e, ZERO) + c
        return CoeffFn(u, acc)

    def series_body(self, u: Universe | None, order: int, param: str = "nu") -> NuSeries:
        if u is None:
            vals = [ZERO] * (order + 1)
            for r, c, expo in self.terms(None, param, radial=""):
                if r > order:
                    self.error(f"term of order {r} beyond N={order}")
                vals[r] = vals[r] + c
            return NuSeries(vals)
        acc = [dict() for _ in range(order + 1)]
        for r, c, expo in self.terms(u, param):
            if r > order:
                self.error(f"term of order {r} beyond N={order}")
            e = u.multi_index(expo)
            acc[r][e] = acc[r].get(e, ZERO) + c
        return NuSeries([CoeffFn(u, a) for a in acc])

    def exppoly(self) -> ExpPoly:
        self.expect("[")
        var = self.expect_name()
        order = self.keyval_int("N")
        self.expect("]")
        self.expect("exp")
        self.expect("{")
        alpha = [ZERO] * (order + 1)
        for r, c, expo in self.terms(None, "lam", radial=var):
            if expo or r > order:
                self.error("exponent series must be scalar and within N")
            alpha[r] = alpha[r] + c
        self.expect("}")
        self.expect("*")
        self.expect("{")
        poly = [dict() for _ in range(order + 1)]
        for r, c, expo in self.terms(None, "lam", radial=var):
            if r > order:
                self.error(f"term of order {r} beyond N={order}")
            k = expo.get(var, 0)
            if k < 0:
                self.error("negative radial power")
            poly[r][k] = poly[r].get(k, ZERO) + c
        self.expect("}")
        return ExpPoly(poly, alpha, var)


def _strip_header(text: str) -> str:
    lines = text.lstrip().split("\n", 1)
    first = lines[0].strip()
    if first.startswith("%"):
        if first != HEADER:
            raise ParseError(f"unsupported header {first!r}; expected {HEADER!r}", text, 0)
        return lines[1] if len(lines) > 1 else ""
    return text


def parse_coeff(text: str, universe: Universe | None = None) -> CoeffFn:
    """Parse ``coeff <..> : body`` or a bare body when ``universe`` is given."""
    text = _strip_header(text)
    p = Parser(text)
    if universe is None:
        p.expect("coeff")
        universe = p.universe()
        p.expect(":")
    f = p.coeff_body(universe)
    p.expect_eof()
    return f


def parse_series(text: str, universe: Universe | None = None) -> NuSeries:
    text = _strip_header(text)
    p = Parser(text)
    p.expect("series")
    order = p.keyval_int("N")
    if p.at("<"):
        universe = p.universe()
    p.expect(":")
    s = p.series_body(universe, order)
    p.expect_eof()
    return s


def parse_exppoly(text: str) -> ExpPoly:
    p = Parser(_strip_header(text))
    f = p.exppoly()
    p.expect_eof()
    return f
