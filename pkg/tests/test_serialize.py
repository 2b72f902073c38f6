import random

import pytest
from hypothesis import given, settings, strategies as st

from deformq.algebra import HEADER, CoeffFn, ParseError, Universe
from deformq.cli.randomgen import random_objects
from deformq.cli.serialize import dumps, loads, roundtrip_equal
from deformq.report import Report
from deformq.starprod import Chart, build_exponential_star


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_objects_roundtrip(seed):
    for obj in random_objects(random.Random(seed), 8):
        assert roundtrip_equal(obj)
        assert loads(dumps(obj, compact=True)) == obj


def test_printing_is_canonical():
    u = Universe(("q", "p"))
    a = CoeffFn(u, {(1, 0): 1, (0, 1): 2})
    b = CoeffFn(u, {(0, 1): 2, (1, 0): 1})
    assert dumps(a) == dumps(b)
    S = build_exponential_star(Chart.standard(1), "WEYL", 3)
    assert dumps(loads(dumps(S))) == dumps(S)


def test_report_roundtrip():
    rep = Report("demo", scope={"n": 1})
    rep.add("first", True)
    rep.add("second", False, order=2, witness={"f": "(1) * q"})
    back = loads(dumps(rep))
    assert back.to_dict() == rep.to_dict()
    assert loads(dumps(rep, compact=True)).to_dict() == rep.to_dict()


@pytest.mark.parametrize("text,msg", [
    ("coeff <q> : (1) * q\n", "missing header"),
    ("%deformq-text 9\ncoeff <q> : (1) * q\n", "unsupported header"),
    (HEADER + "\nwidget <q> : 0\n", "unknown document kind"),
    (HEADER + "\ncoeff <q> : (1) * q extra\n", "line"),
])
def test_parse_errors(text, msg):
    with pytest.raises(ParseError, match=msg):
        loads(text)
