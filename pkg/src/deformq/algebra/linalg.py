"""Sparse exact linear algebra over Scalars: rows are ``{column: Scalar}`` dicts."""
from __future__ import annotations

from typing import Iterable, Sequence

from .scalar import ONE, Scalar


def rref(rows: Iterable[dict], columns: Sequence) -> tuple[list[dict], list]:
    """Reduced row echelon form with pivots taken in ``columns`` order.

    Returns the reduced rows and their pivot columns.
    """
    rank = {c: i for i, c in enumerate(columns)}
    pivots: dict = {}  # column -> row
    for row in rows:
        row = {c: v for c, v in row.items() if not v.is_zero()}
        # eliminate existing pivots
        changed = True
        while row and changed:
            changed = False
            for c in sorted(row, key=rank.__getitem__):
                if c in pivots:
                    f = row[c]
                    for pc, pv in pivots[c].items():
                        nv = row.get(pc)
                        nv = -f * pv if nv is None else nv - f * pv
                        if nv.is_zero():
                            row.pop(pc, None)
                        else:
                            row[pc] = nv
                    changed = True
                    break
        if not row:
            continue
        lead = min(row, key=rank.__getitem__)
        inv = row[lead].inverse()
        row = {c: v * inv for c, v in row.items()}
        # back-substitute into existing pivots
        for pc, prow in pivots.items():
            f = prow.get(lead)
            if f is not None:
                for c, v in row.items():
                    nv = prow.get(c)
                    nv = -f * v if nv is None else nv - f * v
                    if nv.is_zero():
                        prow.pop(c, None)
                    else:
                        prow[c] = nv
        pivots[lead] = row
    order = sorted(pivots, key=rank.__getitem__)
    return [pivots[c] for c in order], order


def nullspace(rows: Iterable[dict], columns: Sequence) -> list[dict]:
    """Basis of the kernel, one vector per free column (in ``columns`` order)."""
    red, piv = rref(rows, columns)
    pivset = set(piv)
    out = []
    for free in columns:
        if free in pivset:
            continue
        vec = {free: ONE}
        for prow, pc in zip(red, piv):
            v = prow.get(free)
            if v is not None:
                vec[pc] = -v
        out.append(vec)
    return out


def span_rref(vectors: Iterable[dict], columns: Sequence) -> list[dict]:
    """Canonical basis of the span of ``vectors``."""
    return rref(vectors, columns)[0]
