"""Linear systems over the discrete valuation ring Z_(p).

Z_(p) is represented inside Q as the rationals whose denominator is prime
to p. :func:`dvr_solve` eliminates with full valuation pivoting: at each
stage the remaining entry of smallest p-valuation becomes the pivot (ties:
lowest row index, then lowest column index), its row is used to express the
pivot variable through the others, and the pivot column is cleared from the
remaining rows. Every multiplier then has nonnegative valuation, so the
transformation is unimodular over Z_(p).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .padic import INF, vp


class DimensionError(ValueError):
    pass


@dataclass
class DVRSystem:
    """``matrix`` is a list of rows; each row is either a dense sequence or a
    sparse ``{column: value}`` mapping. ``ncols`` is required for sparse rows."""

    matrix: list
    rhs: list
    p: int
    ncols: int | None = None

    def __post_init__(self):
        if len(self.matrix) != len(self.rhs):
            raise DimensionError("matrix and right-hand side have different row counts")
        rows = []
        width = self.ncols
        for r in self.matrix:
            if isinstance(r, dict):
                if width is None:
                    raise DimensionError("sparse rows need ncols")
                if any(not 0 <= c < width for c in r):
                    raise DimensionError("column index out of range")
                rows.append({c: Fraction(v) for c, v in r.items() if v})
            else:
                if width is None:
                    width = len(r)
                elif len(r) != width:
                    raise DimensionError("ragged matrix")
                rows.append({c: Fraction(v) for c, v in enumerate(r) if v})
        self.ncols = width or 0
        self.rows = rows
        self.rhs = [Fraction(b) for b in self.rhs]

    @property
    def nrows(self) -> int:
        return len(self.rows)


@dataclass
class Infeasible:
    """Certificate row ``y`` with y*A having every entry of positive valuation
    while y*b = 1; no Z_(p) solution can exist."""

    certificate: dict  # row index -> multiplier
    reason: str
    row: int = -1

    def __bool__(self):
        return False


@dataclass
class Solution:
    x: list
    pivots: list = field(default_factory=list)  # (row, col, valuation)

    def __bool__(self):
        return True


def dvr_solve(system: DVRSystem) -> Solution | Infeasible:
    p = system.p
    rows = [dict(r) for r in system.rows]
    rhs = list(system.rhs)
    m, n = system.nrows, system.ncols
    # transform[r] expresses current row r as a combination of original rows
    transform = [{r: Fraction(1)} for r in range(m)]
    cols: dict = {}
    for r, row in enumerate(rows):
        for c in row:
            cols.setdefault(c, set()).add(r)
    val_cache: dict = {}

    def v(q):
        out = val_cache.get(q)
        if out is None:
            out = vp(q, p)
            val_cache[q] = out
        return out

    active = set(range(m))
    pivots = []
    while True:
        best = None
        for r in sorted(active):
            for c, a in rows[r].items():
                key = (v(a), r, c)
                if best is None or key < best:
                    best = key
        if best is None:
            break
        pv, pr, pc = best
        piv = rows[pr][pc]
        if v(rhs[pr]) < pv:
            return _infeasible(transform[pr], rhs[pr], pr, "pivot row right-hand side has lower valuation than its pivot")
        active.discard(pr)
        pivots.append((pr, pc, pv))
        prow = rows[pr]
        for r in sorted(cols.get(pc, ()) & active):
            f = rows[r][pc] / piv
            row = rows[r]
            for c, a in prow.items():
                nv = row.get(c, 0) - f * a
                if nv:
                    if c not in row:
                        cols.setdefault(c, set()).add(r)
                    row[c] = nv
                elif c in row:
                    del row[c]
                    cols[c].discard(r)
            rhs[r] -= f * rhs[pr]
            t = transform[r]
            for k, a in transform[pr].items():
                nv = t.get(k, 0) - f * a
                if nv:
                    t[k] = nv
                else:
                    t.pop(k, None)
    for r in sorted(active):
        if rhs[r] != 0:
            return _infeasible(transform[r], rhs[r], r, "inconsistent zero row")

    x = [Fraction(0)] * n
    for pr, pc, _ in reversed(pivots):
        acc = rhs[pr]
        for c, a in rows[pr].items():
            if c != pc:
                acc -= a * x[c]
        x[pc] = acc / rows[pr][pc]
    assert all(v(xi) >= 0 for xi in x if xi)
    return Solution(x=x, pivots=pivots)


def _infeasible(trow: dict, b: Fraction, r: int, reason: str) -> Infeasible:
    return Infeasible(certificate={k: a / b for k, a in sorted(trow.items())}, reason=reason, row=r)


def check_infeasibility_certificate(system: DVRSystem, cert: Infeasible) -> bool:
    """Independently confirm y*b == 1 and every entry of y*A has valuation > 0."""
    yb = sum((system.rhs[k] * a for k, a in cert.certificate.items()), Fraction(0))
    if yb != 1:
        return False
    yA: dict = {}
    for k, a in cert.certificate.items():
        for c, e in system.rows[k].items():
            yA[c] = yA.get(c, 0) + a * e
    return all(vp(val, system.p) > 0 for val in yA.values() if val)


def residual_is_zero(system: DVRSystem, x: Sequence) -> bool:
    for row, b in zip(system.rows, system.rhs):
        if sum((a * x[c] for c, a in row.items()), Fraction(0)) != b:
            return False
    return True


def in_dvr(q, p: int) -> bool:
    return vp(q, p) >= 0 if q else True


__all__ = ["DVRSystem", "Solution", "Infeasible", "dvr_solve", "DimensionError",
           "check_infeasibility_certificate", "residual_is_zero", "in_dvr", "INF"]
