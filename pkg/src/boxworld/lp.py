"""Exact rational simplex for problems in equality form.

Solves ``min c.x  s.t.  A x = b, x >= 0`` over :class:`fractions.Fraction`
with a two-phase tableau method and Bland's rule, so it terminates on
degenerate problems. Infeasible systems come back with a Farkas vector
``y`` satisfying ``y.A <= 0`` and ``y.b > 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import MalformedSystem

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: tuple | None = None
    value: Fraction | None = None
    farkas: tuple | None = None


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    point: tuple | None = None
    certificate: tuple | None = None


def _check_system(A, b, n_vars):
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    if len(A) != len(b):
        raise MalformedSystem(f"{len(A)} rows but {len(b)} right-hand sides")
    if n_vars is None:
        if not A:
            raise MalformedSystem("cannot infer variable count from an empty system")
        n_vars = len(A[0])
    if n_vars < 1:
        raise MalformedSystem("need at least one variable")
    for i, row in enumerate(A):
        if len(row) != n_vars:
            raise MalformedSystem(f"row {i} has {len(row)} entries, expected {n_vars}")
    return A, b, n_vars


class _Tableau:
    """Dense tableau; columns ``0..n-1`` are structural, ``n..n+m-1`` artificial."""

    def __init__(self, A, b):
        m, n = len(A), len(A[0]) if A else 0
        self.m, self.n = m, n
        self.sign = [(-1 if bi < 0 else 1) for bi in b]
        self.rows = []
        for i in range(m):
            s = self.sign[i]
            art = [ONE if k == i else ZERO for k in range(m)]
            self.rows.append([s * v for v in A[i]] + art + [s * b[i]])
        self.basis = [n + i for i in range(m)]
        self.active = [True] * (n + m)

    def pivot(self, r, col):
        prow = self.rows[r]
        piv = prow[col]
        if piv != 1:
            prow[:] = [v / piv for v in prow]
        for i, row in enumerate(self.rows):
            if i != r:
                f = row[col]
                if f:
                    row[:] = [v - f * pv for v, pv in zip(row, prow)]
        self.basis[r] = col

    def reduced_costs(self, cost):
        """``cost_j - c_B . column_j`` for every column, plus ``-c_B . rhs`` last."""
        width = self.n + self.m + 1
        rc = [cost[j] if j < len(cost) else ZERO for j in range(width - 1)] + [ZERO]
        for row, bj in zip(self.rows, self.basis):
            cb = cost[bj]
            if cb:
                for j in range(width):
                    rc[j] -= cb * row[j]
        return rc

    def run(self, cost):
        """Minimise ``cost`` from the current basis. Returns False if unbounded."""
        rc = self.reduced_costs(cost)
        while True:
            col = next((j for j in range(self.n + self.m)
                        if self.active[j] and rc[j] < 0), None)
            if col is None:
                return True
            best = None
            for i, row in enumerate(self.rows):
                if row[col] > 0:
                    ratio = row[-1] / row[col]
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return False
            r = best[1]
            self.pivot(r, col)
            f = rc[col]
            prow = self.rows[r]
            rc = [v - f * pv for v, pv in zip(rc, prow)]

    def solution(self):
        x = [ZERO] * self.n
        for row, bj in zip(self.rows, self.basis):
            if bj < self.n:
                x[bj] = row[-1]
        return tuple(x)


def _phase_one(A, b, n):
    tab = _Tableau(A, b)
    m = tab.m
    cost = [ZERO] * n + [ONE] * m
    tab.run(cost)
    rc = tab.reduced_costs(cost)
    infeas = -rc[-1]
    if infeas > 0:
        # duals of the sign-flipped rows sit in the artificial reduced costs
        y = tuple(tab.sign[i] * (ONE - rc[n + i]) for i in range(m))
        return tab, y
    # drive remaining artificials out of the basis; drop redundant rows
    for i in reversed(range(m)):
        if tab.basis[i] >= n:
            col = next((j for j in range(n) if tab.rows[i][j] != 0), None)
            if col is None:
                del tab.rows[i]
                del tab.basis[i]
            else:
                tab.pivot(i, col)
    for j in range(n, n + m):
        tab.active[j] = False
    return tab, None


def verify_point(A, b, x) -> bool:
    return (all(v >= 0 for v in x)
            and all(sum(a * xi for a, xi in zip(row, x)) == bi for row, bi in zip(A, b)))


def verify_farkas(A, b, y, n_vars) -> bool:
    cols = [sum(y[i] * A[i][j] for i in range(len(A))) for j in range(n_vars)]
    return all(c <= 0 for c in cols) and sum(yi * bi for yi, bi in zip(y, b)) > 0


def solve_lp(c: Sequence, A: Sequence, b: Sequence, *, maximize: bool = False,
             n_vars: int | None = None) -> LPResult:
    """Optimise ``c.x`` subject to ``A x = b``, ``x >= 0``, exactly."""
    A, b, n = _check_system(A, b, n_vars)
    c = [Fraction(v) for v in c]
    if len(c) != n:
        raise MalformedSystem(f"objective has {len(c)} entries, expected {n}")
    if not A:
        # no constraints: optimum at the origin unless some cost is negative
        signed = [-v for v in c] if maximize else c
        if any(v < 0 for v in signed):
            return LPResult("unbounded")
        return LPResult("optimal", tuple([ZERO] * n), ZERO)
    tab, y = _phase_one(A, b, n)
    if y is not None:
        return LPResult("infeasible", farkas=y)
    cost = [-v for v in c] if maximize else list(c)
    cost += [ZERO] * len(b)
    if not tab.run(cost):
        return LPResult("unbounded")
    x = tab.solution()
    value = sum(ci * xi for ci, xi in zip(c, x))
    assert verify_point(A, b, x)
    return LPResult("optimal", x, value)


def feasible(A: Sequence, b: Sequence, *, n_vars: int | None = None,
             normalize: bool = True) -> Feasibility:
    """Find ``x >= 0`` with ``A x = b`` (and ``sum(x) = 1`` if ``normalize``).

    Both outcomes are checked by substitution before returning: the point
    against every constraint, or the Farkas vector against its two
    defining inequalities.
    """
    A, b, n = _check_system(A, b, n_vars)
    if normalize:
        A = A + [[ONE] * n]
        b = b + [ONE]
    if not A:
        x = tuple([ZERO] * n)
        return Feasibility(True, point=x)
    tab, y = _phase_one(A, b, n)
    if y is not None:
        if not verify_farkas(A, b, y, n):
            raise AssertionError("phase one produced an invalid Farkas vector")
        return Feasibility(False, certificate=y)
    x = tab.solution()
    if not verify_point(A, b, x):
        raise AssertionError("phase one produced an infeasible point")
    return Feasibility(True, point=x)


def rank(rows: Sequence[Sequence]) -> int:
    """Exact rank by Gaussian elimination over the rationals."""
    M = [[Fraction(v) for v in row] for row in rows]
    if not M:
        return 0
    r = 0
    ncols = len(M[0])
    for col in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][col] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(r + 1, len(M)):
            f = M[i][col] / M[r][col]
            if f:
                M[i] = [v - f * pv for v, pv in zip(M[i], M[r])]
        r += 1
        if r == len(M):
            break
    return r
