"""Exact two-phase simplex over the rationals.

Pivoting uses Bland's rule, so the method terminates on degenerate problems
without any tolerance. Problems are taken in standard form::

    minimize c @ x   subject to   A @ x == b,  x >= 0

Infeasible problems come back with a Farkas certificate ``z`` satisfying
``z @ A >= 0`` and ``z @ b < 0``; optimal ones carry the dual vector ``y``
with ``y @ A <= c`` and ``y @ b == value``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from gptkit.rational import ONE, ZERO, dot, frac

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: tuple | None = None
    value: Fraction | None = None
    dual: tuple | None = None
    farkas: tuple | None = None

    @property
    def feasible(self) -> bool:
        return self.status != INFEASIBLE


class _Tableau:
    def __init__(self, A, b):
        self.m = len(A)
        self.n = len(A[0]) if A else 0
        self.sign = [ONE] * self.m
        rows = []
        for i, (row, bi) in enumerate(zip(A, b)):
            row = list(map(frac, row))
            bi = frac(bi)
            if bi < 0:
                row = [-x for x in row]
                bi = -bi
                self.sign[i] = -ONE
            art = [ONE if k == i else ZERO for k in range(self.m)]
            rows.append(row + art + [bi])
        self.rows = rows
        self.basis = [self.n + i for i in range(self.m)]
        self.active = [True] * self.m
        # start from unit columns where they exist (slacks), sparing phase one
        for j in range(self.n):
            nz = [i for i in range(self.m) if rows[i][j]]
            if len(nz) == 1 and rows[nz[0]][j] == ONE and self.basis[nz[0]] >= self.n:
                self.basis[nz[0]] = j

    def pivot(self, r: int, c: int, extra: list | None = None) -> None:
        """Pivot on ``(r, c)``; ``extra`` is an objective row updated alongside."""
        rows = self.rows
        inv = 1 / rows[r][c]
        pr = [x * inv if x else ZERO for x in rows[r]]
        rows[r] = pr
        nz = [j for j, y in enumerate(pr) if y]
        targets = [rows[i] for i in range(self.m) if i != r and self.active[i]]
        if extra is not None:
            targets.append(extra)
        for row in targets:
            f = row[c]
            if f:
                for j in nz:
                    row[j] -= f * pr[j]
        self.basis[r] = c

    def reduced_costs(self, cost, ncols):
        """Row ``cost - c_B B^-1 A`` over the first ``ncols`` columns plus the rhs."""
        rc = list(cost[:ncols]) + [ZERO]
        for i in range(self.m):
            if not self.active[i]:
                continue
            cb = cost[self.basis[i]]
            if cb:
                for j, x in enumerate(self.rows[i]):
                    if x:
                        rc[j] -= cb * x
        return rc

    def run(self, cost, allowed) -> bool:
        """Bland-rule simplex on the current basis. False means unbounded."""
        width = self.n + self.m
        rc = self.reduced_costs(cost, width)
        while True:
            enter = next((j for j in range(width) if allowed[j] and rc[j] < 0), None)
            if enter is None:
                return True
            best = None
            for i in range(self.m):
                if not self.active[i]:
                    continue
                a = self.rows[i][enter]
                if a > 0:
                    ratio = self.rows[i][-1] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return False
            self.pivot(best[1], enter, rc)

    def duals(self, cost) -> list[Fraction]:
        # B^{-1} lives in the artificial columns
        y = []
        for k in range(self.m):
            col = self.n + k
            s = ZERO
            for i in range(self.m):
                if self.active[i]:
                    s += cost[self.basis[i]] * self.rows[i][col]
            y.append(s * self.sign[k])
        return y


def linprog(c: Sequence, A: Sequence[Sequence], b: Sequence, *, maximize: bool = False) -> LPResult:
    """Solve an LP in standard form exactly."""
    c = [frac(x) for x in c]
    n = len(c)
    if not A:
        if any(x < 0 for x in c) and not maximize or any(x > 0 for x in c) and maximize:
            return LPResult(UNBOUNDED)
        return LPResult(OPTIMAL, x=(ZERO,) * n, value=ZERO, dual=())
    if maximize:
        c = [-x for x in c]
    t = _Tableau(A, b)
    m = t.m
    width = n + m

    phase1 = [ZERO] * n + [ONE] * m
    t.run(phase1, [True] * width)
    infeas = sum((t.rows[i][-1] for i in range(m) if t.basis[i] >= n), ZERO)
    if infeas > 0:
        y = t.duals(phase1)
        return LPResult(INFEASIBLE, farkas=tuple(-v for v in y))

    for i in range(m):
        if t.basis[i] >= n:
            col = next((j for j in range(n) if t.rows[i][j] != 0), None)
            if col is None:
                t.active[i] = False
            else:
                t.pivot(i, col)

    cost = c + [ZERO] * m
    if not t.run(cost, [j < n for j in range(width)]):
        return LPResult(UNBOUNDED)
    x = [ZERO] * n
    for i in range(m):
        if t.active[i] and t.basis[i] < n:
            x[t.basis[i]] = t.rows[i][-1]
    value = dot(c, x)
    y = t.duals(cost)
    if maximize:
        value = -value
        y = [-v for v in y]
    return LPResult(OPTIMAL, x=tuple(x), value=value, dual=tuple(y))


@dataclass(frozen=True)
class Combination:
    """Outcome of a conic/convex combination search.

    ``weights`` is set when the target is a combination of the points. When it
    is not, ``separator`` and ``bound`` satisfy ``separator @ p <= bound`` for
    every point and ``separator @ target > bound``.
    """

    found: bool
    weights: tuple | None = None
    separator: tuple | None = None
    bound: Fraction | None = None


def combination(points: Sequence[Sequence], target: Sequence, *, convex: bool = True) -> Combination:
    """Find lambda >= 0 with sum lambda_i points_i == target (and sum lambda == 1 if convex)."""
    target = [frac(x) for x in target]
    dim = len(target)
    k = len(points)
    A = [[frac(p[r]) for p in points] for r in range(dim)]
    b = list(target)
    if convex:
        A.append([ONE] * k)
        b.append(ONE)
    if k == 0:
        # empty hull: any functional separates, the zero cone only holds 0
        if not convex and all(x == 0 for x in target):
            return Combination(True, weights=())
        sep = tuple(target) if any(target) else (ZERO,) * dim
        bound = ZERO if not convex else (dot(sep, target) - 1)
        return Combination(False, separator=sep, bound=bound)
    res = linprog([ZERO] * k, A, b)
    if res.status == OPTIMAL:
        return Combination(True, weights=res.x)
    z = res.farkas
    # z@A >= 0 and z@b < 0; with z = (-h, c): h@p <= c and h@target > c
    h = tuple(-v for v in z[:dim])
    bound = z[dim] if convex else ZERO
    return Combination(False, separator=h, bound=bound)


def in_cone(generators: Sequence[Sequence], v: Sequence) -> bool:
    return combination(generators, v, convex=False).found


def maximize_linear(points: Sequence[Sequence], h: Sequence) -> Fraction:
    return max(dot(h, p) for p in points)


def dual_value(res: LPResult, b: Sequence) -> Fraction:
    return dot(res.dual, [frac(x) for x in b])


__all__ = [
    "Combination",
    "INFEASIBLE",
    "LPResult",
    "OPTIMAL",
    "UNBOUNDED",
    "combination",
    "in_cone",
    "linprog",
    "maximize_linear",
    "dual_value",
]
