"""Exact vertex and extreme-ray enumeration.

The main routine is the double description method (incremental insertion of
inequalities with the combinatorial adjacency test) run on integer rays. A
brute-force basic-feasible-solution enumerator is kept alongside as an
independent oracle; it shares nothing with the double description code except
the rational linear algebra helpers.

Polytopes are given as ``{x : A_eq @ x == b_eq, G @ x <= h}``.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Sequence

from gptkit import config
from gptkit.errors import BudgetExceeded
from gptkit.rational import (
    ZERO,
    add,
    dot,
    frac,
    independent_rows,
    inverse,
    matvec,
    nullspace,
    primitive,
    rank,
    rref,
    solve,
    transpose,
)


def _int_row(row: Sequence) -> tuple[int, ...]:
    den = 1
    for q in row:
        q = frac(q)
        den = den * q.denominator // gcd(den, q.denominator)
    return tuple(int(frac(q) * den) for q in row)


def _idot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def _normalize(v: list[int]) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    if g > 1:
        return tuple(x // g for x in v)
    return tuple(v)


def extreme_rays(M: Sequence[Sequence]) -> list[tuple[int, ...]]:
    """Extreme rays of the pointed cone ``{y : M @ y >= 0}``.

    Rays are returned as primitive integer vectors in sorted order. Raises
    ``ValueError`` if the cone contains a line.
    """
    rows = [_int_row(r) for r in M if any(frac(x) != 0 for x in r)]
    if not M:
        raise ValueError("empty constraint system")
    d = len(M[0])
    if not rows:
        raise ValueError("cone is the whole space")
    init = independent_rows(rows)
    if len(init) < d:
        raise ValueError("cone is not pointed")
    init = init[:d]
    inv = inverse([rows[i] for i in init])
    cols = transpose(inv)

    rays: list[tuple[int, ...]] = []
    zsets: list[int] = []
    for j, col in enumerate(cols):
        rays.append(primitive(col))
        z = 0
        for k, i in enumerate(init):
            if k != j:
                z |= 1 << i
        zsets.append(z)

    init_set = set(init)
    for i, row in enumerate(rows):
        if i in init_set:
            continue
        bit = 1 << i
        vals = [_idot(row, r) for r in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        zer = [k for k, v in enumerate(vals) if v == 0]
        if not neg:
            for k in zer:
                zsets[k] |= bit
            continue
        new_rays = [rays[k] for k in pos] + [rays[k] for k in zer]
        new_z = [zsets[k] for k in pos] + [zsets[k] | bit for k in zer]
        need = d - 2
        for p in pos:
            zp = zsets[p]
            for q in neg:
                common = zp & zsets[q]
                if bin(common).count("1") < need:
                    continue
                adjacent = True
                for k in range(len(rays)):
                    if k != p and k != q and zsets[k] & common == common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                vp, vq = vals[p], vals[q]
                ray = [vp * a - vq * b for a, b in zip(rays[q], rays[p])]
                new_rays.append(_normalize(ray))
                new_z.append(common | bit)
        rays, zsets = new_rays, new_z
        if not rays:
            break
    return sorted(set(rays))


def _affine_param(A_eq, b_eq, n):
    if A_eq:
        x0 = solve(A_eq, b_eq)
        if x0 is None:
            return None, None
        N = nullspace(A_eq, n)
    else:
        x0 = (ZERO,) * n
        N = tuple(tuple(Fraction(int(i == j)) for i in range(n)) for j in range(n))
    return x0, N


def check_budget(n: int, rows: int) -> None:
    if n > config.MAX_AMBIENT_DIM:
        raise BudgetExceeded(f"ambient dimension {n} exceeds {config.MAX_AMBIENT_DIM}")
    if rows > config.MAX_HREP_ROWS:
        raise BudgetExceeded(f"{rows} constraint rows exceed {config.MAX_HREP_ROWS}")


def vertices(A_eq: Sequence[Sequence], b_eq: Sequence, G: Sequence[Sequence], h: Sequence, n: int) -> list[tuple]:
    """Vertices of a bounded polyhedron, via double description.

    Output is duplicate-free and sorted; an empty list means the polyhedron is
    empty. Raises ``ValueError`` if it is unbounded.
    """
    check_budget(n, len(A_eq) + len(G))
    x0, N = _affine_param(A_eq, b_eq, n)
    if x0 is None:
        return []
    d = len(N)
    h0 = [frac(hi) - dot(g, x0) for g, hi in zip(G, h)]
    if d == 0:
        return [x0] if all(v >= 0 for v in h0) else []
    Nt = transpose(N)  # n x d
    GN = [tuple(dot(g, col) for col in zip(*Nt)) for g in G]
    M = [(Fraction(1),) + (ZERO,) * d]
    M += [(hv,) + tuple(-x for x in gn) for hv, gn in zip(h0, GN)]
    try:
        rays = extreme_rays(M)
    except ValueError as exc:
        raise ValueError("polyhedron is unbounded") from exc
    out = set()
    for r in rays:
        s = r[0]
        if s == 0:
            if any(r):
                raise ValueError("polyhedron is unbounded")
            continue
        t = [Fraction(x, s) for x in r[1:]]
        x = add(x0, matvec(Nt, t))
        out.add(x)
    return sorted(out)


def vertices_bruteforce(A_eq: Sequence[Sequence], b_eq: Sequence, G: Sequence[Sequence], h: Sequence, n: int) -> list[tuple]:
    """Vertices by enumerating basic feasible solutions.

    Every vertex is the unique solution of the equalities together with some
    ``n - rank(A_eq)`` tight inequalities, so all such subsets are tried.
    """
    A_eq = [tuple(map(frac, r)) for r in A_eq]
    G = [tuple(map(frac, r)) for r in G]
    h = [frac(x) for x in h]
    b_eq = [frac(x) for x in b_eq]
    k = n - (rank(A_eq) if A_eq else 0)
    out = set()
    for subset in combinations(range(len(G)), k):
        system = A_eq + [G[i] for i in subset]
        rhs = b_eq + [h[i] for i in subset]
        red, piv = rref(system, n) if system else ((), ())
        if len(piv) < n:
            continue
        x = solve(system, rhs)
        if x is None:
            continue
        if all(dot(g, x) <= hi for g, hi in zip(G, h)):
            out.add(x)
    return sorted(out)


def dual_rays(generators: Sequence[Sequence]) -> list[tuple[int, ...]]:
    """Extreme rays of the dual of a full-dimensional pointed cone given by generators."""
    return extreme_rays([tuple(map(frac, g)) for g in generators])
