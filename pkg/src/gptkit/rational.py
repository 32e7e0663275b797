"""Dense linear algebra over :class:`fractions.Fraction`.

Vectors are tuples, matrices are tuples of row tuples. Nothing here touches
floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Vector = tuple  # tuple[Fraction, ...]
Matrix = tuple  # tuple[Vector, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def frac(value) -> Fraction:
    """Coerce an int, Fraction or rational string ("3", "-2/5") to Fraction.

    Floats are rejected: every value entering the library must be exact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def vec(values: Iterable) -> Vector:
    return tuple(frac(v) for v in values)


def mat(rows: Iterable[Iterable]) -> Matrix:
    return tuple(vec(r) for r in rows)


def fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def fmt_vec(v: Sequence[Fraction]) -> list[str]:
    return [fmt(q) for q in v]


def dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), ZERO)


def add(u: Sequence, v: Sequence) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence, v: Sequence) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def scale(t, v: Sequence) -> Vector:
    return tuple(t * a for a in v)


def zeros(n: int) -> Vector:
    return (ZERO,) * n


def unit(n: int, i: int) -> Vector:
    return tuple(ONE if j == i else ZERO for j in range(n))


def transpose(m: Sequence[Sequence]) -> Matrix:
    return tuple(zip(*m)) if m else ()


def matvec(m: Sequence[Sequence], v: Sequence) -> Vector:
    return tuple(dot(row, v) for row in m)


def vecmat(v: Sequence, m: Sequence[Sequence]) -> Vector:
    if not m:
        return ()
    return tuple(dot(v, col) for col in zip(*m))


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    cols = tuple(zip(*b))
    return tuple(tuple(dot(row, col) for col in cols) for row in a)


def outer(u: Sequence, v: Sequence) -> Matrix:
    return tuple(tuple(a * b for b in v) for a in u)


def identity(n: int) -> Matrix:
    return tuple(unit(n, i) for i in range(n))


def rref(rows: Sequence[Sequence], ncols: int | None = None) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form; pivots chosen left to right.

    Returns the non-zero rows of the RREF and the pivot column of each.
    """
    m = [list(map(frac, r)) for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return tuple(tuple(row) for row in m[:r]), tuple(pivots)


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> Matrix:
    """Basis of {x : rows @ x = 0}, one basis vector per free column."""
    if not rows:
        return identity(ncols)
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [ZERO] * ncols
        x[f] = ONE
        for row, p in zip(red, pivots):
            x[p] = -row[f]
        basis.append(tuple(x))
    return tuple(basis)


def solve(a: Sequence[Sequence], b: Sequence) -> Vector | None:
    """One solution of a @ x = b (free variables set to zero), or None."""
    n = len(a[0]) if a else 0
    if not a:
        return zeros(n)
    aug = [list(r) + [frac(bi)] for r, bi in zip(a, b)]
    red, pivots = rref(aug, n + 1)
    if n in pivots:
        return None
    x = [ZERO] * n
    for row, p in zip(red, pivots):
        x[p] = row[n]
    return tuple(x)


def inverse(a: Sequence[Sequence]) -> Matrix:
    n = len(a)
    aug = [list(map(frac, r)) + list(unit(n, i)) for i, r in enumerate(a)]
    red, pivots = rref(aug, 2 * n)
    if tuple(pivots[:n]) != tuple(range(n)) or len(red) < n:
        raise ZeroDivisionError("matrix is singular")
    return tuple(tuple(row[n:]) for row in red)


def independent_rows(rows: Sequence[Sequence]) -> list[int]:
    """Indices of a maximal linearly independent subset, greedily in order."""
    chosen: list[int] = []
    basis: list[list[Fraction]] = []
    pivcols: list[int] = []
    for idx, r in enumerate(rows):
        v = list(map(frac, r))
        for b, p in zip(basis, pivcols):
            if v[p] != 0:
                f = v[p]
                v = [x - f * y for x, y in zip(v, b)]
        p = next((c for c, x in enumerate(v) if x != 0), None)
        if p is None:
            continue
        inv = 1 / v[p]
        v = [x * inv for x in v]
        for k, b in enumerate(basis):
            if b[p] != 0:
                f = b[p]
                basis[k] = [x - f * y for x, y in zip(b, v)]
        basis.append(v)
        pivcols.append(p)
        chosen.append(idx)
    return chosen


def primitive(v: Sequence) -> tuple[int, ...]:
    """Positive multiple of a rational vector with coprime integer entries."""
    den = 1
    for q in v:
        q = frac(q)
        den = den * q.denominator // gcd(den, q.denominator)
    ints = [int(frac(q) * den) for q in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g > 1:
        ints = [x // g for x in ints]
    return tuple(ints)
