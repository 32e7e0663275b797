"""Reference implementations used to cross-check the library.

Each oracle is written from the definitions with the plainest algorithm
available and shares no code with the routines it checks; linear algebra goes
through sympy rather than the library's own rational helpers.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations, product

import sympy


def weights_vertices(outcomes, tests):
    """Vertices of the weight polytope: all basic feasible solutions, via sympy."""
    n = len(outcomes)
    eq = [[1 if outcomes[i] in t else 0 for i in range(n)] for t in tests]
    r = sympy.Matrix(eq).rank() if eq else 0
    found = set()
    for zeros in combinations(range(n), n - r):
        rows = eq + [[1 if j == z else 0 for j in range(n)] for z in zeros]
        rhs = sympy.Matrix([1] * len(eq) + [0] * len(zeros))
        A = sympy.Matrix(rows)
        if A.rank() < n:
            continue
        try:
            sol, _ = A.gauss_jordan_solve(rhs)
        except ValueError:
            continue  # inconsistent system
        if all(v >= 0 for v in sol):
            found.add(tuple(Fraction(int(v.p), int(v.q)) for v in sol))
    return found


def sympy_rank(rows) -> int:
    if not rows:
        return 0
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) if isinstance(x, Fraction) else x for x in r] for r in rows]).rank()


def all_events(tests):
    out = set()
    for t in tests:
        t = sorted(t)
        for k in range(len(t) + 1):
            for sub in combinations(t, k):
                out.add(frozenset(sub))
    return out


def perspectivity_classes(tests):
    """Classes of the equivalence closure of 'shares a complement', by union-find."""
    tests = [frozenset(t) for t in tests]
    evs = sorted(all_events(tests), key=lambda s: (len(s), sorted(s)))
    parent = {e: e for e in evs}

    def find(e):
        while parent[e] != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    comps = {e: {t - e for t in tests if e <= t} for e in evs}
    for a, b in combinations(evs, 2):
        if comps[a] & comps[b]:
            parent[find(a)] = find(b)
    groups = {}
    for e in evs:
        groups.setdefault(find(e), set()).add(e)
    return list(groups.values())


def is_algebraic(tests):
    """Direct reading of the definition: a ~ b and b co c imply a co c."""
    tests = [frozenset(t) for t in tests]
    evs = all_events(tests)

    def comp(a, c):
        return not (a & c) and (a | c) in tests

    for a in evs:
        for b in evs:
            shared = any(comp(a, c) and comp(b, c) for c in evs)
            if not shared:
                continue
            for c in evs:
                if comp(b, c) and not comp(a, c):
                    return False
    return True


def joint_sum_all_orders(oplus, items):
    """Sum of ``items`` if every bracketing order in sequence is defined and agrees."""
    results = set()
    for order in permutations(items):
        acc = order[0]
        ok = True
        for p in order[1:]:
            if (acc, p) not in oplus:
                ok = False
                break
            acc = oplus[(acc, p)]
        if not ok:
            return None
        results.add(acc)
    return results.pop() if len(results) == 1 else None


def lp_min_over_vertices(vertices, cost):
    return min(sum(c * v for c, v in zip(cost, x)) for x in vertices)


def dual_ball_max(generators, v):
    """``max f(v)`` over ``|f(g)| <= 1`` for every generator ``g``, by vertex enumeration in sympy."""
    gens = [sympy.Matrix([sympy.Rational(x.numerator, x.denominator) for x in g]).T for g in generators]
    d = len(v)
    target = sympy.Matrix([sympy.Rational(Fraction(x).numerator, Fraction(x).denominator) for x in v])
    best = None
    for idx in combinations(range(len(gens)), d):
        A = sympy.Matrix.vstack(*[gens[i] for i in idx])
        if A.rank() < d:
            continue
        for signs in product((1, -1), repeat=d):
            f = A.LUsolve(sympy.Matrix(signs))
            if all(abs((g * f)[0]) <= 1 for g in gens):
                val = (f.T * target)[0]
                best = val if best is None or val > best else best
    return Fraction(int(best.p), int(best.q))
