from fractions import Fraction as F

from hypothesis import given, strategies as st

import oracles
from gptkit.lp import INFEASIBLE, OPTIMAL, UNBOUNDED, combination, in_cone, linprog
from gptkit.polytope import vertices_bruteforce
from gptkit.rational import dot


def test_small_lp_optimum_and_duals():
    # min -x - y  s.t. x + 2y + s = 4, 3x + y + t = 6
    res = linprog([-1, -1, 0, 0], [[1, 2, 1, 0], [3, 1, 0, 1]], [4, 6])
    assert res.status == OPTIMAL
    assert res.value == F(-14, 5)
    assert res.x[:2] == (F(8, 5), F(6, 5))
    y = res.dual
    assert dot(y, [4, 6]) == res.value
    cols = [[1, 3], [2, 1], [1, 0], [0, 1]]
    assert all(dot(y, col) <= c for col, c in zip(cols, [-1, -1, 0, 0]))


def test_infeasible_lp_has_farkas_certificate():
    A = [[1, 1], [1, 1]]
    b = [1, 2]
    res = linprog([0, 0], A, b)
    assert res.status == INFEASIBLE
    z = res.farkas
    assert all(dot(z, col) >= 0 for col in zip(*A))
    assert dot(z, b) < 0


def test_unbounded_lp():
    res = linprog([-1, 0], [[1, -1]], [0])
    assert res.status == UNBOUNDED


def test_degenerate_lp_terminates():
    # Beale-style degenerate problem, cycles without an anti-cycling rule
    A = [
        [F(1, 4), -8, -1, 9, 1, 0, 0],
        [F(1, 2), -12, F(-1, 2), 3, 0, 1, 0],
        [0, 0, 1, 0, 0, 0, 1],
    ]
    res = linprog([F(-3, 4), 20, F(-1, 2), 6, 0, 0, 0], A, [0, 0, 1])
    assert res.status == OPTIMAL
    assert res.value == F(-5, 4)


@given(
    st.lists(st.integers(-3, 3), min_size=3, max_size=3),
    st.lists(st.lists(st.integers(0, 3), min_size=3, max_size=3), min_size=2, max_size=2),
)
def test_lp_optimum_matches_vertex_oracle(cost, A):
    # x >= 0, A x <= 3, x <= 2; slack variables turn each row into an equation
    G = [list(r) for r in A] + [[1 if j == i else 0 for j in range(3)] for i in range(3)]
    rows = [g + [1 if k == i else 0 for k in range(5)] for i, g in enumerate(G)]
    b = [3, 3, 2, 2, 2]
    res = linprog(list(cost) + [0] * 5, rows, b)
    assert res.status == OPTIMAL
    G += [[-1 if j == i else 0 for j in range(3)] for i in range(3)]
    h = [3, 3, 2, 2, 2, 0, 0, 0]
    verts = vertices_bruteforce([], [], G, h, 3)
    assert res.value == oracles.lp_min_over_vertices(verts, cost)


def test_combination_finds_weights_or_separator():
    pts = [(0, 0), (1, 0), (0, 1)]
    hit = combination(pts, (F(1, 4), F(1, 4)))
    assert hit.found
    assert sum(hit.weights) == 1
    miss = combination(pts, (1, 1))
    assert not miss.found
    assert all(dot(miss.separator, p) <= miss.bound for p in pts)
    assert dot(miss.separator, (1, 1)) > miss.bound


def test_in_cone():
    assert in_cone([(1, 0), (1, 1)], (3, 1))
    assert not in_cone([(1, 0), (1, 1)], (0, 1))
