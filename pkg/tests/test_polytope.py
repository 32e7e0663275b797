from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given, strategies as st

from gptkit import config
from gptkit.errors import BudgetExceeded
from gptkit.polytope import dual_rays, extreme_rays, vertices, vertices_bruteforce


def cube(n):
    G = [[1 if j == i else 0 for j in range(n)] for i in range(n)]
    G += [[-1 if j == i else 0 for j in range(n)] for i in range(n)]
    return G, [1] * n + [0] * n


def test_cube_vertices():
    G, h = cube(3)
    got = vertices([], [], G, h, 3)
    assert set(got) == set(product((0, 1), repeat=3))


def test_simplex_with_equality():
    G = [[-1 if j == i else 0 for j in range(3)] for i in range(3)]
    got = vertices([[1, 1, 1]], [1], G, [0, 0, 0], 3)
    assert got == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]


def test_infeasible_system_has_no_vertices():
    G, h = cube(2)
    assert vertices([[1, 1]], [3], G, h, 2) == []


def test_unbounded_polyhedron_is_rejected():
    with pytest.raises(ValueError):
        vertices([], [], [[-1, 0], [0, -1]], [0, 0], 2)


def test_extreme_rays_of_quadrant_cone():
    assert extreme_rays([[1, 0], [0, 1]]) == [(0, 1), (1, 0)]
    with pytest.raises(ValueError):
        extreme_rays([[1, 0]])


def test_dual_rays_of_square_cone():
    # cone over the unit square at height 1
    gens = [(1, 0, 0), (1, 1, 0), (1, 0, 1), (1, 1, 1)]
    rays = dual_rays(gens)
    assert len(rays) == 4
    for r in rays:
        assert all(sum(a * b for a, b in zip(r, g)) >= 0 for g in gens)


def test_dimension_budget(monkeypatch):
    monkeypatch.setattr(config, "MAX_AMBIENT_DIM", 2)
    G, h = cube(3)
    with pytest.raises(BudgetExceeded):
        vertices([], [], G, h, 3)


@given(st.lists(st.lists(st.integers(-2, 2), min_size=3, max_size=3), min_size=1, max_size=4), st.data())
def test_double_description_matches_bruteforce(extra, data):
    G, h = cube(3)
    rhs = [data.draw(st.integers(0, 3)) for _ in extra]
    G = G + [list(r) for r in extra]
    h = h + rhs
    assert set(vertices([], [], G, h, 3)) == set(vertices_bruteforce([], [], G, h, 3))


def test_rational_vertices_are_exact():
    # triangle cut from the square by x + 2y <= 1
    G, h = cube(2)
    got = vertices([], [], G + [[1, 2]], h + [1], 2)
    assert set(got) == {(0, 0), (1, 0), (0, F(1, 2))}
