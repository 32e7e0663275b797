"""The twelve acceptance criteria, each under its wall-clock limit.

Every test prints one ``PASS`` or ``FAIL`` line with its elapsed time.
"""

from contextlib import contextmanager
from fractions import Fraction as F
from itertools import combinations
import random
import time

import pytest

import oracles
from gptkit.composites import (
    JointWeight,
    bilinear_extension,
    boxworld,
    boxworld_space,
    dispersion_free_ns_choices,
    effect_of_pair,
    extension_exists,
    factors_as_dispersion_free_product,
    forward_product,
    forward_product_weight,
    gbit,
    interference_witness,
    is_nonsignaling,
    is_product,
    marginals,
    min_cone_member,
    ns_polytope,
    ns_vertices,
    regroup,
    remote_channel,
    remote_evaluate,
)
from gptkit.errors import EmptyStateSpace
from gptkit.fixtures import FIXTURES, bit, classical3, ds3, empty, firefly, pyramid, square
from gptkit.logic import build_logic, isomorphism, is_boolean, orthocoherence_counterexample, orthopartitions, verify_orthoalgebra
from gptkit.ordvec import base_norm, dual_base_norm, linearize, order_unit_norm, outcome_effect, verify_channel
from gptkit.rational import dot
from gptkit.states import StatePolytope, adjacent, is_dispersion_free, is_pure_state, polytope_vertices, state_vertices
from gptkit.testspace import events, perspective

H = F(1, 2)


@pytest.fixture
def criterion(capsys):
    @contextmanager
    def run(number: int, title: str, limit: float):
        t0 = time.perf_counter()
        ok = False
        try:
            yield
            elapsed = time.perf_counter() - t0
            assert elapsed < limit, f"took {elapsed:.2f} s, limit {limit} s"
            ok = True
        finally:
            elapsed = time.perf_counter() - t0
            with capsys.disabled():
                print(f"\ncriterion {number:2d} {'PASS' if ok else 'FAIL'} ({elapsed:.2f} s / {limit} s) {title}")

    return run


def by_label(M, w, labels):
    return tuple(w.values[M.index[x]] for x in labels)


def test_01_firefly_vertices(criterion):
    with criterion(1, "firefly: 5 vertices, 4 dispersion-free, one at (1/2,1/2,1/2,0,0,0)", 1):
        M = firefly().space
        vs = polytope_vertices(M)
        assert len(vs) == 5
        df = [v for v in vs if is_dispersion_free(v)]
        assert len(df) == 4
        (fifth,) = [v for v in vs if not is_dispersion_free(v)]
        assert by_label(M, fifth, "abcxyz") == (H, H, H, 0, 0, 0)


def test_02_square(criterion):
    with criterion(2, "two disjoint tests: a square", 1):
        M = square().space
        P = StatePolytope.of(M)
        vs = P.vertices()
        assert len(vs) == 4
        assert P.affine_dimension() == 2
        for v in vs:
            assert sum(adjacent(P, v, w) for w in vs) == 2


def test_03_pyramid(criterion):
    with criterion(3, "pyramid: square base with apex (0,1,0) in (u,v,w)", 1):
        M = pyramid().space
        vs = polytope_vertices(M)
        assert len(vs) == 5
        proj = {by_label(M, v, "uvw") for v in vs}
        base = {(u, 0, w) for u in (0, 1) for w in (0, 1)}
        assert proj == base | {(0, 1, 0)}


def test_04_permutation_matrices(criterion):
    with criterion(4, "rows and columns of 3x3: the six permutation matrices", 5):
        from itertools import permutations

        M = ds3().space
        got = {tuple(by_label(M, v, [f"{i}{j}" for i in range(3) for j in range(3)])) for v in polytope_vertices(M)}
        perms = {tuple(1 if p[i] == j else 0 for i in range(3) for j in range(3)) for p in permutations(range(3))}
        assert got == perms


def test_05_logic(criterion):
    with criterion(5, "logic suite on the firefly and a classical test", 10):
        L = build_logic(firefly().space)
        assert verify_orthoalgebra(L)
        w = orthocoherence_counterexample(L)
        assert [L.elements[p] for p in w] == ["[a]", "[b]", "[c]"]
        B = build_logic(classical3().space)
        assert B.size == 8 and is_boolean(B)
        assert isomorphism(L, build_logic(orthopartitions(L))) is not None


def test_06_linearization(criterion):
    with criterion(6, "linearization: unit sums, norms, dual pairing", 5):
        for name, factory in sorted(FIXTURES.items()):
            model = factory()
            if name == "empty":
                with pytest.raises(EmptyStateSpace):
                    linearize(model)
                continue
            L = linearize(model)
            S = L.space
            for t in S.tests:
                total = tuple(sum(outcome_effect(L, x).covector[k] for x in t) for k in range(L.dim))
                assert total == L.unit
            gens = L.state_coords
            for g in gens:
                assert base_norm(L, g, coords=True) == 1
            assert order_unit_norm(L, L.u) == 1
            # the base norm and the norm dual to the order-unit norm agree,
            # and effects are bounded by their order-unit norm on the base
            effects = [outcome_effect(L, x) for x in S.outcomes]
            norms = [order_unit_norm(L, f) for f in effects]
            for f, nf in zip(effects, norms):
                assert nf == max(abs(f(s)) for s in gens)
            for g, h in zip(gens, gens[1:] + gens[:1]):
                d = tuple(a - b for a, b in zip(g, h))
                n = base_norm(L, d, coords=True)
                assert n == dual_base_norm(L, d, coords=True)
                for f, nf in zip(effects, norms):
                    assert abs(f(d)) <= nf * n


def _random_ns(rng, verts):
    k = rng.randint(1, 4)
    picks = rng.sample(verts, k)
    raw = [rng.randint(1, 9) for _ in picks]
    lam = [F(r, sum(raw)) for r in raw]
    return tuple(tuple(sum(l * w.table[i][j] for l, w in zip(lam, picks)) for j in range(4)) for i in range(4))


def _random_blocks(rng, S):
    table = [[F(0)] * 4 for _ in range(4)]
    for E in S.tests:
        for Fb in S.tests:
            cells = [(i, j) for i in sorted(E) for j in sorted(Fb)]
            raw = [rng.randint(0, 5) for _ in cells]
            if not any(raw):
                raw[rng.randrange(len(raw))] = 1
            for (i, j), r in zip(cells, raw):
                table[i][j] = F(r, sum(raw))
    return table


def _perturb(rng, S, table):
    table = [list(r) for r in table]
    E, Fb = rng.choice(S.tests), rng.choice(S.tests)
    cells = [(i, j) for i in E for j in Fb]
    (i1, j1), (i2, j2) = rng.sample(cells, 2)
    eps = min(table[i1][j1], F(rng.randint(1, 4), 8))
    if eps == 0:
        eps = min(table[i2][j2], F(rng.randint(1, 4), 8))
        i1, j1, i2, j2 = i2, j2, i1, j1
    table[i1][j1] -= eps
    table[i2][j2] += eps
    return table


def test_07_nonsignaling_iff_bilinear(criterion):
    with criterion(7, "no-signaling agrees with bilinear extension on 500 random weights", 30):
        G = gbit()
        S = G.space
        LA = LB = linearize(G)
        verts = ns_vertices(G, G)
        rng = random.Random(2024)
        seen = {True: 0, False: 0}
        for k in range(500):
            kind = k % 3
            if kind == 0:
                table = _random_ns(rng, verts)
            elif kind == 1:
                table = _perturb(rng, S, _random_ns(rng, verts))
            else:
                table = _random_blocks(rng, S)
            w = JointWeight(G, G, table)
            ns = is_nonsignaling(w)
            assert ns == extension_exists(w, LA, LB), table
            seen[ns] += 1
        assert seen[True] >= 100 and seen[False] >= 100


def test_08_two_gbit_polytope(criterion):
    with criterion(8, "two gbits: 24 vertices, 8 entangled with mixed marginals", 30):
        G = gbit()
        L = linearize(G)
        ws = ns_vertices(G, G)
        assert len(ws) == 24
        entangled = 0
        for w in ws:
            m1, m2 = marginals(w)
            if min_cone_member(L, L, bilinear_extension(w, L, L)):
                assert is_product(w)
                assert is_pure_state(G, m1) and is_pure_state(G, m2)
            else:
                entangled += 1
                assert not is_pure_state(G, m1) and not is_pure_state(G, m2)
        assert entangled == 8


def test_09_semiclassical_lemma(criterion):
    with criterion(9, "dispersion-free non-signaling weights on boxworld factor", 10):
        G = gbit()
        SG = G.space
        B2 = boxworld(2)
        df = [g for g in state_vertices(B2) if is_dispersion_free(g)]
        assert len(df) == 16
        for g in df:
            vals = {lab: g.values[i] for i, lab in enumerate(B2.space.outcomes)}
            table = tuple(tuple(vals[regroup(x, y)] for y in SG.outcomes) for x in SG.outcomes)
            w = JointWeight(G, G, table)
            m1, m2 = marginals(w)
            assert is_product(w) and is_dispersion_free(m1) and is_dispersion_free(m2)
        # and every dispersion-free non-signaling weight on boxworld(2) x boxworld(2)
        S = boxworld_space(2)
        n = 0
        for c in dispersion_free_ns_choices(S, S):
            assert factors_as_dispersion_free_product(S, S, c)
            n += 1
        assert n == 16**4


def test_10_remote_evaluation(criterion):
    with criterion(10, "remote evaluation identity on 1000 instances, channels for effects", 30):
        G = gbit()
        L = linearize(G)
        verts = ns_vertices(G, G)
        effects = [outcome_effect(L, x) for x in G.space.outcomes] + [L.u]
        rng = random.Random(7)
        r = lambda: F(rng.randint(-6, 6), rng.randint(1, 5))  # noqa: E731
        channels = 0
        for k in range(1000):
            if k % 2:
                alpha = [r() for _ in range(3)]
                e = [r() for _ in range(3)]
                f = [[r() for _ in range(3)] for _ in range(3)]
                omega = [[r() for _ in range(3)] for _ in range(3)]
                assert remote_evaluate(alpha, f, omega, e).equal
                continue
            raw = [rng.randint(0, 4) for _ in range(3)]
            total = sum(raw) + rng.randint(0, 3) or 1
            f = [[F(0)] * 3 for _ in range(3)]
            for lam in raw:
                E = effect_of_pair(L, L, rng.choice(effects), rng.choice(effects))
                for i in range(3):
                    for j in range(3):
                        f[i][j] += F(lam, total) * E[i][j]
            omega = bilinear_extension(JointWeight(G, G, _random_ns(rng, verts)), L, L)
            alpha = rng.choice(L.state_coords)
            e = rng.choice(effects).covector
            assert remote_evaluate(alpha, f, omega, e).equal
            assert verify_channel(remote_channel(L, L, f, omega))
            channels += 1
        assert channels == 500


def test_11_interference(criterion):
    with criterion(11, "firefly forward product: interference only for varying transitions", 1):
        A, B = firefly(), bit()
        SA, SB = A.space, B.space
        fp = forward_product(A, B)
        a, b = SA.event(["a", "x"]), SA.event(["y", "c"])
        assert perspective(a, b)
        c = SB.event(["0"])
        alpha = tuple(F(int(lab in "ay")) for lab in SA.outcomes)
        tau = {"a": (F(1), F(0)), "y": (F(0), F(1))}
        w = forward_product_weight(fp, alpha, tau)
        lhs = sum(w.values[fp.space.index[f"({x},0)"]] for x in ("a", "x"))
        rhs = sum(w.values[fp.space.index[f"({x},0)"]] for x in ("y", "c"))
        assert (lhs, rhs) == (1, 0)
        assert interference_witness(A, a, b, alpha, tau, B, c) == (1, 0)
        # constant transitions never interfere
        pairs = [(p, q) for p, q in combinations(events(SA), 2) if perspective(p, q)]
        states = [v.values for v in polytope_vertices(SA)] + [tuple(F(1, 3) if lab in "abc" else F(1, 3) for lab in SA.outcomes)]
        for beta in [(F(1), F(0)), (F(0), F(1)), (F(1, 3), F(2, 3))]:
            tau = {lab: beta for lab in SA.outcomes}
            for al in states:
                for p, q in pairs:
                    for cc in events(SB):
                        u, v = interference_witness(A, p, q, al, tau, B, cc)
                        assert u == v


def test_12_double_description_vs_bruteforce(criterion):
    with criterion(12, "double description equals basic-feasible-solution enumeration", 60):
        checked = 0
        for name, factory in sorted(FIXTURES.items()):
            model = factory()
            S = model.space
            if S.size > 8:
                continue
            P = StatePolytope.of(S)
            dd = {v.values for v in P.vertices()}
            assert dd == {v.values for v in P.vertices_bruteforce()}, name
            assert dd == oracles.weights_vertices(S.outcomes, [S.labels(t) for t in S.tests]), name
            checked += 1
        assert checked == 9
