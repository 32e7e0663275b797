"""Probability weights and state polytopes.

``Pr(M)`` is kept as an H-representation (non-negativity plus one
normalization equation per test); vertices are produced on demand by double
description and cached. A brute-force enumerator backs the cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from gptkit import polytope
from gptkit.errors import (
    DimensionMismatch,
    EmptyModel,
    NotAMorphism,
    NotInPolytope,
    OwnerMismatch,
)
from gptkit.lp import combination, in_cone
from gptkit.rational import ONE, ZERO, dot, frac, rank, unit
from gptkit.testspace import (
    Event,
    Model,
    ProbabilityWeight,
    TestSpace,
    complements,
    events,
    weight_violation,
)


def _values(M: TestSpace, v) -> tuple:
    vals = v.values if isinstance(v, ProbabilityWeight) else tuple(frac(x) for x in v)
    if len(vals) != M.size:
        raise DimensionMismatch(f"expected {M.size} coordinates, got {len(vals)}")
    return vals


def is_weight(M: TestSpace, v) -> bool:
    return weight_violation(M, _values(M, v)) is None


class StatePolytope:
    """``{v : A_eq v = b_eq, G v <= h}`` over the outcomes of ``space``."""

    def __init__(self, space: TestSpace, A_eq, b_eq, G, h):
        self.space = space
        self.A_eq = tuple(tuple(map(frac, r)) for r in A_eq)
        self.b_eq = tuple(map(frac, b_eq))
        self.G = tuple(tuple(map(frac, r)) for r in G)
        self.h = tuple(map(frac, h))
        self._vertices: list[ProbabilityWeight] | None = None

    @classmethod
    def of(cls, M: TestSpace) -> "StatePolytope":
        n = M.size
        A = [tuple(ONE if i in t else ZERO for i in range(n)) for t in M.tests]
        G = [tuple(-x for x in unit(n, i)) for i in range(n)]
        return cls(M, A, [ONE] * len(A), G, [ZERO] * n)

    @property
    def dim(self) -> int:
        return self.space.size

    def vertices(self) -> list[ProbabilityWeight]:
        if self._vertices is None:
            pts = polytope.vertices(self.A_eq, self.b_eq, self.G, self.h, self.dim)
            self._vertices = [ProbabilityWeight(self.space, p) for p in pts]
        return list(self._vertices)

    def vertices_bruteforce(self) -> list[ProbabilityWeight]:
        pts = polytope.vertices_bruteforce(self.A_eq, self.b_eq, self.G, self.h, self.dim)
        return [ProbabilityWeight(self.space, p) for p in pts]

    def contains(self, v) -> bool:
        return membership(self, v).inside

    def affine_dimension(self) -> int:
        vs = self.vertices()
        if not vs:
            return -1
        base = vs[0].values
        return rank([tuple(a - b for a, b in zip(v.values, base)) for v in vs[1:]]) if len(vs) > 1 else 0


def state_polytope(M: TestSpace) -> StatePolytope:
    return StatePolytope.of(M)


def polytope_vertices(M: TestSpace) -> list[ProbabilityWeight]:
    """Exact vertex list of Pr(M), sorted, duplicate-free."""
    return StatePolytope.of(M).vertices()


@dataclass(frozen=True)
class Membership:
    """``inside`` or a functional with ``h @ v > bound >= max over P of h @ p``."""

    inside: bool
    functional: tuple | None = None
    bound: Fraction | None = None

    def __bool__(self) -> bool:
        return self.inside


def membership(P: StatePolytope, v) -> Membership:
    vals = _values(P.space, v)
    for row, b in zip(P.A_eq, P.b_eq):
        s = dot(row, vals)
        if s > b:
            return Membership(False, row, b)
        if s < b:
            return Membership(False, tuple(-x for x in row), -b)
    for row, b in zip(P.G, P.h):
        if dot(row, vals) > b:
            return Membership(False, row, b)
    return Membership(True)


def hull_membership(points: Sequence[Sequence], v) -> Membership:
    """Whether ``v`` is a convex combination of ``points`` (exact LP)."""
    res = combination(points, v)
    if res.found:
        return Membership(True)
    return Membership(False, res.separator, res.bound)


def state_vertices(model: Model) -> list[ProbabilityWeight]:
    """Extreme points of the state space of ``model``."""
    if model.is_full:
        return polytope_vertices(model.space)
    gens = sorted(set(model.generators), key=lambda g: g.values)
    keep = []
    for i, g in enumerate(gens):
        others = [o.values for j, o in enumerate(gens) if j != i]
        if not others or not combination(others, g.values).found:
            keep.append(g)
    return keep


def in_state_space(model: Model, v) -> Membership:
    if model.is_full:
        return membership(StatePolytope.of(model.space), v)
    return hull_membership([g.values for g in model.generators], _values(model.space, v))


def is_dispersion_free(alpha) -> bool:
    vals = alpha.values if isinstance(alpha, ProbabilityWeight) else alpha
    return all(v == 0 or v == 1 for v in vals)


def is_pure(P: StatePolytope, alpha) -> bool:
    """Vertex test: the active constraints at ``alpha`` have full rank."""
    vals = _values(P.space, alpha)
    if not membership(P, vals).inside:
        raise NotInPolytope("weight is not in the polytope")
    active = list(P.A_eq) + [g for g, h in zip(P.G, P.h) if dot(g, vals) == h]
    return rank(active) == P.dim


def is_pure_state(model: Model, alpha) -> bool:
    if model.is_full:
        return is_pure(StatePolytope.of(model.space), alpha)
    vals = _values(model.space, alpha)
    if not hull_membership([g.values for g in model.generators], vals).inside:
        raise NotInPolytope("weight is not in the state space")
    return any(v.values == vals for v in state_vertices(model))


def is_positive(model: Model) -> bool:
    verts = state_vertices(model)
    return all(any(v.values[x] > 0 for v in verts) for x in range(model.space.size))


def restrict_positive(model: Model) -> Model:
    """Drop outcomes that every state assigns probability zero."""
    M = model.space
    verts = state_vertices(model)
    keep = [x for x in range(M.size) if any(v.values[x] > 0 for v in verts)]
    if len(keep) == M.size:
        return model
    if not keep:
        raise EmptyModel("no outcome has positive probability in any state")
    kept = set(keep)
    tests = []
    for t in M.tests:
        r = t & kept
        if r:
            tests.append(M.labels(r))
    space = TestSpace.from_tests(tests)
    weights = []
    for v in verts:
        weights.append(tuple(v.values[M.index[lab]] for lab in space.outcomes))
    return Model.generated(space, weights)


def event_probability(alpha: ProbabilityWeight, a: Event) -> Fraction:
    if alpha.space is not a.owner and alpha.space != a.owner:
        raise OwnerMismatch("weight and event live on different test spaces")
    return sum((alpha.values[i] for i in a.members), ZERO)


@dataclass(frozen=True)
class Morphism:
    source: Model
    target: Model
    mapping: tuple  # source outcome index -> target outcome index

    @classmethod
    def from_labels(cls, source: Model, target: Model, mapping: dict[str, str]) -> "Morphism":
        S, T = source.space, target.space
        return cls(source, target, tuple(T.index[mapping[lab]] for lab in S.outcomes))

    def image(self, members) -> frozenset:
        return frozenset(self.mapping[i] for i in members)


@dataclass(frozen=True)
class Verdict:
    """Result of a structural check; truthy when the check passed."""

    ok: bool
    condition: str | None = None
    witness: object = None

    def __bool__(self) -> bool:
        return self.ok


OK = Verdict(True)


def verify_morphism(phi: Morphism, budget: int | None = None) -> Verdict:
    """Check the four morphism conditions, reporting the first failure."""
    S, T = phi.source.space, phi.target.space
    if len(phi.mapping) != S.size:
        raise DimensionMismatch("mapping must cover every source outcome")
    for t in S.tests:
        items = sorted(t)
        for i in range(len(items)):
            for j in range(i + 1, len(items)):
                x, y = items[i], items[j]
                fx, fy = phi.mapping[x], phi.mapping[y]
                if fx == fy or T.witness(frozenset((fx, fy))) is None:
                    return Verdict(False, "i", (S.outcomes[x], S.outcomes[y]))
    src_events = events(S, budget)
    for e in src_events:
        if T.witness(phi.image(e.members)) is None:
            return Verdict(False, "ii", e)
    # a ~ b iff they share a complement
    by_comp: dict[frozenset, list[Event]] = {}
    for e in src_events:
        for c in complements(e):
            by_comp.setdefault(c.members, []).append(e)
    for group in by_comp.values():
        comps = [{c.members for c in complements(T.event(phi.image(e.members)))} for e in group]
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                if not comps[i] & comps[j]:
                    return Verdict(False, "iii", (group[i], group[j]))
    src_verts = [v.values for v in state_vertices(phi.source)]
    for beta in state_vertices(phi.target):
        pulled = tuple(beta.values[phi.mapping[x]] for x in range(S.size))
        if not in_cone(src_verts, pulled):
            return Verdict(False, "iv", beta)
    return OK


def is_test_preserving(phi: Morphism, budget: int | None = None) -> bool:
    if not verify_morphism(phi, budget):
        raise NotAMorphism("map is not a morphism")
    T = phi.target.space
    return all(T.is_test(phi.image(t)) for t in phi.source.space.tests)


def pullback(phi: Morphism, beta) -> tuple:
    vals = _values(phi.target.space, beta)
    return tuple(vals[phi.mapping[x]] for x in range(phi.source.space.size))


def adjacent(P: StatePolytope, v, w) -> bool:
    """Whether two vertices of ``P`` span an edge: their common active constraints have rank dim - 1."""
    a, b = _values(P.space, v), _values(P.space, w)
    if a == b:
        return False
    common = list(P.A_eq) + [g for g, h in zip(P.G, P.h) if dot(g, a) == h and dot(g, b) == h]
    return rank(common) == P.dim - 1
