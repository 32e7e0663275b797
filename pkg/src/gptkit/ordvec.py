"""The ordered vector space spanned by a model's states.

``V(A)`` is realized inside ``R^X`` as the span of the state vertices. Its
basis is the reduced row echelon form of the vertex matrix, so the coordinates
of any vector in the span are simply its entries at the pivot outcomes.
Functionals on ``V(A)`` are stored as covectors in the dual basis.

Effects are only ever checked on state vertices: a functional lying in
``[0, 1]`` on every vertex lies there on the whole convex hull.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from gptkit.errors import (
    DimensionMismatch,
    EmptyStateSpace,
    InvalidTestSpace,
    NotAffine,
    NotAState,
    NotInSpan,
)
from gptkit.lp import OPTIMAL, in_cone, linprog
from gptkit.rational import (
    ONE,
    ZERO,
    dot,
    fmt_vec,
    frac,
    independent_rows,
    inverse,
    matvec,
    rref,
    solve,
    transpose,
    vec,
)
from gptkit.states import Verdict, in_state_space, state_vertices
from gptkit.testspace import Model, ProbabilityWeight, TestSpace

FAILURE = "*"


@dataclass(frozen=True)
class Effect:
    """A functional on V(A) in dual-basis coordinates.

    ``outcome`` records the outcome label when the effect is an evaluation
    functional; effects built by arithmetic carry ``None``.
    """

    covector: tuple
    outcome: str | None = field(default=None, compare=False)

    def __call__(self, coords: Sequence) -> Fraction:
        return dot(self.covector, coords)


@dataclass(frozen=True)
class LinearModel:
    model: Model
    basis: tuple  # rows are vectors in R^X
    pivots: tuple  # coordinates of v are (v[p] for p in pivots)
    state_coords: tuple
    unit: tuple  # covector u

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def space(self) -> TestSpace:
        return self.model.space

    @property
    def cone_generators(self) -> tuple:
        return self.state_coords

    def coords(self, v: Sequence) -> tuple:
        """Coordinates of a vector of ``R^X`` lying in V(A)."""
        v = vec(v)
        if len(v) != self.space.size:
            raise DimensionMismatch(f"expected {self.space.size} entries, got {len(v)}")
        c = tuple(v[p] for p in self.pivots)
        if self.vector(c) != v:
            raise NotInSpan("vector is not in the span of the states")
        return c

    def vector(self, c: Sequence) -> tuple:
        """The vector of ``R^X`` with coordinates ``c``."""
        c = vec(c)
        if len(c) != self.dim:
            raise DimensionMismatch(f"expected {self.dim} coordinates, got {len(c)}")
        n = self.space.size
        return tuple(sum((ck * b[x] for ck, b in zip(c, self.basis)), ZERO) for x in range(n))

    def effect(self, covector: Sequence, outcome: str | None = None) -> Effect:
        cov = vec(covector)
        if len(cov) != self.dim:
            raise DimensionMismatch(f"expected {self.dim} coordinates, got {len(cov)}")
        return Effect(cov, outcome)

    @property
    def u(self) -> Effect:
        return Effect(self.unit)

    def to_dict(self) -> dict:
        S = self.space
        return {
            "dim": self.dim,
            "pivots": [S.outcomes[p] for p in self.pivots],
            "basis": [fmt_vec(b) for b in self.basis],
            "unit": fmt_vec(self.unit),
            "state_coords": [fmt_vec(s) for s in self.state_coords],
            "effects": {lab: fmt_vec(outcome_effect(self, lab).covector) for lab in S.outcomes},
        }


def linearize(model: Model) -> LinearModel:
    verts = state_vertices(model)
    if not verts:
        raise EmptyStateSpace("the model has no states")
    n = model.space.size
    basis, pivots = rref([v.values for v in verts], n)
    coords = tuple(tuple(v.values[p] for p in pivots) for v in verts)
    effects = [tuple(b[x] for b in basis) for x in range(n)]
    units = set()
    for t in model.space.tests:
        units.add(tuple(sum((effects[x][k] for x in t), ZERO) for k in range(len(basis))))
    if len(units) != 1:
        # cannot happen for genuine weights; guards the construction itself
        raise AssertionError("outcome effects of different tests sum to different units")
    L = LinearModel(model, basis, pivots, coords, units.pop())
    for c in coords:
        assert dot(L.unit, c) == ONE
    return L


def outcome_effect(L: LinearModel, x: str | int) -> Effect:
    i = L.space.index[x] if isinstance(x, str) else x
    return Effect(tuple(b[i] for b in L.basis), L.space.outcomes[i])


def is_effect(L: LinearModel, f: Effect | Sequence) -> bool:
    cov = f.covector if isinstance(f, Effect) else vec(f)
    return all(ZERO <= dot(cov, s) <= ONE for s in L.state_coords)


def _as_coords(L: LinearModel, v: Sequence, coords: bool) -> tuple:
    if coords:
        c = vec(v)
        if len(c) != L.dim:
            raise DimensionMismatch(f"expected {L.dim} coordinates, got {len(c)}")
        return c
    return L.coords(v)


def base_norm(L: LinearModel, v: Sequence, *, coords: bool = False) -> Fraction:
    """``min s + t`` over ``v = s*sigma - t*tau`` with sigma, tau states.

    ``v`` is a vector of ``R^X`` unless ``coords`` is set.
    """
    c = _as_coords(L, v, coords)
    gens = L.state_coords
    k = len(gens)
    A = [[g[r] for g in gens] + [-g[r] for g in gens] for r in range(L.dim)]
    res = linprog([ONE] * (2 * k), A, list(c))
    assert res.status == OPTIMAL
    return res.value


def dual_base_norm(L: LinearModel, v: Sequence, *, coords: bool = False) -> Fraction:
    """``max f(v)`` over functionals with ``|f| <= 1`` on every state.

    Equal to :func:`base_norm` by LP duality; kept as an independent route.
    """
    c = _as_coords(L, v, coords)
    gens = L.state_coords
    d, k = L.dim, len(gens)
    # variables: f+ (d), f- (d), slack s (k), slack r (k)
    A, b = [], []
    for i, g in enumerate(gens):
        A.append(list(g) + [-x for x in g] + [ONE if j == i else ZERO for j in range(k)] + [ZERO] * k)
        b.append(ONE)
    for i, g in enumerate(gens):
        A.append([-x for x in g] + list(g) + [ZERO] * k + [ONE if j == i else ZERO for j in range(k)])
        b.append(ONE)
    cost = list(c) + [-x for x in c] + [ZERO] * (2 * k)
    res = linprog(cost, A, b, maximize=True)
    assert res.status == OPTIMAL
    return res.value


def order_unit_norm(L: LinearModel, f: Effect | Sequence) -> Fraction:
    """``min lam`` with ``-lam*u <= f <= lam*u`` on the state cone.

    Solved through its LP dual: maximize ``f(sum p_i g_i - sum q_i g_i)`` over
    ``p, q >= 0`` with ``sum p + sum q == 1``, where ``g_i`` are the state vertices.
    """
    cov = f.covector if isinstance(f, Effect) else vec(f)
    vals = [dot(cov, g) for g in L.state_coords]
    res = linprog(vals + [-v for v in vals], [[ONE] * (2 * len(vals))], [ONE], maximize=True)
    assert res.status == OPTIMAL
    return res.value


@dataclass(frozen=True)
class Channel:
    """A linear map V(A) -> V(B); ``matrix`` has dim B rows and dim A columns."""

    source: LinearModel
    target: LinearModel
    matrix: tuple

    def __post_init__(self):
        m = tuple(vec(r) for r in self.matrix)
        if len(m) != self.target.dim or any(len(r) != self.source.dim for r in m):
            raise DimensionMismatch(f"channel matrix must be {self.target.dim}x{self.source.dim}")
        object.__setattr__(self, "matrix", m)

    def apply(self, c: Sequence) -> tuple:
        return matvec(self.matrix, c)

    @classmethod
    def identity(cls, L: LinearModel, scale=ONE) -> "Channel":
        s = frac(scale)
        return cls(L, L, tuple(tuple(s if i == j else ZERO for j in range(L.dim)) for i in range(L.dim)))


def verify_channel(phi: Channel) -> Verdict:
    """Positivity on cone generators, then sub-unitality on states."""
    targets = phi.target.cone_generators
    for g in phi.source.cone_generators:
        if not in_cone(targets, phi.apply(g)):
            return Verdict(False, "positivity", g)
    for g in phi.source.state_coords:
        if dot(phi.target.unit, phi.apply(g)) > ONE:
            return Verdict(False, "unitality", g)
    return Verdict(True)


def success_probability(phi: Channel, alpha) -> Fraction:
    """``u_B(phi(alpha))`` for a state ``alpha`` of the source model."""
    vals = alpha.values if isinstance(alpha, ProbabilityWeight) else vec(alpha)
    if len(vals) != phi.source.space.size or not in_state_space(phi.source.model, vals):
        raise NotAState("argument is not a state of the source model")
    return dot(phi.target.unit, phi.apply(phi.source.coords(vals)))


def adjoin_failure(model: Model, label: str = FAILURE) -> Model:
    """The model with a common failure outcome appended to every test."""
    S = model.space
    if label in S.index:
        raise InvalidTestSpace(f"outcome {label!r} already present")
    space = TestSpace.from_tests([S.labels(t) + [label] for t in S.tests])
    if model.is_full:
        return Model(space)
    pos = {lab: i for i, lab in enumerate(S.outcomes)}

    def lift(vals):
        return tuple(vals[pos[lab]] if lab != label else ZERO for lab in space.outcomes)

    gens = [lift(g.values) for g in model.generators]
    gens.append(tuple(ONE if lab == label else ZERO for lab in space.outcomes))
    return Model.generated(space, gens)


def failure_decomposition(star: Model, beta, label: str = FAILURE) -> tuple[Fraction, tuple | None]:
    """Split ``beta = p*beta1 + (1-p)*delta``; ``beta1`` is over the outcomes other than ``label``.

    ``beta1`` is None when ``p == 0``.
    """
    S = star.space
    vals = beta.values if isinstance(beta, ProbabilityWeight) else vec(beta)
    if not in_state_space(star, vals):
        raise NotAState("not a state of the model")
    k = S.index[label]
    p = ONE - vals[k]
    if p == 0:
        return p, None
    return p, tuple(v / p for i, v in enumerate(vals) if i != k)


def extend_linearly(L: LinearModel, images: Sequence[Sequence], method: str = "inverse") -> tuple:
    """The linear map taking the i-th state vertex to ``images[i]``.

    Returns a matrix acting on coordinates. ``method`` picks the route:
    ``"inverse"`` inverts a basis of vertices, ``"solve"`` solves the full
    overdetermined system row by row. Raises NotAffine when no linear map fits.
    """
    imgs = [vec(v) for v in images]
    gens = L.state_coords
    if len(imgs) != len(gens):
        raise DimensionMismatch(f"need one image per state vertex ({len(gens)})")
    out_dim = len(imgs[0])
    if method == "inverse":
        idx = independent_rows(gens)
        Winv = inverse([gens[i] for i in idx])  # rows of W are vertex coordinates
        F = [imgs[i] for i in idx]
        # T @ W^T = F^T  =>  T = F^T @ W^{-T}
        Ft = transpose(F)
        WinvT = transpose(Winv)
        T = tuple(tuple(dot(row, col) for col in transpose(WinvT)) for row in Ft)
    elif method == "solve":
        rows = []
        for r in range(out_dim):
            t = solve(gens, [img[r] for img in imgs])
            if t is None:
                raise NotAffine("state images admit no linear extension")
            rows.append(t)
        T = tuple(rows)
    else:
        raise ValueError(f"unknown method {method!r}")
    for g, img in zip(gens, imgs):
        if matvec(T, g) != img:
            raise NotAffine("state images admit no linear extension")
    return T
