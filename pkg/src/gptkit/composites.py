"""Joint weights, product test spaces and non-signaling composites.

A joint weight is stored as a table ``table[i][j]`` indexed by outcome indices
of the two factor spaces. Tensors in ``V(A) (x) V(B)`` are coordinate matrices
with ``dim V(A)`` rows and ``dim V(B)`` columns; a bilinear form pairs effects
``a``, ``b`` with a tensor ``T`` as ``a @ T @ b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as cartesian
from typing import Mapping, Sequence

from gptkit import config, polytope
from gptkit.errors import (
    BudgetExceeded,
    DimensionMismatch,
    MissingTransition,
    NotAState,
    NotAWeight,
    NotInSpan,
    NotNonsignaling,
    NotPerspective,
    UnknownOutcome,
    ZeroMarginal,
)
from gptkit.lp import combination, in_cone
from gptkit.ordvec import Channel, Effect, LinearModel, linearize
from gptkit.rational import ONE, ZERO, dot, fmt, fmt_vec, frac, inverse, matmul, outer, rank, transpose, vec
from gptkit.states import (
    Morphism,
    StatePolytope,
    Verdict,
    in_state_space,
    is_dispersion_free,
    is_weight,
    state_vertices,
    verify_morphism,
)
from gptkit.testspace import (
    Event,
    Model,
    ProbabilityWeight,
    TestSpace,
    pair_label,
    perspective,
    product,
)

HALF = Fraction(1, 2)


def _space(m: Model | TestSpace) -> TestSpace:
    return m.space if isinstance(m, Model) else m


def _model(m: Model | TestSpace) -> Model:
    return m if isinstance(m, Model) else Model(m)


# ---------------------------------------------------------------- joint weights


@dataclass(frozen=True)
class JointWeight:
    """A probability weight on the product test space ``M(A) x M(B)``."""

    A: Model
    B: Model
    table: tuple

    def __post_init__(self):
        SA, SB = self.A.space, self.B.space
        rows = tuple(vec(r) for r in self.table)
        if len(rows) != SA.size or any(len(r) != SB.size for r in rows):
            raise DimensionMismatch(f"joint table must be {SA.size}x{SB.size}")
        object.__setattr__(self, "table", rows)
        for i, r in enumerate(rows):
            for j, v in enumerate(r):
                if v < 0:
                    raise NotAWeight(f"negative entry at ({SA.outcomes[i]},{SB.outcomes[j]})")
        for E in SA.tests:
            for F in SB.tests:
                s = sum((rows[i][j] for i in E for j in F), ZERO)
                if s != ONE:
                    raise NotAWeight(f"test {{{','.join(SA.labels(E))}}} x {{{','.join(SB.labels(F))}}} sums to {fmt(s)}")

    def __getitem__(self, key: tuple[str, str]) -> Fraction:
        x, y = key
        return self.table[self.A.space.index[x]][self.B.space.index[y]]

    def as_weight(self) -> ProbabilityWeight:
        """The same weight on the product test space with ``(x,y)`` labels."""
        SA, SB = self.A.space, self.B.space
        P = product(SA, SB)
        vals = [ZERO] * P.size
        for i, x in enumerate(SA.outcomes):
            for j, y in enumerate(SB.outcomes):
                vals[P.index[pair_label(x, y)]] = self.table[i][j]
        return ProbabilityWeight(P, vals)

    @classmethod
    def from_weight(cls, A: Model, B: Model, w) -> "JointWeight":
        SA, SB = A.space, B.space
        P = product(SA, SB)
        vals = w.values if isinstance(w, ProbabilityWeight) else vec(w)
        if len(vals) != P.size:
            raise DimensionMismatch(f"expected {P.size} entries, got {len(vals)}")
        return cls(A, B, tuple(tuple(vals[P.index[pair_label(x, y)]] for y in SB.outcomes) for x in SA.outcomes))

    def to_dict(self) -> dict:
        return {
            "A": self.A.to_dict(),
            "B": self.B.to_dict(),
            "table": [fmt_vec(r) for r in self.table],
        }


def product_weight(A: Model, B: Model, alpha, beta) -> JointWeight:
    a = alpha.values if isinstance(alpha, ProbabilityWeight) else vec(alpha)
    b = beta.values if isinstance(beta, ProbabilityWeight) else vec(beta)
    return JointWeight(A, B, outer(a, b))


@dataclass(frozen=True)
class SignalingWitness:
    """``direction`` is ``"A->B"`` when Alice's test choice shifts the
    probability of Bob's ``outcome``; ``tests`` are the two offending tests."""

    direction: str
    outcome: str
    tests: tuple


def signaling_witness(w: JointWeight) -> SignalingWitness | None:
    SA, SB = w.A.space, w.B.space
    T = w.table
    for j, y in enumerate(SB.outcomes):
        vals = [sum((T[i][j] for i in E), ZERO) for E in SA.tests]
        for k in range(1, len(vals)):
            if vals[k] != vals[0]:
                return SignalingWitness("A->B", y, (SA.labels(SA.tests[0]), SA.labels(SA.tests[k])))
    for i, x in enumerate(SA.outcomes):
        vals = [sum((T[i][j] for j in F), ZERO) for F in SB.tests]
        for k in range(1, len(vals)):
            if vals[k] != vals[0]:
                return SignalingWitness("B->A", x, (SB.labels(SB.tests[0]), SB.labels(SB.tests[k])))
    return None


def is_nonsignaling(w: JointWeight) -> bool:
    return signaling_witness(w) is None


def _require_ns(w: JointWeight) -> None:
    sw = signaling_witness(w)
    if sw is not None:
        raise NotNonsignaling(f"signals {sw.direction} at outcome {sw.outcome}")


def marginals(w: JointWeight) -> tuple[ProbabilityWeight, ProbabilityWeight]:
    _require_ns(w)
    SA, SB = w.A.space, w.B.space
    F, E = SB.tests[0], SA.tests[0]
    m1 = tuple(sum((w.table[i][j] for j in F), ZERO) for i in range(SA.size))
    m2 = tuple(sum((w.table[i][j] for i in E), ZERO) for j in range(SB.size))
    return ProbabilityWeight(SA, m1), ProbabilityWeight(SB, m2)


def conditional_b(w: JointWeight, x: str) -> ProbabilityWeight:
    """Bob's conditional weight given Alice's outcome ``x``."""
    m1, _ = marginals(w)
    i = w.A.space.index[x]
    if m1.values[i] == 0:
        raise ZeroMarginal(f"marginal probability of {x} is zero")
    return ProbabilityWeight(w.B.space, tuple(v / m1.values[i] for v in w.table[i]))


def conditional_a(w: JointWeight, y: str) -> ProbabilityWeight:
    """Alice's conditional weight given Bob's outcome ``y``."""
    _, m2 = marginals(w)
    j = w.B.space.index[y]
    if m2.values[j] == 0:
        raise ZeroMarginal(f"marginal probability of {y} is zero")
    return ProbabilityWeight(w.A.space, tuple(r[j] / m2.values[j] for r in w.table))


def is_joint_state(w: JointWeight) -> bool:
    """Non-signaling with every conditional inside the factor state spaces."""
    m1, m2 = marginals(w)
    for i, x in enumerate(w.A.space.outcomes):
        if m1.values[i] and not in_state_space(w.B, conditional_b(w, x).values):
            return False
    for j, y in enumerate(w.B.space.outcomes):
        if m2.values[j] and not in_state_space(w.A, conditional_a(w, y).values):
            return False
    return True


# --------------------------------------------------------- tensors and cones


def _try_extension(w: JointWeight, LA: LinearModel, LB: LinearModel):
    # conditioning map on outcome effects, then extended along the pivot outcomes
    # of A, whose effects form the dual basis of V(A)*
    T = tuple(tuple(w.table[p][q] for q in LB.pivots) for p in LA.pivots)
    for i in range(LA.space.size):
        xhat = tuple(b[i] for b in LA.basis)
        for j in range(LB.space.size):
            yhat = tuple(b[j] for b in LB.basis)
            if dot(xhat, tuple(dot(row, yhat) for row in T)) != w.table[i][j]:
                return None
    return T


def bilinear_extension(w: JointWeight, LA: LinearModel | None = None, LB: LinearModel | None = None) -> tuple:
    """The coordinate matrix ``T`` with ``xhat @ T @ yhat == w(x, y)`` for all outcomes."""
    _require_ns(w)
    LA = LA or linearize(w.A)
    LB = LB or linearize(w.B)
    T = _try_extension(w, LA, LB)
    if T is None:
        raise NotInSpan("conditional weights leave the span of the factor states")
    return T


def extension_exists(w: JointWeight, LA: LinearModel | None = None, LB: LinearModel | None = None) -> bool:
    """Whether a bilinear form reproduces ``w``, tried without any signaling check."""
    return _try_extension(w, LA or linearize(w.A), LB or linearize(w.B)) is not None


def tensor_table(T: Sequence[Sequence], LA: LinearModel, LB: LinearModel) -> tuple:
    """The joint table ``(x, y) -> xhat @ T @ yhat`` of a coordinate tensor."""
    BA = transpose(LA.basis)  # |X| x dim A, row x is xhat
    BB = transpose(LB.basis)
    return matmul(matmul(BA, T), transpose(BB))


def product_tensor(a: Sequence, b: Sequence) -> tuple:
    return outer(vec(a), vec(b))


def _flat(T) -> tuple:
    return tuple(x for row in T for x in row)


def _pair(W, T) -> Fraction:
    return dot(_flat(W), _flat(T))


@dataclass(frozen=True)
class Separability:
    """Result of the min-cone test.

    When separable, ``weights`` maps pairs of vertex indices ``(i, j)`` to the
    coefficient of ``alpha_i (x) beta_j``. Otherwise ``witness`` is a
    functional on tensor coordinates that is at most 0 on every product state,
    with maximum exactly 0, and strictly positive on the input.
    """

    separable: bool
    weights: dict | None = None
    witness: tuple | None = None

    def __bool__(self) -> bool:
        return self.separable


def min_cone_member(LA: LinearModel, LB: LinearModel, T: Sequence[Sequence]) -> Separability:
    T = tuple(vec(r) for r in T)
    if len(T) != LA.dim or any(len(r) != LB.dim for r in T):
        raise DimensionMismatch(f"tensor must be {LA.dim}x{LB.dim}")
    if dot(LA.unit, tuple(dot(r, LB.unit) for r in T)) != ONE:
        raise NotAState("tensor is not normalized")
    pairs = [(i, j) for i in range(len(LA.state_coords)) for j in range(len(LB.state_coords))]
    points = [_flat(outer(LA.state_coords[i], LB.state_coords[j])) for i, j in pairs]
    res = combination(points, _flat(T))
    if res.found:
        return Separability(True, weights={pairs[k]: lam for k, lam in enumerate(res.weights) if lam})
    h = res.separator
    top = max(dot(h, p) for p in points)
    uu = _flat(outer(LA.unit, LB.unit))
    W = tuple(a - top * b for a, b in zip(h, uu))
    return Separability(False, witness=tuple(tuple(W[r * LB.dim : (r + 1) * LB.dim]) for r in range(LA.dim)))


def witness_table(W: Sequence[Sequence], LA: LinearModel, LB: LinearModel) -> tuple:
    """A coefficient table ``c`` on outcome pairs with ``sum c*w == W(T)`` for joint tables ``w``."""
    out = [[ZERO] * LB.space.size for _ in range(LA.space.size)]
    for k, p in enumerate(LA.pivots):
        for l, q in enumerate(LB.pivots):
            out[p][q] = frac(W[k][l])
    return tuple(tuple(r) for r in out)


def dual_cone_rays(L: LinearModel) -> list[tuple]:
    """Extreme rays of the cone of positive functionals on V(A)."""
    return [tuple(Fraction(x) for x in r) for r in polytope.dual_rays(L.state_coords)]


def max_cone_member(LA: LinearModel, LB: LinearModel, T: Sequence[Sequence]) -> Verdict:
    """Whether ``a @ T @ b >= 0`` for all positive functionals ``a``, ``b``."""
    T = tuple(vec(r) for r in T)
    for a in dual_cone_rays(LA):
        aT = tuple(dot(a, col) for col in zip(*T))
        for b in dual_cone_rays(LB):
            if dot(aT, b) < 0:
                return Verdict(False, "max-cone", (a, b))
    return Verdict(True)


# ------------------------------------------------------------ NS polytope


def _conditional_rows(L: LinearModel, size: int, cell) -> tuple[list, list]:
    """Constraints forcing ``v -> (cell(v, 0), ..., cell(v, size-1))`` into cone(states)."""
    eqs, ineqs = [], []
    piv = set(L.pivots)
    for y in range(size):
        if y in piv:
            continue
        row = {cell(y): ONE}
        for k, p in enumerate(L.pivots):
            c = L.basis[k][y]
            if c:
                row[cell(p)] = row.get(cell(p), ZERO) - c
        eqs.append(row)
    for r in dual_cone_rays(L):
        ineqs.append({cell(p): -c for p, c in zip(L.pivots, r) if c})
    return eqs, ineqs


def ns_polytope(A: Model | TestSpace, B: Model | TestSpace) -> StatePolytope:
    """Non-signaling joint states as a polytope over the product test space."""
    A, B = _model(A), _model(B)
    SA, SB = A.space, B.space
    P = product(SA, SB)
    n = P.size
    polytope.check_budget(n, 0)
    idx = [[P.index[pair_label(x, y)] for y in SB.outcomes] for x in SA.outcomes]

    def row(coeffs: dict) -> tuple:
        r = [ZERO] * n
        for k, v in coeffs.items():
            r[k] += v
        return tuple(r)

    A_eq, b_eq = [], []
    for t in P.tests:
        A_eq.append(row({k: ONE for k in t}))
        b_eq.append(ONE)
    for j in range(SB.size):
        E0 = SA.tests[0]
        for E in SA.tests[1:]:
            c = {}
            for i in E:
                c[idx[i][j]] = c.get(idx[i][j], ZERO) + 1
            for i in E0:
                c[idx[i][j]] = c.get(idx[i][j], ZERO) - 1
            A_eq.append(row(c))
            b_eq.append(ZERO)
    for i in range(SA.size):
        F0 = SB.tests[0]
        for F in SB.tests[1:]:
            c = {}
            for j in F:
                c[idx[i][j]] = c.get(idx[i][j], ZERO) + 1
            for j in F0:
                c[idx[i][j]] = c.get(idx[i][j], ZERO) - 1
            A_eq.append(row(c))
            b_eq.append(ZERO)
    G = [tuple(-ONE if k == m else ZERO for k in range(n)) for m in range(n)]
    h = [ZERO] * n
    if not B.is_full:
        LB = linearize(B)
        for i in range(SA.size):
            eqs, ineqs = _conditional_rows(LB, SB.size, lambda j, i=i: idx[i][j])
            A_eq += [row(e) for e in eqs]
            b_eq += [ZERO] * len(eqs)
            G += [row(g) for g in ineqs]
            h += [ZERO] * len(ineqs)
    if not A.is_full:
        LA = linearize(A)
        for j in range(SB.size):
            eqs, ineqs = _conditional_rows(LA, SA.size, lambda i, j=j: idx[i][j])
            A_eq += [row(e) for e in eqs]
            b_eq += [ZERO] * len(eqs)
            G += [row(g) for g in ineqs]
            h += [ZERO] * len(ineqs)
    return StatePolytope(P, A_eq, b_eq, G, h)


def ns_model(A: Model | TestSpace, B: Model | TestSpace) -> Model:
    """``A x_NS B`` with its state space given by vertices."""
    P = ns_polytope(A, B)
    return Model.generated(P.space, P.vertices())


def ns_vertices(A: Model | TestSpace, B: Model | TestSpace) -> list[JointWeight]:
    A, B = _model(A), _model(B)
    return [JointWeight.from_weight(A, B, v) for v in ns_polytope(A, B).vertices()]


# ---------------------------------------------- forward and bilateral products


@dataclass(frozen=True)
class ForwardProduct:
    """Two-stage tests: perform a test of A, then a test of B chosen by the outcome.

    ``stages[k]`` is ``(E, choice)`` for the k-th test of ``space`` in
    construction order, where ``choice`` maps each outcome of E to a test index
    of B.
    """

    A: Model
    B: Model
    space: TestSpace
    stages: tuple


def _transitions(A: TestSpace, B: TestSpace, budget: int | None):
    cap = config.event_budget(budget)
    total = sum(len(B.tests) ** len(E) for E in A.tests)
    if total > cap:
        raise BudgetExceeded(f"{total} two-stage tests exceed budget {cap}")
    for e, E in enumerate(A.tests):
        xs = sorted(E)
        for choice in cartesian(range(len(B.tests)), repeat=len(xs)):
            yield e, dict(zip(xs, choice))


def _two_stage(A: TestSpace, B: TestSpace, E_idx: int, choice: Mapping[int, int]) -> list[str]:
    out = []
    for x in sorted(A.tests[E_idx]):
        for y in sorted(B.tests[choice[x]]):
            out.append(pair_label(A.outcomes[x], B.outcomes[y]))
    return out


def forward_product(A: Model | TestSpace, B: Model | TestSpace, budget: int | None = None) -> ForwardProduct:
    A, B = _model(A), _model(B)
    SA, SB = A.space, B.space
    stages, tests = [], []
    for e, choice in _transitions(SA, SB, budget):
        stages.append((e, tuple(sorted(choice.items()))))
        tests.append(_two_stage(SA, SB, e, choice))
    return ForwardProduct(A, B, TestSpace.from_tests(tests), tuple(stages))


def backward_tests(A: TestSpace, B: TestSpace, budget: int | None = None) -> list[list[str]]:
    """Two-stage tests run from B to A, labelled as ``(x,y)`` pairs."""
    tests = []
    for f, choice in _transitions(B, A, budget):
        out = []
        for y in sorted(B.tests[f]):
            for x in sorted(A.tests[choice[y]]):
                out.append(pair_label(A.outcomes[x], B.outcomes[y]))
        tests.append(out)
    return tests


def bilateral_space(A: Model | TestSpace, B: Model | TestSpace, budget: int | None = None) -> TestSpace:
    SA, SB = _space(A), _space(B)
    fwd = [_two_stage(SA, SB, e, c) for e, c in _transitions(SA, SB, budget)]
    return TestSpace.from_tests(fwd + backward_tests(SA, SB, budget))


def bilateral_model(A: Model | TestSpace, B: Model | TestSpace, budget: int | None = None) -> Model:
    """Bilateral product; its states are the joint states of A and B."""
    A, B = _model(A), _model(B)
    S = bilateral_space(A, B, budget)
    if A.is_full and B.is_full:
        return Model(S)
    P = ns_polytope(A, B)
    verts = [tuple(v.values[P.space.index[lab]] for lab in S.outcomes) for v in P.vertices()]
    return Model.generated(S, verts)


def _transition_values(B: TestSpace, tau, x: str):
    v = tau.get(x) if isinstance(tau, Mapping) else tau(x)
    if v is None:
        return None
    return v.values if isinstance(v, ProbabilityWeight) else vec(v)


def forward_product_weight(
    fp: ForwardProduct, alpha, tau: Mapping[str, object]
) -> ProbabilityWeight:
    """``(alpha; tau)(x, y) = alpha(x) * tau(x)(y)`` on the forward product."""
    SA, SB = fp.A.space, fp.B.space
    a = alpha.values if isinstance(alpha, ProbabilityWeight) else vec(alpha)
    vals = [ZERO] * fp.space.size
    for i, x in enumerate(SA.outcomes):
        beta = _transition_values(SB, tau, x)
        if beta is None:
            if a[i] != 0:
                raise MissingTransition(f"no transition state for outcome {x}")
            continue
        if not in_state_space(fp.B, beta):
            raise NotAState(f"transition at {x} is not a state of B")
        for j, y in enumerate(SB.outcomes):
            vals[fp.space.index[pair_label(x, y)]] = a[i] * beta[j]
    w = ProbabilityWeight(fp.space, vals)
    assert is_weight(fp.space, w)
    return w


def interference_witness(
    A: Model, a: Event, b: Event, alpha, tau: Mapping[str, object], B: Model, c: Event
) -> tuple[Fraction, Fraction]:
    """``(w(a x c), w(b x c))`` for ``w = (alpha; tau)``, requiring ``a ~ b``.

    Unequal values show that ``a x c`` and ``b x c`` are not perspective in the
    forward product, although ``a`` and ``b`` are.
    """
    if not perspective(a, b):
        raise NotPerspective(f"{a} and {b} share no complement")
    SA = A.space
    al = alpha.values if isinstance(alpha, ProbabilityWeight) else vec(alpha)

    def value(ev: Event) -> Fraction:
        total = ZERO
        for i in ev.members:
            if al[i] == 0:
                continue
            beta = _transition_values(B.space, tau, SA.outcomes[i])
            if beta is None:
                raise MissingTransition(f"no transition state for outcome {SA.outcomes[i]}")
            total += al[i] * sum((beta[j] for j in c.members), ZERO)
        return total

    return value(a), value(b)


# ------------------------------------------ conditioning and remote evaluation


def conditioning_map(T: Sequence[Sequence]) -> tuple:
    """Matrix of ``a -> (a (x) id)(T)``, a map V(A)* -> V(B)."""
    return transpose(tuple(vec(r) for r in T))


def co_conditioning_map(Fm: Sequence[Sequence]) -> tuple:
    """Matrix of ``alpha -> f(alpha (x) .)``, a map V(A) -> V(B)*."""
    return transpose(tuple(vec(r) for r in Fm))


def conditioning_is_positive(LA: LinearModel, LB: LinearModel, T: Sequence[Sequence]) -> bool:
    """Whether the conditioning map sends positive functionals into V(B)+."""
    M = conditioning_map(T)
    gens = LB.cone_generators
    return all(in_cone(gens, tuple(dot(r, a) for r in M)) for a in dual_cone_rays(LA))


@dataclass(frozen=True)
class RemoteEvaluation:
    lhs: Fraction
    rhs: Fraction
    channel: tuple  # matrix of the composite map V(U) -> V(W)

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


def remote_evaluate(alpha: Sequence, f: Sequence[Sequence], omega: Sequence[Sequence], e: Sequence) -> RemoteEvaluation:
    """``(f (x) e)(alpha (x) omega)`` computed directly and as ``e(omega^ . f^ (alpha))``."""
    alpha = vec(alpha)
    e = vec(e)
    f = tuple(vec(r) for r in f)
    omega = tuple(vec(r) for r in omega)
    dU, dV, dW = len(alpha), len(omega), len(e)
    if len(f) != dU or any(len(r) != dV for r in f) or any(len(r) != dW for r in omega):
        raise DimensionMismatch("incompatible dimensions for remote evaluation")
    # left side: full contraction of the two 3-index tensors
    left = ZERO
    for i in range(dU):
        if not alpha[i]:
            continue
        for j in range(dV):
            fij = f[i][j]
            if not fij:
                continue
            for k in range(dW):
                left += alpha[i] * omega[j][k] * fij * e[k]
    channel = matmul(conditioning_map(omega), co_conditioning_map(f))
    right = dot(e, tuple(dot(r, alpha) for r in channel))
    return RemoteEvaluation(left, right, channel)


def remote_channel(LU: LinearModel, LW: LinearModel, f: Sequence[Sequence], omega: Sequence[Sequence]) -> Channel:
    return Channel(LU, LW, matmul(conditioning_map(omega), co_conditioning_map(f)))


def is_positive_isomorphism(phi: Channel) -> bool:
    """Invertible, positive, with positive inverse."""
    if phi.source.dim != phi.target.dim:
        return False
    if rank(phi.matrix) < phi.source.dim:
        return False
    inv = inverse(phi.matrix)
    fwd = all(in_cone(phi.target.cone_generators, phi.apply(g)) for g in phi.source.cone_generators)
    back = all(
        in_cone(phi.source.cone_generators, tuple(dot(r, g) for r in inv)) for g in phi.target.cone_generators
    )
    return fwd and back


# --------------------------------------------------------------- composites


@dataclass(frozen=True)
class CompositeCheck:
    ok: bool
    condition: str | None = None
    witness: object = None
    locally_tomographic: bool | None = None
    injective: bool | None = None

    def __bool__(self) -> bool:
        return self.ok


def verify_composite(A: Model, B: Model, AB: Model, pi: Mapping[tuple[str, str], str]) -> CompositeCheck:
    """Check that ``(AB, pi)`` is a non-signaling composite of A and B.

    ``pi`` maps pairs of outcome labels to outcomes of AB. Reports whether the
    pullback of states is injective (local tomography) and whether ``pi`` is
    injective as a map of outcomes, which the definition leaves open.
    """
    SA, SB = A.space, B.space
    P = ns_model(A, B)
    try:
        mapping = {pair_label(x, y): pi[(x, y)] for x in SA.outcomes for y in SB.outcomes}
    except KeyError as exc:
        raise UnknownOutcome(f"pi is undefined at {exc.args[0]}") from None
    phi = Morphism.from_labels(P, AB, mapping)
    v = verify_morphism(phi)
    if not v:
        return CompositeCheck(False, f"morphism-{v.condition}", v.witness)
    for t in P.space.tests:
        if not AB.space.is_test(phi.image(t)):
            return CompositeCheck(False, "test-preserving", P.space.labels(t))
    pulled = [tuple(b.values[phi.mapping[k]] for k in range(P.space.size)) for b in state_vertices(AB)]
    for al in state_vertices(A):
        for be in state_vertices(B):
            prod = product_weight(A, B, al, be).as_weight()
            target = tuple(prod.values[P.space.index[lab]] for lab in P.space.outcomes)
            if not combination(pulled, target).found:
                return CompositeCheck(False, "product-states", (al.values, be.values))
    gens = [b.values for b in state_vertices(AB)]
    lt = rank(pulled) == rank(gens)
    injective = len(set(phi.mapping)) == len(phi.mapping)
    return CompositeCheck(True, locally_tomographic=lt, injective=injective)


# ------------------------------------------------------------- boxworld


def gbit_label(i: int, j: int) -> str:
    return f"({i}|{j})"


def gbit() -> Model:
    """Two disjoint two-outcome tests; outcome ``(i|j)`` is result i of test j."""
    return Model(TestSpace.from_tests([[gbit_label(0, j), gbit_label(1, j)] for j in (0, 1)]))


def boxworld_label(outs: Sequence[int], tests: Sequence[int]) -> str:
    return "(" + ",".join(map(str, outs)) + "|" + ",".join(map(str, tests)) + ")"


def boxworld_space(n: int) -> TestSpace:
    if n < 1 or n > 4:
        raise BudgetExceeded("boxworld is built for 1 <= n <= 4")
    tests = []
    for js in cartesian((0, 1), repeat=n):
        tests.append([boxworld_label(iv, js) for iv in cartesian((0, 1), repeat=n)])
    return TestSpace.from_tests(tests)


def regroup(label_a: str, label_b: str) -> str:
    """``((i|j),(k|l))`` coordinates to the boxworld label ``(i,k|j,l)``."""
    ia, ja = label_a.strip("()").split("|")
    ib, jb = label_b.strip("()").split("|")
    return f"({ia},{ib}|{ja},{jb})"


def boxworld(n: int, states: str = "ns") -> Model:
    """n gbits side by side.

    ``states="ns"`` allows every non-signaling state (available for n <= 2);
    ``states="full"`` allows every probability weight on the test space.
    """
    S = boxworld_space(n)
    if states == "full" or n == 1:
        return Model(S)
    if states != "ns":
        raise ValueError(f"unknown state space {states!r}")
    if n > 2:
        raise BudgetExceeded("non-signaling boxworld states are enumerated only for n <= 2")
    G = gbit()
    SG = G.space
    verts = []
    for w in ns_vertices(G, G):
        vals = {regroup(x, y): w.table[i][j] for i, x in enumerate(SG.outcomes) for j, y in enumerate(SG.outcomes)}
        verts.append(tuple(vals[lab] for lab in S.outcomes))
    return Model.generated(S, sorted(verts))


def pr_box(A: Model | None = None, B: Model | None = None) -> JointWeight:
    """``w((a|x),(b|y)) = 1/2`` when ``a xor b == x*y``, else 0."""
    A = A or gbit()
    B = B or gbit()
    rows = []
    for x in A.space.outcomes:
        a, s = map(int, x.strip("()").split("|"))
        row = []
        for y in B.space.outcomes:
            b, t = map(int, y.strip("()").split("|"))
            row.append(HALF if (a ^ b) == s * t else ZERO)
        rows.append(tuple(row))
    return JointWeight(A, B, tuple(rows))


def dispersion_free_ns_choices(A: TestSpace, B: TestSpace, budget: int | None = None):
    """Every dispersion-free non-signaling joint weight on semiclassical A, B.

    Such a weight puts mass 1 on exactly one cell ``(x, y)`` of each block
    ``E x F``; blocks are filled by backtracking and partial assignments are
    pruned by the no-signaling equalities. Yields dicts mapping ``(e, f)``
    test-index pairs to the chosen ``(x, y)`` outcome-index pairs.
    """
    if not (all(not (E & F) for E in A.tests for F in A.tests if E != F) and all(not (E & F) for E in B.tests for F in B.tests if E != F)):
        raise ValueError("both test spaces must be semiclassical")
    blocks = [(e, f) for e in range(len(A.tests)) for f in range(len(B.tests))]
    cap = config.event_budget(budget)
    chosen: dict[tuple[int, int], tuple[int, int]] = {}
    count = 0

    def consistent(e: int, f: int, x: int, y: int) -> bool:
        # w(E'y) must equal w(Ey): in block (e', f) the chosen y is the same
        for (e2, f2), (x2, y2) in chosen.items():
            if f2 == f and y2 != y:
                return False
            if e2 == e and x2 != x:
                return False
        return True

    def search(k: int):
        nonlocal count
        if k == len(blocks):
            count += 1
            if count > cap:
                raise BudgetExceeded("dispersion-free enumeration exceeds the budget")
            yield dict(chosen)
            return
        e, f = blocks[k]
        for x in sorted(A.tests[e]):
            for y in sorted(B.tests[f]):
                if consistent(e, f, x, y):
                    chosen[(e, f)] = (x, y)
                    yield from search(k + 1)
                    del chosen[(e, f)]

    yield from search(0)


def factors_as_dispersion_free_product(A: TestSpace, B: TestSpace, choice: Mapping) -> bool:
    """Whether a dispersion-free block choice equals ``alpha (x) beta`` for dispersion-free alpha, beta.

    A product of dispersion-free weights has exactly one unit cell per block,
    at ``(x_E, y_F)``; so the check is that the chosen ``x`` depends only on
    the test of A and the chosen ``y`` only on the test of B.
    """
    xs: dict[int, int] = {}
    ys: dict[int, int] = {}
    for (e, f), (x, y) in choice.items():
        if xs.setdefault(e, x) != x or ys.setdefault(f, y) != y:
            return False
    return True


def is_product(w: JointWeight) -> bool:
    try:
        m1, m2 = marginals(w)
    except NotNonsignaling:
        return False
    return w.table == outer(m1.values, m2.values)


def dispersion_free_vertices(P: StatePolytope) -> list[ProbabilityWeight]:
    return [v for v in P.vertices() if is_dispersion_free(v)]


def effect_of_pair(LA: LinearModel, LB: LinearModel, a: Effect, b: Effect) -> tuple:
    """The product effect ``a (x) b`` as a dual coordinate matrix."""
    return outer(a.covector, b.covector)
