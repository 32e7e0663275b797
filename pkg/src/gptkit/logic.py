"""Finite orthoalgebras and effect algebras.

The logic of an algebraic test space is the set of perspectivity classes of
its events, with ``[a] + [b] = [a | b]`` defined whenever some representatives
are orthogonal. Elements are plain integers indexing ``Orthoalgebra.elements``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from gptkit.errors import NotAlgebraic, NotPairwiseOrthogonal
from gptkit.states import Verdict
from gptkit.testspace import Event, TestSpace, _complement_sets, algebraic_counterexample, events


@dataclass(frozen=True)
class EffectAlgebraTable:
    """A finite partial algebra ``(L, perp, oplus, 0, 1)`` given by tables.

    ``oplus`` maps ordered pairs ``(p, q)`` to ``p + q``; a pair is orthogonal
    exactly when it is a key of ``oplus``.
    """

    elements: tuple
    oplus: dict = field(hash=False)
    zero: int = 0
    one: int = 1

    def perp(self, p: int, q: int) -> bool:
        return (p, q) in self.oplus

    @property
    def size(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class Orthoalgebra(EffectAlgebraTable):
    ocomp: tuple = ()
    classes: tuple = ()  # for a logic: the events in each class, representative first

    def complement(self, p: int) -> int:
        return self.ocomp[p]

    def id_of(self, name: str) -> int:
        return self.elements.index(name)

    def to_dict(self) -> dict:
        names = self.elements
        return {
            "elements": list(names),
            "zero": names[self.zero],
            "one": names[self.one],
            "perp": sorted([names[p], names[q]] for (p, q) in self.oplus if p <= q),
            "oplus": sorted([names[p], names[q], names[r]] for (p, q), r in self.oplus.items() if p <= q),
            "complement": {names[p]: names[self.ocomp[p]] for p in range(len(names))},
        }


def _class_name(M: TestSpace, members: frozenset, is_unit: bool) -> str:
    if not members:
        return "0"
    if is_unit:
        return "1"
    return "[" + ",".join(M.labels(members)) + "]"


def build_logic(M: TestSpace, budget: int | None = None) -> Orthoalgebra:
    """The orthoalgebra of perspectivity classes of events of ``M``."""
    bad = algebraic_counterexample(M, budget)
    if bad is not None:
        raise NotAlgebraic(f"{bad[0]} ~ {bad[1]} and {bad[2]} complements {bad[1]} but not {bad[0]}")
    evs = events(M, budget)
    comps = {e.members: _complement_sets(e) for e in evs}
    # on an algebraic space, a ~ b iff they have the same complements
    groups: dict[frozenset, list[frozenset]] = {}
    for e in evs:
        groups.setdefault(comps[e.members], []).append(e.members)
    class_list = sorted(groups.values(), key=lambda g: (len(g[0]), tuple(sorted(g[0]))))
    unit_test = M.tests[0]
    cls_of: dict[frozenset, int] = {}
    names = []
    for k, members in enumerate(class_list):
        for s in members:
            cls_of[s] = k
        names.append(_class_name(M, members[0], unit_test in members))
    zero = cls_of[frozenset()]
    one = cls_of[unit_test]

    oplus: dict[tuple[int, int], int] = {}
    for a in evs:
        for b in evs:
            if a.members & b.members:
                continue
            u = a.members | b.members
            if M.witness(u) is None:
                continue
            key = (cls_of[a.members], cls_of[b.members])
            val = cls_of[u]
            if oplus.setdefault(key, val) != val:
                raise NotAlgebraic(f"sum of classes {names[key[0]]}, {names[key[1]]} is not well defined")
    # property (1): a ~ b and b perp c imply a perp c
    for a in evs:
        for c in evs:
            key = (cls_of[a.members], cls_of[c.members])
            if key in oplus and (a.members & c.members or M.witness(a.members | c.members) is None):
                raise NotAlgebraic(f"orthogonality of {a} and {c} is not class invariant")
    ocomp = []
    for k in range(len(class_list)):
        partners = [q for q in range(len(class_list)) if oplus.get((k, q)) == one]
        if len(partners) != 1:
            raise NotAlgebraic(f"class {names[k]} has {len(partners)} orthocomplements")
        ocomp.append(partners[0])
    classes = tuple(tuple(M.event(s) for s in members) for members in class_list)
    return Orthoalgebra(tuple(names), oplus, zero, one, tuple(ocomp), classes)


def class_of(L: Orthoalgebra, a: Event) -> int:
    for k, members in enumerate(L.classes):
        if a in members:
            return k
    raise KeyError(a)


def leq(L: EffectAlgebraTable, p: int, q: int) -> bool:
    return any(L.oplus.get((p, r)) == q for r in range(L.size))


def joint_sum(L: EffectAlgebraTable, S: Iterable[int], _memo: dict | None = None) -> int | None:
    """``+S`` if ``S`` is jointly orthogonal, else None.

    Requires ``S`` pairwise orthogonal; raises otherwise.
    """
    items = tuple(sorted(set(S)))
    for p, q in combinations(items, 2):
        if not L.perp(p, q):
            raise NotPairwiseOrthogonal(f"{L.elements[p]} and {L.elements[q]} are not orthogonal")
    memo = {} if _memo is None else _memo
    return _jsum(L, frozenset(items), memo)


def _jsum(L, S: frozenset, memo: dict):
    if S in memo:
        return memo[S]
    if not S:
        result = L.zero
    elif len(S) == 1:
        result = next(iter(S))
    else:
        result = None
        ok = True
        for p in sorted(S):
            b = _jsum(L, S - {p}, memo)
            if b is None or not L.perp(b, p):
                ok = False
                break
            r = L.oplus[(b, p)]
            if result is None:
                result = r
            elif result != r:
                ok = False
                break
        if not ok:
            result = None
    memo[S] = result
    return result


def jointly_orthogonal(L: EffectAlgebraTable, S: Iterable[int]) -> bool:
    return joint_sum(L, S) is not None


def orthocoherence_counterexample(L: EffectAlgebraTable) -> tuple[int, int, int] | None:
    n = L.size
    for p, q, r in combinations(range(n), 3):
        if L.perp(p, q) and L.perp(q, r) and L.perp(p, r):
            for a, b, c in ((p, q, r), (q, p, r), (r, p, q)):
                if not L.perp(a, L.oplus[(b, c)]):
                    return (p, q, r)
    return None


def is_orthocoherent(L: EffectAlgebraTable) -> bool:
    return orthocoherence_counterexample(L) is None


def compatibility_witness(L: EffectAlgebraTable, a: int, b: int) -> tuple[int, int, int] | None:
    """A jointly orthogonal ``(p, q, r)`` with ``a = p + q`` and ``b = q + r``."""
    n = L.size
    for q in range(n):
        for p in range(n):
            if L.oplus.get((p, q)) != a:
                continue
            for r in range(n):
                if L.oplus.get((q, r)) != b or not L.perp(p, r):
                    continue
                trio = {p, q, r}
                if len(trio) < 3:
                    # repeated elements: only zero may repeat in an orthoalgebra
                    if not _repeat_ok(L, p, q, r):
                        continue
                    if L.perp(L.oplus[(p, q)], r):
                        return (p, q, r)
                    continue
                if joint_sum(L, trio) is not None:
                    return (p, q, r)
    return None


def _repeat_ok(L, p, q, r) -> bool:
    vals = [p, q, r]
    return all(vals.count(v) == 1 or v == L.zero for v in vals)


def is_boolean(L: EffectAlgebraTable) -> bool:
    return all(compatibility_witness(L, a, b) is not None for a in range(L.size) for b in range(a, L.size))


def orthopartitions(L: EffectAlgebraTable) -> TestSpace:
    """Test space of jointly orthogonal subsets of ``L - {0}`` summing to 1."""
    items = [p for p in range(L.size) if p != L.zero]
    tests: list[list[str]] = []

    def extend(start: int, chosen: list[int], total: int) -> None:
        if chosen and total == L.one:
            tests.append([L.elements[p] for p in chosen])
        for k in range(start, len(items)):
            p = items[k]
            if any(not L.perp(p, c) for c in chosen):
                continue
            if chosen:
                if not L.perp(total, p):
                    continue
                new_total = L.oplus[(total, p)]
            else:
                new_total = p
            extend(k + 1, chosen + [p], new_total)

    extend(0, [], L.zero)
    return TestSpace.from_tests(tests)


def refines(E: Iterable[Iterable[str]], F: Iterable[Iterable[str]]) -> bool:
    """Whether partition ``E`` refines ``F``: same union, each block of F a union of blocks of E."""
    E = [frozenset(b) for b in E]
    F = [frozenset(b) for b in F]
    if frozenset().union(*E) != frozenset().union(*F):
        return False
    return all(any(e <= f for f in F) for e in E)


def isomorphism(L: EffectAlgebraTable, K: EffectAlgebraTable) -> dict[int, int] | None:
    """A bijection preserving 0, 1, orthogonality and sums, found by backtracking."""
    n = L.size
    if n != K.size or len(L.oplus) != len(K.oplus):
        return None

    def signature(A, p):
        deg = sum(1 for q in range(A.size) if A.perp(p, q))
        below = sum(1 for q in range(A.size) if leq(A, q, p))
        return (deg, below, A.perp(p, p))

    sig_l = [signature(L, p) for p in range(n)]
    sig_k = [signature(K, p) for p in range(n)]
    order = sorted(range(n), key=lambda p: (sig_l.count(sig_l[p]), p))
    f: dict[int, int] = {L.zero: K.zero, L.one: K.one}
    if L.zero == L.one or K.zero == K.one:
        return f if n == 1 and L.zero == L.one and K.zero == K.one else None
    used = {K.zero, K.one}

    def consistent(p: int, img: int) -> bool:
        for q, fq in f.items():
            if L.perp(p, q) != K.perp(img, fq):
                return False
            if L.perp(p, q):
                s = L.oplus[(p, q)]
                t = K.oplus[(img, fq)]
                if s in f and f[s] != t:
                    return False
                if s == p and t != img or s == q and t != fq:
                    return False
        if L.perp(p, p) != K.perp(img, img):
            return False
        return True

    rest = [p for p in order if p not in f]

    def search(i: int) -> bool:
        if i == len(rest):
            return all(K.oplus[(f[p], f[q])] == f[s] for (p, q), s in L.oplus.items())
        p = rest[i]
        for cand in range(n):
            if cand in used or sig_k[cand] != sig_l[p] or not consistent(p, cand):
                continue
            f[p] = cand
            used.add(cand)
            if search(i + 1):
                return True
            del f[p]
            used.discard(cand)
        return False

    return dict(f) if search(0) else None


def verify_effect_algebra(T: EffectAlgebraTable) -> Verdict:
    """Exhaustive check of the four effect-algebra axioms."""
    n = T.size
    for (p, q), r in T.oplus.items():
        if (q, p) not in T.oplus or T.oplus[(q, p)] != r:
            return Verdict(False, "i", (p, q))
    for p in range(n):
        for q in range(n):
            if not T.perp(p, q):
                continue
            pq = T.oplus[(p, q)]
            for r in range(n):
                if not T.perp(pq, r):
                    continue
                if not T.perp(q, r):
                    return Verdict(False, "ii", (p, q, r))
                qr = T.oplus[(q, r)]
                if not T.perp(p, qr) or T.oplus[(p, qr)] != T.oplus[(pq, r)]:
                    return Verdict(False, "ii", (p, q, r))
    for p in range(n):
        partners = [q for q in range(n) if T.oplus.get((p, q)) == T.one]
        if len(partners) != 1:
            return Verdict(False, "iii", p)
    for p in range(n):
        if T.perp(p, T.one) and p != T.zero:
            return Verdict(False, "iv", p)
    return Verdict(True)


def verify_orthoalgebra(L: EffectAlgebraTable) -> Verdict:
    """Orthoalgebra axioms: the effect-algebra ones plus p perp p only for 0."""
    v = verify_effect_algebra(L)
    if not v:
        return v
    for p in range(L.size):
        if L.perp(p, p) and p != L.zero:
            return Verdict(False, "irreflexive", p)
    return Verdict(True)


def interval_effect_algebra(values: Sequence) -> EffectAlgebraTable:
    """A finite chain of rationals in [0, 1] containing 0 and 1, with p perp q iff p + q is in the set."""
    from gptkit.rational import frac

    vals = sorted({frac(v) for v in values})
    index = {v: i for i, v in enumerate(vals)}
    oplus = {}
    for i, a in enumerate(vals):
        for j, b in enumerate(vals):
            if a + b <= 1 and a + b in index:
                oplus[(i, j)] = index[a + b]
    return EffectAlgebraTable(tuple(str(v) for v in vals), oplus, index[0], index[1])


def descends(L: Orthoalgebra, values: Sequence) -> bool:
    """Whether a weight (by outcome index) is constant on each class."""
    for members in L.classes:
        probs = {sum((values[i] for i in e.members), 0) for e in members}
        if len(probs) > 1:
            return False
    return True
