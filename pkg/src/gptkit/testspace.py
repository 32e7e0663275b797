"""Finite test spaces, their events, and probabilistic models.

A test space is a finite hypergraph: outcomes are vertices and tests are
hyperedges. Outcomes are indexed densely in lexicographic order of their
labels, and every set-valued output is emitted in index order so that reports
are reproducible byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import chain, combinations
from typing import Iterable, Iterator, Sequence

from gptkit import config
from gptkit.errors import (
    BudgetExceeded,
    InvalidTestSpace,
    IrredundanceError,
    NotAnEvent,
    NotAWeight,
    OwnerMismatch,
    ParseError,
    UnknownOutcome,
)
from gptkit.rational import ONE, ZERO, fmt, frac


def _set_key(s: Iterable[int]) -> tuple:
    t = tuple(sorted(s))
    return (len(t), t)


@dataclass(frozen=True)
class TestSpace:
    """An irredundant collection of non-empty outcome sets.

    Build instances with :meth:`from_tests`; the raw constructor assumes its
    arguments are already canonical.
    """

    __test__ = False  # keep pytest from collecting this class

    outcomes: tuple[str, ...]
    tests: tuple[frozenset, ...]

    @classmethod
    def from_tests(cls, tests: Iterable[Iterable[str]], outcomes: Iterable[str] | None = None) -> "TestSpace":
        raw = [tuple(t) for t in tests]
        labels_in_tests = set(chain.from_iterable(raw))
        if outcomes is None:
            labels = sorted(labels_in_tests)
        else:
            listed = list(outcomes)
            if len(set(listed)) != len(listed):
                raise InvalidTestSpace("duplicate outcome labels")
            unknown = sorted(labels_in_tests - set(listed))
            if unknown:
                raise UnknownOutcome(f"tests reference unlisted outcomes: {unknown}")
            unused = sorted(set(listed) - labels_in_tests)
            if unused:
                raise InvalidTestSpace(f"outcomes in no test: {unused}")
            labels = sorted(listed)
        for lab in labels:
            if not isinstance(lab, str):
                raise InvalidTestSpace(f"outcome labels must be strings, got {lab!r}")
        index = {lab: i for i, lab in enumerate(labels)}
        sets = set()
        for t in raw:
            if not t:
                raise InvalidTestSpace("empty test")
            if len(set(t)) != len(t):
                raise InvalidTestSpace(f"test {list(t)} repeats an outcome")
            sets.add(frozenset(index[x] for x in t))
        ordered = sorted(sets, key=_set_key)
        for e in ordered:
            for f in ordered:
                if e < f:
                    raise IrredundanceError([labels[i] for i in sorted(e)], [labels[i] for i in sorted(f)])
        return cls(tuple(labels), tuple(ordered))

    @property
    def size(self) -> int:
        return len(self.outcomes)

    @cached_property
    def index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.outcomes)}

    @cached_property
    def tests_of(self) -> tuple[tuple[int, ...], ...]:
        """For each outcome, the indices of the tests containing it."""
        out: list[list[int]] = [[] for _ in self.outcomes]
        for k, t in enumerate(self.tests):
            for x in t:
                out[x].append(k)
        return tuple(tuple(v) for v in out)

    def labels(self, members: Iterable[int]) -> list[str]:
        return [self.outcomes[i] for i in sorted(members)]

    def indices(self, labels: Iterable[str]) -> frozenset:
        try:
            return frozenset(self.index[lab] for lab in labels)
        except KeyError as exc:
            raise UnknownOutcome(f"unknown outcome {exc.args[0]!r}") from None

    def witness(self, members: frozenset) -> int | None:
        """Index of the first test containing ``members``, if any."""
        if not members:
            return 0
        first = min(members)
        for k in self.tests_of[first]:
            if members <= self.tests[k]:
                return k
        return None

    def event(self, labels: Iterable[str] | Iterable[int]) -> "Event":
        items = list(labels)
        if all(isinstance(x, int) for x in items):
            members = frozenset(items)
        else:
            members = self.indices(items)
        w = self.witness(members)
        if w is None:
            raise NotAnEvent(f"{sorted(self.labels(members))} lies in no test")
        return Event(self, members, w)

    def test_event(self, k: int) -> "Event":
        return Event(self, self.tests[k], k)

    def is_test(self, members: frozenset) -> bool:
        return members in self._test_set

    @cached_property
    def _test_set(self) -> frozenset:
        return frozenset(self.tests)

    def to_dict(self) -> dict:
        return {"outcomes": list(self.outcomes), "tests": [self.labels(t) for t in self.tests]}

    def __repr__(self) -> str:
        inner = ", ".join("{" + ",".join(self.labels(t)) + "}" for t in self.tests)
        return f"TestSpace({inner})"


@dataclass(frozen=True)
class Event:
    """A subset of some test; identity is the member set within its owner."""

    owner: TestSpace = field(repr=False)
    members: frozenset
    witness: int = field(default=0, compare=False, repr=False)

    @property
    def labels(self) -> list[str]:
        return self.owner.labels(self.members)

    def __repr__(self) -> str:
        return "{" + ",".join(self.labels) + "}"

    def __len__(self) -> int:
        return len(self.members)

    @property
    def sort_key(self) -> tuple:
        return _set_key(self.members)


def _same_owner(a: Event, b: Event) -> None:
    if a.owner is not b.owner and a.owner != b.owner:
        raise OwnerMismatch("events belong to different test spaces")


def is_semiclassical(M: TestSpace) -> bool:
    return all(not (e & f) for e, f in combinations(M.tests, 2))


def events(M: TestSpace, budget: int | None = None) -> list[Event]:
    """Every event of ``M`` exactly once, in (size, members) order."""
    cap = config.event_budget(budget)
    total = sum(2 ** len(t) for t in M.tests)
    if total > cap:
        raise BudgetExceeded(f"event enumeration needs {total} subsets, budget is {cap}")
    seen: dict[frozenset, int] = {}
    for k, t in enumerate(M.tests):
        items = sorted(t)
        for r in range(len(items) + 1):
            for sub in combinations(items, r):
                s = frozenset(sub)
                if s not in seen:
                    seen[s] = k
    return [Event(M, s, w) for s, w in sorted(seen.items(), key=lambda kv: _set_key(kv[0]))]


def orthogonal(a: Event, b: Event) -> bool:
    _same_owner(a, b)
    if a.members & b.members:
        return False
    return a.owner.witness(a.members | b.members) is not None


def complements(a: Event) -> list[Event]:
    M = a.owner
    out = {}
    for k, t in enumerate(M.tests):
        if a.members <= t:
            rest = t - a.members
            if rest not in out:
                out[rest] = k
    return [Event(M, s, k) for s, k in sorted(out.items(), key=lambda kv: _set_key(kv[0]))]


def _complement_sets(a: Event) -> frozenset:
    return frozenset(t - a.members for t in a.owner.tests if a.members <= t)


def perspective(a: Event, b: Event) -> bool:
    _same_owner(a, b)
    return bool(_complement_sets(a) & _complement_sets(b))


def algebraic_counterexample(M: TestSpace, budget: int | None = None) -> tuple[Event, Event, Event] | None:
    """A triple (a, b, c) with a ~ b and c complementary to b but not to a."""
    evs = events(M, budget)
    comps = {e.members: _complement_sets(e) for e in evs}
    # group events by each complement they have; a ~ b iff they share a group
    by_comp: dict[frozenset, list[frozenset]] = {}
    for e in evs:
        for c in comps[e.members]:
            by_comp.setdefault(c, []).append(e.members)
    for e in evs:
        a = e.members
        partners = set()
        for c in comps[a]:
            partners.update(by_comp[c])
        for b in sorted(partners, key=_set_key):
            missing = comps[b] - comps[a]
            if missing:
                c = min(missing, key=_set_key)
                return (M.event(a), M.event(b), M.event(c))
    return None


def is_algebraic(M: TestSpace, budget: int | None = None) -> bool:
    return algebraic_counterexample(M, budget) is None


def _set_partitions(items: list[int]) -> Iterator[list[frozenset]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [frozenset([first])] + part
        for i in range(len(part)):
            yield part[:i] + [part[i] | {first}] + part[i + 1 :]


def event_label(M: TestSpace, members: Iterable[int]) -> str:
    return "{" + ",".join(M.labels(members)) + "}"


def coarsen_finite(M: TestSpace, budget: int | None = None) -> TestSpace:
    """All partitions of tests of ``M`` into non-empty events, as a test space.

    Outcomes are labelled ``{x,y,...}`` after the event they stand for, so the
    singleton ``{x}`` plays the role of the original outcome ``x``.
    """
    cap = config.event_budget(budget)
    if sum(2 ** len(t) for t in M.tests) > cap:
        raise BudgetExceeded("coarsening exceeds the enumeration budget")
    tests = set()
    generated = 0
    for t in M.tests:
        for part in _set_partitions(sorted(t)):
            generated += 1
            if generated > cap:
                raise BudgetExceeded("coarsening exceeds the enumeration budget")
            tests.add(frozenset(event_label(M, b) for b in part))
    return TestSpace.from_tests(sorted(tests, key=lambda s: sorted(s)))


def pair_label(x: str, y: str) -> str:
    return f"({x},{y})"


def product(A: TestSpace, B: TestSpace) -> TestSpace:
    """The product test space {E x F}; outcome (x, y) is labelled ``(x,y)``."""
    tests = []
    for e in A.tests:
        for f in B.tests:
            tests.append([pair_label(A.outcomes[i], B.outcomes[j]) for i in sorted(e) for j in sorted(f)])
    return TestSpace.from_tests(tests)


def dot(M: TestSpace, name: str = "M") -> str:
    """Graphviz rendering: outcome nodes, one hyperedge node per test."""
    palette = ["red", "blue", "darkgreen", "orange", "purple", "brown", "teal", "magenta"]
    lines = [f"graph {json.dumps(name)} {{", "  node [shape=circle];"]
    for lab in M.outcomes:
        lines.append(f"  {json.dumps(lab)};")
    for k, t in enumerate(M.tests):
        color = palette[k % len(palette)]
        hub = json.dumps(f"test{k}")
        lines.append(f"  {hub} [shape=point, color={color}];")
        for i in sorted(t):
            lines.append(f"  {hub} -- {json.dumps(M.outcomes[i])} [color={color}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ProbabilityWeight:
    """Exact probabilities indexed by outcome index."""

    space: TestSpace = field(repr=False)
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(frac(v) for v in self.values))

    def __getitem__(self, label: str) -> Fraction:
        return self.values[self.space.index[label]]

    def as_dict(self) -> dict[str, Fraction]:
        return dict(zip(self.space.outcomes, self.values))


def weight_violation(M: TestSpace, values: Sequence[Fraction]) -> str | None:
    if len(values) != M.size:
        return f"expected {M.size} values, got {len(values)}"
    for i, v in enumerate(values):
        if v < 0 or v > 1:
            return f"value {fmt(v)} at {M.outcomes[i]} outside [0,1]"
    for t in M.tests:
        s = sum((values[i] for i in t), ZERO)
        if s != ONE:
            return f"test {{{','.join(M.labels(t))}}} sums to {fmt(s)}"
    return None


@dataclass(frozen=True)
class Model:
    """A test space with a state space.

    ``generators is None`` means the full model (every probability weight is a
    state); otherwise the state space is the convex hull of the generators.
    """

    space: TestSpace
    generators: tuple | None = None

    @property
    def is_full(self) -> bool:
        return self.generators is None

    @classmethod
    def generated(cls, space: TestSpace, weights: Iterable[Sequence]) -> "Model":
        gens = []
        for w in weights:
            vals = w.values if isinstance(w, ProbabilityWeight) else tuple(frac(v) for v in w)
            bad = weight_violation(space, vals)
            if bad:
                raise NotAWeight(bad)
            gens.append(ProbabilityWeight(space, vals))
        return cls(space, tuple(gens))

    def to_dict(self) -> dict:
        doc = self.space.to_dict()
        doc["states"] = "full" if self.is_full else [[fmt(v) for v in g.values] for g in self.generators]
        return doc


def parse_model(doc) -> Model:
    if not isinstance(doc, dict):
        raise ParseError("model document must be a JSON object")
    if "tests" not in doc:
        raise ParseError("model document needs a 'tests' field")
    tests = doc["tests"]
    if not isinstance(tests, list) or not all(isinstance(t, list) for t in tests):
        raise ParseError("'tests' must be a list of lists of labels")
    outcomes = doc.get("outcomes")
    if outcomes is not None and not isinstance(outcomes, list):
        raise ParseError("'outcomes' must be a list")
    space = TestSpace.from_tests(tests, outcomes)
    states = doc.get("states", "full")
    if states == "full":
        return Model(space)
    if not isinstance(states, list):
        raise ParseError("'states' must be \"full\" or a list of vectors")
    try:
        vectors = [[_parse_rational(q) for q in s] for s in states]
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational in states: {exc}") from None
    return Model.generated(space, vectors)


def _parse_rational(q) -> Fraction:
    if isinstance(q, bool) or isinstance(q, float):
        raise ValueError(f"{q!r} is not an exact rational")
    if isinstance(q, (int, str)):
        return frac(q)
    raise ValueError(f"{q!r} is not an exact rational")


def load_model(data: bytes | str) -> Model:
    """Parse a JSON model document."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(str(exc)) from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(str(exc)) from None
    return parse_model(doc)


def dump_model(model: Model) -> str:
    return json.dumps(model.to_dict(), sort_keys=True)
