"""Named test spaces and models used throughout the docs, tests and CLI."""

from __future__ import annotations

from typing import Callable

from gptkit.composites import boxworld, gbit, pr_box
from gptkit.errors import ParseError
from gptkit.testspace import Model, TestSpace


def firefly() -> Model:
    """Three three-outcome tests arranged in a triangle."""
    return Model(TestSpace.from_tests([["a", "x", "b"], ["b", "y", "c"], ["c", "z", "a"]]))


def square() -> Model:
    """Two disjoint two-outcome tests; the state space is a square."""
    return Model(TestSpace.from_tests([["x", "x'"], ["y", "y'"]]))


def pyramid() -> Model:
    """Two three-outcome tests sharing one outcome."""
    return Model(TestSpace.from_tests([["u", "x", "v"], ["v", "y", "w"]]))


def ds3() -> Model:
    """Rows and columns of a 3x3 grid; states are doubly stochastic matrices."""
    cell = lambda i, j: f"{i}{j}"  # noqa: E731
    rows = [[cell(i, j) for j in range(3)] for i in range(3)]
    cols = [[cell(i, j) for i in range(3)] for j in range(3)]
    return Model(TestSpace.from_tests(rows + cols))


def classical3() -> Model:
    return Model(TestSpace.from_tests([["x", "y", "z"]]))


def bit() -> Model:
    return Model(TestSpace.from_tests([["0", "1"]]))


def unique() -> Model:
    """Three two-outcome tests in a triangle: exactly one weight, 1/2 everywhere."""
    return Model(TestSpace.from_tests([["a", "b"], ["b", "c"], ["a", "c"]]))


def empty() -> Model:
    """A test space that carries no probability weight at all."""
    return Model(TestSpace.from_tests([["a", "b"], ["b", "c"], ["a", "c"], ["a", "d"], ["c", "e"], ["b", "d", "e"]]))


def chain() -> Model:
    """Two two-outcome tests sharing an outcome."""
    return Model(TestSpace.from_tests([["x", "y"], ["y", "z"]]))


FIXTURES: dict[str, Callable[[], Model]] = {
    "firefly": firefly,
    "square": square,
    "gbit": gbit,
    "pyramid": pyramid,
    "ds3": ds3,
    "classical3": classical3,
    "bit": bit,
    "unique": unique,
    "empty": empty,
    "chain": chain,
    "boxworld2": lambda: boxworld(2),
}


def fixture(name: str) -> Model:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise ParseError(f"unknown fixture {name!r}; known: {', '.join(sorted(FIXTURES))}") from None


__all__ = ["FIXTURES", "fixture", "pr_box"] + [k for k in FIXTURES if k != "boxworld2"]
