"""Exact-arithmetic toolkit for finite generalized probabilistic theories."""

from gptkit.errors import GPTError
from gptkit.testspace import Event, Model, ProbabilityWeight, TestSpace, load_model

__all__ = [
    "Event",
    "GPTError",
    "Model",
    "ProbabilityWeight",
    "TestSpace",
    "load_model",
]

__version__ = "0.1.0"
