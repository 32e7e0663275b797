"""Exception hierarchy.

Every error raised for bad input derives from :class:`GPTError`; the CLI maps
those to exit status 2 and anything else to exit status 1.
"""

from __future__ import annotations


class GPTError(ValueError):
    """Base class for validation and domain errors."""


class ParseError(GPTError):
    pass


class InvalidTestSpace(GPTError):
    pass


class IrredundanceError(InvalidTestSpace):
    def __init__(self, smaller, larger):
        self.smaller = smaller
        self.larger = larger
        super().__init__(f"test {sorted(smaller)} is a proper subset of test {sorted(larger)}")


class UnknownOutcome(GPTError):
    pass


class NotAWeight(GPTError):
    pass


class NotAnEvent(GPTError):
    pass


class BudgetExceeded(GPTError):
    pass


class OwnerMismatch(GPTError):
    pass


class DimensionMismatch(GPTError):
    pass


class NotInPolytope(GPTError):
    pass


class EmptyModel(GPTError):
    pass


class NotAMorphism(GPTError):
    pass


class NotAlgebraic(GPTError):
    pass


class NotPairwiseOrthogonal(GPTError):
    pass


class EmptyStateSpace(GPTError):
    pass


class NotInSpan(GPTError):
    pass


class NotAState(GPTError):
    pass


class MissingTransition(GPTError):
    pass


class NotPerspective(GPTError):
    pass


class NotNonsignaling(GPTError):
    pass


class ZeroMarginal(GPTError):
    pass


class NotAffine(GPTError):
    pass
