"""Exception hierarchy for gplab."""

from typing import Any


class GplabError(Exception):
    """Base class for every error raised by gplab."""


class ConfigError(GplabError):
    """Invalid run configuration."""


class ParseError(GplabError):
    """A serialized document cannot be decoded."""


class PlError(GplabError):
    """Errors from the piecewise-linear core."""


class NotMonotoneError(PlError):
    """Graph points are not strictly increasing in both coordinates."""


class OutOfRangeError(PlError):
    """A coordinate leaves the unit interval."""


class InvalidBumpError(PlError):
    """Bump parameters are not nested as required."""


class SetExprError(GplabError):
    """Errors from the symbolic set calculus."""


class MalformedExprError(SetExprError):
    """A set expression violates its invariants on the inspected truncation."""


class GplError(GplabError):
    """Errors from generalized piecewise-linear maps."""


class NotPiecewiseLinearHereError(GplError):
    """An interval contains an accumulation point of nonlinear pieces."""


class FuelExhaustedError(GplError):
    """Too many hulls meet an interval."""


class UnboundGeneratorError(GplError):
    """A word mentions a generator missing from its environment."""


class NotRepresentableError(GplError):
    """A product or conjugate has no exact symbolic representation here."""


class GroupLabError(GplabError):
    """Errors from the word-length laboratory."""


class BudgetExceededError(GroupLabError):
    """A Cayley ball grew past its element budget."""

    def __init__(self, message: str, budget: int, radius: int) -> None:
        """Initialize the error.

        Args:
            message (str): The error message.
            budget (int): The element budget that was exceeded.
            radius (int): The radius being expanded.

        """
        super().__init__(message)
        self.budget = budget
        self.radius = radius


class SubadditivityViolationError(GroupLabError):
    """A length sequence is not subadditive."""


class GeneratorUnreachableError(GroupLabError):
    """A generator of one set is not reachable within the radius of another."""


class ConstructionError(GplabError):
    """Errors from the mechanical reconstructions."""


class IdentityFailedError(ConstructionError):
    """An exact identity did not hold."""

    def __init__(self, message: str, witnesses: Any = None) -> None:
        """Initialize the error.

        Args:
            message (str): The error message.
            witnesses (Any): The offending values.

        """
        super().__init__(message)
        self.witnesses = witnesses


class CertificateFailedError(ConstructionError):
    """Linear growth of a length function failed."""

    def __init__(self, message: str, k: int) -> None:
        """Initialize the error.

        Args:
            message (str): The error message.
            k (int): The first power violating linear growth.

        """
        super().__init__(message)
        self.k = k


class DisjointnessFailedError(ConstructionError):
    """Two intervals that must be disjoint intersect."""

    def __init__(self, message: str, m: int | None = None) -> None:
        """Initialize the error.

        Args:
            message (str): The error message.
            m (int | None): The offending index, if any.

        """
        super().__init__(message)
        self.m = m


class BoundExceededError(ConstructionError):
    """A word is longer than its proven bound."""

    def __init__(self, message: str, count: int, m: int) -> None:
        """Initialize the error.

        Args:
            message (str): The error message.
            count (int): The audited letter count.
            m (int): The index at which the bound failed.

        """
        super().__init__(message)
        self.count = count
        self.m = m
