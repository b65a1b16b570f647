"""Exception hierarchy shared by all modules."""


class CollectiveNoiseError(Exception):
    """Base class for all package errors."""


class DomainError(CollectiveNoiseError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ShapeError(CollectiveNoiseError, ValueError):
    """Array shapes are inconsistent."""


class CapacityError(CollectiveNoiseError, ValueError):
    """A dense construction would exceed the configured size limit."""


class ContractError(CollectiveNoiseError, RuntimeError):
    """A structural postcondition (symmetry, positivity, ...) was violated."""


class NumericStabilityError(CollectiveNoiseError, RuntimeError):
    """A computation drifted beyond its numerical tolerance."""
