"""Shared exception types for smallbase."""


class SmallbaseError(Exception):
    """Base class for all smallbase errors."""


class NotPrime(SmallbaseError):
    pass


class SizeCapExceeded(SmallbaseError):
    pass


class DivisionByZero(SmallbaseError, ZeroDivisionError):
    pass


class NotADivisor(SmallbaseError):
    pass


class EmptyInput(SmallbaseError):
    pass


class DimensionMismatch(SmallbaseError):
    pass


class DegenerateRestriction(SmallbaseError):
    pass


class IncompatibleParameters(SmallbaseError):
    pass


class KindMismatch(SmallbaseError):
    pass


class NoneExists(SmallbaseError):
    pass


class OrbitNotClosed(SmallbaseError):
    """Internal consistency failure: a generator image left the enumerated domain."""


class DegreeCapExceeded(SmallbaseError):
    pass


class BudgetExceeded(SmallbaseError):
    """Search budget exhausted. Carries the best bounds found so far."""

    def __init__(self, message, lower=None, upper=None, witness=None, nodes=None):
        super().__init__(message)
        self.lower = lower
        self.upper = upper
        self.witness = witness
        self.nodes = nodes


class SearchBudgetExceeded(SmallbaseError):
    pass


class OrbitEmpty(SmallbaseError):
    pass


class ProofCaseInapplicable(SmallbaseError):
    pass


class GenerationFailed(SmallbaseError):
    pass


class IndependenceViolated(SmallbaseError):
    pass


class RadicalNotFound(SmallbaseError):
    pass


class FormulaInapplicable(SmallbaseError):
    pass


class MissingField(SmallbaseError):
    """An instance lacks a parameter a requested bound needs."""


class UsageError(SmallbaseError):
    """Bad CLI arguments or malformed input files."""
