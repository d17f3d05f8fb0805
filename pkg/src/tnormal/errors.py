"""Exception types shared across modules."""

from __future__ import annotations

from fractions import Fraction


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed the configured ceiling.

    ``bound`` carries a certified upper bound on the measure of whatever was
    not built, when one is available.
    """

    def __init__(self, message: str, bound: Fraction | None = None):
        super().__init__(message)
        self.bound = bound


class InsufficientIterations(ValueError):
    """Not enough decision-tree steps to fix the requested digits."""

    def __init__(self, message: str, required_step: int):
        super().__init__(message)
        self.required_step = required_step


class CertificateError(ValueError):
    """A measure certificate does not hold."""


class Unknown:
    """Answer returned when a refinement budget runs out before deciding."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __bool__(self) -> bool:
        return False

    def __repr__(self) -> str:
        return "Unknown"


UNKNOWN = Unknown()
