"""Exception hierarchy for dyadnorm.

Every error is a ``ValueError`` so callers that only guard against bad input
keep working; the CLI maps the concrete classes to exit codes.
"""

from __future__ import annotations

from typing import Any


class DyadnormError(ValueError):
    """Base class for all dyadnorm errors."""


class ParameterError(DyadnormError):
    """A parameter lies outside the admissible domain of an operation."""


class RangeError(DyadnormError):
    """An integer cube index does not fit the supported magnitude."""


class AccuracyError(DyadnormError):
    """A quadrature could not reach the requested tolerance."""


class BudgetError(DyadnormError):
    """An operation would exceed its node or cube budget."""


class ResolutionError(DyadnormError):
    """The Garsia-Rodemich area table would exceed its budget."""

    def __init__(self, message: str, suggested_level: int | None = None) -> None:
        super().__init__(message)
        self.suggested_level = suggested_level


class PlacementError(DyadnormError):
    """A separated placement of intervals is infeasible."""


class TruncationError(DyadnormError):
    """A result is only available over a truncated window."""


class VerificationError(DyadnormError):
    """An internal invariant check failed; carries the counterexample."""

    def __init__(self, message: str, counterexample: dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.counterexample = counterexample or {}
