from __future__ import annotations

from typing import Any


class RealizerError(Exception):
    """Base class for every error raised by the realizer package."""


class PreconditionError(RealizerError, ValueError):
    """An operation was called outside its domain."""


class NotNiceError(PreconditionError):
    """The pair violates the realizability conditions."""

    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report


class InstanceFormatError(RealizerError, ValueError):
    """A file could not be parsed into an instance, point set or matrix."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class ConstructionError(RealizerError, RuntimeError):
    """A construction that is guaranteed to succeed did not."""


class ShrinkBudgetError(ConstructionError):
    """A shrink or halving loop ran out of attempts before its certificate held."""
