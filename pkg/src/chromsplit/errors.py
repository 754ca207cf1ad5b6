"""Exception types shared by the engines."""

from __future__ import annotations


class IntegrityError(ArithmeticError):
    """A computed object violates an invariant it is required to satisfy."""


class UndeterminedError(LookupError):
    """The encoded data does not determine the requested answer."""


class AmbiguousError(UndeterminedError):
    """More than one rule applies and the engine refuses to choose."""
