"""Error taxonomy shared by every module.

Each exception exposes ``kind`` (the class name), which the command-line
front end reports verbatim.
"""

from __future__ import annotations


class StratError(Exception):
    """Base class for all domain errors raised by stratlab."""

    @property
    def kind(self) -> str:
        return type(self).__name__


class SizeMismatch(StratError):
    pass


class NotSubset(StratError):
    pass


class ParseError(StratError):
    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class AdmissibilityError(StratError):
    pass


class NotPureInFormula(StratError):
    pass


class MissingDomain(StratError):
    pass


class TypeMismatch(StratError):
    pass


class DivisionByZero(StratError, ZeroDivisionError):
    pass


class NotInLevel(StratError):
    pass


class Unlimited(StratError):
    """A shadow computation diverged while eliminating scale ``index``."""

    def __init__(self, index: int):
        super().__init__(f"unlimited at scale w{index}")
        self.index = index


class PoleAtPoint(StratError):
    pass


class ScaleExhausted(StratError):
    pass


class TooLarge(StratError):
    pass


class UnsupportedFormula(StratError):
    pass


class WindowTooLarge(StratError):
    pass


class NoQualifyingWindow(StratError):
    pass


# errors that the CLI maps to exit status 2 rather than 1
USAGE_ERRORS = (ParseError,)
