"""Exception types shared across the package."""

from __future__ import annotations


class MotintError(Exception):
    """Base class for all engine errors."""


class SignatureMismatch(MotintError):
    pass


class NotIntegrable(MotintError):
    """A summation or integral diverges for some specialization q > 1.

    ``witness`` names the recession direction (variable -> step) along which
    the exponent of L is non-negative.
    """

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class UnsupportedPhase(MotintError):
    pass


class CenterCoincident(MotintError):
    def __init__(self, var: str, term_index: int | None = None):
        super().__init__(f"point coincides with a center of {var!r} (term {term_index})")
        self.var = var
        self.term_index = term_index


class BadPrime(MotintError):
    def __init__(self, p: int, witness=None):
        super().__init__(f"p={p} is excluded (witness constant: {witness})")
        self.p = p
        self.witness = witness


class PrecisionExhausted(MotintError):
    pass


class TailNotConvergent(MotintError):
    pass


class ParseError(MotintError):
    def __init__(self, message: str, line: int = 0, column: int = 0, expected: str = ""):
        super().__init__(f"{line}:{column}: {message}" + (f" (expected {expected})" if expected else ""))
        self.line = line
        self.column = column
        self.expected = expected
