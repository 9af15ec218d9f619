"""Exception types shared across the package.

The CLI maps these onto exit codes: validation errors (including parse
errors) exit 2, I/O errors exit 3, numerical check failures exit 4.
"""


class HaarError(Exception):
    """Base class for all package errors."""


class ValidationError(HaarError):
    """Input violates a documented precondition or invariant."""


class ParseError(ValidationError):
    """A file could not be parsed; message carries line/field position."""


class NumericalCheckError(HaarError):
    """A requested numerical cross-check exceeded its tolerance."""
