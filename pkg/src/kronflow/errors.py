"""Exception types shared across the package.

Two failure families matter to callers: inputs that violate a schema or a
declared precondition (``ValidationError``, CLI exit 1) and inputs that are
well-formed but fall outside the finitely-describable class the library
handles (``UnsupportedStructureError``, CLI exit 2).
"""


class KronError(Exception):
    """Base class for all library errors."""


class ValidationError(KronError):
    """Schema violation, broken precondition, or domain error.

    The message names the offending field or value.
    """


class UnsupportedStructureError(KronError):
    """Input is valid but outside the supported structural class."""
