"""Exception types shared across the package.

Exit codes used by the command line driver:
    0  success
    2  validation error (bad corpus record, bad parameter)
    3  scorer transport error (remote scorer unreachable)
    4  internal invariant violation
"""


class SummrankError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ParameterError(SummrankError):
    """A caller-supplied argument is out of range or inconsistent."""

    exit_code = 2


class ValidationError(SummrankError):
    """An input record or file failed validation.

    The message names the offending record (document id, line number)
    whenever that information is known.
    """

    exit_code = 2


class EmptyDocumentError(ParameterError):
    """A degenerate document (no sentences) was given to an operation
    that requires at least one."""


class TransportError(SummrankError):
    """The remote scorer could not be reached after retrying.

    Attributes:
        attempts: how many connection attempts were made.
    """

    exit_code = 3

    def __init__(self, message: str, attempts: int = 1):
        super().__init__(message)
        self.attempts = attempts


class ProtocolError(SummrankError):
    """The remote scorer replied, but the reply violates the wire contract
    (non-200 status, malformed JSON, or score count mismatch)."""

    exit_code = 3


class InternalError(SummrankError):
    """An internal invariant was violated; indicates a bug, not bad input."""

    exit_code = 4
