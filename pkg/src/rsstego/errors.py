"""Exception hierarchy.

Every exception carries the process exit code the CLI reports for it, so the
exit-code table lives in one place:

====  =========================================================
code  meaning
====  =========================================================
0     success
1     unexpected internal error
2     command-line usage error
3     payload does not fit (InsufficientCapacity, PayloadTooLarge)
4     malformed bit-stream framing (FrameError, LengthMismatch)
5     Reed-Solomon decoding failed (DecodeFailure)
6     authentication failed (AuthenticationFailure)
7     file could not be read or written (StegoIOError)
8     image dimensions disagree (ShapeMismatch)
9     invalid parameters (InvalidParams and subclasses)
10    payload content is malformed (EnvelopeParseError and subclasses)
====  =========================================================
"""

from __future__ import annotations


class StegoError(Exception):
    exit_code = 1


class InvalidParams(StegoError, ValueError):
    exit_code = 9


class EmptyPassword(InvalidParams):
    pass


class QuantBitsOutOfRange(InvalidParams):
    pass


class InvalidQuery(InvalidParams):
    pass


class InsufficientCapacity(StegoError):
    exit_code = 3

    def __init__(self, required: int, available: int):
        self.required = required
        self.available = available
        super().__init__(
            f"payload needs {required} bits but the cover only holds {available} bits"
        )


class PayloadTooLarge(StegoError):
    exit_code = 3


class FrameError(StegoError):
    exit_code = 4


class LengthMismatch(FrameError):
    pass


class DecodeFailure(StegoError):
    exit_code = 5


class AuthenticationFailure(StegoError):
    exit_code = 6


class StegoIOError(StegoError, OSError):
    exit_code = 7


class ShapeMismatch(StegoError, ValueError):
    exit_code = 8


class EnvelopeParseError(StegoError, ValueError):
    exit_code = 10


class SymbolOutOfRange(EnvelopeParseError):
    pass


class Base64Error(EnvelopeParseError):
    pass


class InflateError(EnvelopeParseError):
    pass
