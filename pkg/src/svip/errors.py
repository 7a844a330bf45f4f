"""Exception hierarchy shared by every svip module.

Each error class carries a short ``prefix`` used by the CLI to build stable,
greppable diagnostics such as ``error: integrity: ...``.
"""


class SvipError(Exception):
    prefix = "svip"


class ParseError(SvipError):
    prefix = "parse"


class UnsupportedFormatError(SvipError):
    prefix = "format"


class DimensionError(SvipError):
    prefix = "dimension"


class TruncationError(SvipError):
    prefix = "truncated"

    def __init__(self, what, expected, actual):
        self.expected = expected
        self.actual = actual
        super().__init__(f"{what}: expected {expected} bytes, got {actual}")


class EmptyImageError(SvipError):
    prefix = "empty"


class KeyLengthError(SvipError):
    prefix = "key"


class ProtocolError(SvipError):
    prefix = "protocol"


class VersionError(ProtocolError):
    prefix = "version"


class IntegrityError(SvipError):
    prefix = "integrity"


class FrameTooLargeError(SvipError):
    prefix = "frame-too-large"


class TransportError(SvipError):
    prefix = "transport"

    def __init__(self, message, bytes_written=0):
        self.bytes_written = bytes_written
        super().__init__(f"{message} after {bytes_written} bytes written")


class EndOfStream(EOFError):
    """Raised by the receiver when the stream ends cleanly on a frame boundary."""
