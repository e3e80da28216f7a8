"""Exception hierarchy shared by every module."""


class TsmrError(Exception):
    """Base class for all library errors."""


class ParseError(TsmrError, ValueError):
    """Malformed instance text; carries the source name and line number."""

    def __init__(self, message, source="<string>", line=None):
        self.message = message
        self.source = source
        self.line = line
        where = source if line is None else f"{source}:{line}"
        super().__init__(f"{where}: {message}")


class PreconditionError(TsmrError, ValueError):
    """An operation was called on input outside its contract."""


class CapExceeded(TsmrError):
    """An exhaustive search would exceed its configured size cap."""

    def __init__(self, message, size=None, cap=None):
        self.size = size
        self.cap = cap
        super().__init__(message)
