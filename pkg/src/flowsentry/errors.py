"""Exception taxonomy shared across the package."""


class FlowSentryError(Exception):
    """Base class for all package errors."""


class ContractError(FlowSentryError, ValueError):
    """An input violated a documented call contract (unsorted trace, window
    mismatch, outcome that never alerted, ...)."""


class InvalidParameterError(FlowSentryError, ValueError):
    """A scalar parameter is out of range (tolerance factor < 1, delta <= 0)."""


class InsufficientDataError(FlowSentryError, ValueError):
    """Not enough observations to train a baseline."""


class ConfigError(FlowSentryError, ValueError):
    """A scenario configuration failed validation; the message lists every
    violated field."""


class FileFormatError(FlowSentryError, ValueError):
    """A file could not be parsed. Carries file, line, and field context."""

    def __init__(self, path, line, field, message):
        self.path = str(path)
        self.line = line
        self.field = field
        super().__init__(f"{self.path}:{line}: field {field!r}: {message}")
