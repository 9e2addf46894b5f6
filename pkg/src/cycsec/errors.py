"""Exception types raised by the separation engine."""


class CycsecError(Exception):
    """Base class for all package errors."""


class InputError(CycsecError, ValueError):
    """A fractional point is structurally malformed or violates a precondition."""


class DomainError(CycsecError, ValueError):
    """An argument lies outside the domain of an operation (empty cut, bad endpoints...)."""


class ParseError(CycsecError, ValueError):
    """An instance file could not be parsed."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class ConfigError(CycsecError, ValueError):
    """Invalid benchmark configuration."""
