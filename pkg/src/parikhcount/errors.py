"""Exception hierarchy shared by every engine module."""


class ParikhError(Exception):
    """Base class for all errors raised by this package."""


class InputError(ParikhError, ValueError):
    """Malformed input: bad letter, unknown node, syntax error, ..."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)


class StructuralError(ParikhError, ValueError):
    """A structural precondition does not hold (e.g. graph is not Eulerian)."""


class SizeGuardError(ParikhError):
    """A desk-scale oracle was asked for more than its configured cap."""


class UnboundedError(ParikhError):
    """The requested quantity does not exist because the cost support is unbounded."""


class ConsistencyError(ParikhError, AssertionError):
    """Two routes that must agree did not, or an exact division left a remainder."""
