"""Exception hierarchy shared by every bjlab module."""


class BJLabError(Exception):
    """Base class for all bjlab errors."""


class DimensionError(BJLabError, ValueError):
    """A vector or function does not fit the space it is used with."""


class DomainError(BJLabError, ValueError):
    """An operation was called outside its mathematical domain."""


class UnsupportedError(BJLabError, ValueError):
    """The requested exponent or field is excluded for this operation."""


class ScenarioError(BJLabError, ValueError):
    """A scenario file could not be parsed or violates an invariant."""

    def __init__(self, message, *, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
