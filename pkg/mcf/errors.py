"""Exception types raised across the package; the CLI maps them to exit codes."""


class McfError(Exception):
    """Base class for every error raised by this package."""


class InvalidProblemError(McfError, ValueError):
    """A ratio problem violates its positivity precondition."""


class DimensionMismatchError(McfError, ValueError):
    pass


class StateError(McfError, RuntimeError):
    """A classifier was used before it was initialised, or its state degenerated."""


class DataError(McfError, ValueError):
    """Dataset, stream, or margin precondition failure."""


class IdxFormatError(DataError):
    """Malformed IDX container. ``offset`` is the byte position of the problem."""

    def __init__(self, message, path=None, offset=None):
        self.path = path
        self.offset = offset
        where = []
        if path is not None:
            where.append(str(path))
        if offset is not None:
            where.append(f"offset {offset}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class GeneratorParameterError(McfError, ValueError):
    pass
