"""Exception types shared across the package."""


class MTDistError(Exception):
    """Base class for all package-specific errors."""


class ParseError(MTDistError):
    """A file could not be parsed. Carries the path and 1-based line number."""

    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


class InvalidTreeError(MTDistError):
    """An operation received a tree that fails merge-tree validation."""


class PreconditionError(MTDistError):
    """An operation's documented precondition was violated."""


class SizeLimitError(MTDistError):
    """An enumeration-only operation was asked to run beyond its size cap."""
