"""Exception types shared across the package."""


class BlogrankError(Exception):
    """Base class for all package errors."""


class DatasetError(BlogrankError):
    """A dataset file or in-memory dataset violates its contract."""


class MalformedRecordError(DatasetError):
    """A record line could not be parsed.

    Carries the file path and 1-based line number of the offending line.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif path is not None:
            where += " "
        super().__init__(f"{where}{message}")


class DuplicateIdError(DatasetError):
    """An identifier (or unique URL) occurs more than once."""


class DanglingReferenceError(DatasetError):
    """A record references an id that does not exist (or is invalid)."""


class ConfigError(BlogrankError):
    """An algorithm or generator parameter is out of its allowed range."""


class ConvergenceError(BlogrankError):
    """Raised in strict mode when an iteration fails to converge."""
