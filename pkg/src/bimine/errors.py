"""Exception types shared across the toolkit."""


class BimineError(Exception):
    """Base class for all toolkit errors."""


class DataError(BimineError):
    """Invalid input data: malformed files, bad values, contract violations.

    The CLI maps this to exit code 2.
    """


class ResourceLimitError(DataError):
    """An input exceeds a hard resource bound (e.g. similarity matrix size)."""
