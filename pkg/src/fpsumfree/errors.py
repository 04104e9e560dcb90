"""Exception types shared across the package."""


class UsageError(ValueError):
    """Raised when an operation is called outside its preconditions."""


class TheoremViolation(AssertionError):
    """Raised when a computation contradicts a theorem it instruments.

    The checks that raise this are all consequences of proven results, so
    seeing one means a bug in this package, not a counterexample.
    """
