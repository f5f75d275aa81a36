"""Exception types shared by both kernel backends.

These live outside the kernel module so that the compiled and the
interpreted kernel raise the *same* classes and callers can catch them
without knowing which backend is active.
"""


class QddError(Exception):
    """Base class for all package errors."""


class ContractViolationError(QddError):
    """An operation was called outside its contract (bad range, arity,
    unbalanced ref-counting, non-finite weight, ...)."""


class CacheExhaustedError(ContractViolationError):
    """The fixed-size complex-value cache ran out of slots.

    The cache is sized at construction time; running out means an
    operation holds more intermediate values than the package was
    configured for, which is a bug rather than a capacity tuning knob.
    """


class CircuitSyntaxError(QddError):
    """A circuit file failed to parse.  ``line`` is 1-based."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
