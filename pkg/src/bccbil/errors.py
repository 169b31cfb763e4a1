"""Exception types raised by bccbil."""


class BCCError(Exception):
    """Base class for all bccbil errors."""


class InvalidInputError(BCCError, ValueError):
    """Malformed graph, clustering, parameter or file record."""


class GuardError(BCCError):
    """A brute-force enumeration would exceed its size guard.

    ``estimate`` is the (possibly approximate) number of items that the
    refused enumeration would have produced.
    """

    def __init__(self, message, estimate, limit):
        super().__init__(message)
        self.estimate = estimate
        self.limit = limit


class SVDConvergenceError(BCCError):
    """Subspace iteration hit its iteration cap before converging."""

    def __init__(self, message, residual, iterations):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
