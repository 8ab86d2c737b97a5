"""Exception hierarchy."""


class MinkowskiError(Exception):
    """Base class for library errors."""


class DimensionError(MinkowskiError, ValueError):
    pass


class SingularPointError(MinkowskiError, ValueError):
    """An operation was asked for a derivative where none exists (e.g. a norm at 0)."""


class DegenerateBodyError(MinkowskiError, ValueError):
    pass


class NotOnBoundaryError(MinkowskiError, ValueError):
    pass


class NotDifferentiableError(MinkowskiError, ValueError):
    pass


class ConvergenceError(MinkowskiError, RuntimeError):
    """An iterative solver stopped without certifying its result.

    ``best`` holds the best bound or iterate found and ``diagnostics`` any
    further detail the solver recorded.
    """

    def __init__(self, message, best=None, diagnostics=None):
        super().__init__(message)
        self.best = best
        self.diagnostics = diagnostics or {}


class MonotonicityError(MinkowskiError, ValueError):
    """Data is not cyclically monotone; ``cycle`` holds a positive-weight cycle."""

    def __init__(self, message, cycle=None, weight=None):
        super().__init__(message)
        self.cycle = cycle
        self.weight = weight
