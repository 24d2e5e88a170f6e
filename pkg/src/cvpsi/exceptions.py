"""Exception types raised across the package."""


class InvalidArgumentError(ValueError):
    """An argument is outside the domain an operation accepts."""


class UnsupportedOrderError(ValueError):
    """A derivative order beyond what the closed forms implement."""


class DegenerateSampleError(ValueError):
    """The sample cannot support the requested estimator (e.g. all values tied)."""


class NumericFailureError(RuntimeError):
    """A numerical search did not converge or bracket its optimum.

    ``diagnostics`` carries whatever the failing routine could dump
    (typically the evaluated criterion curve).
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics
