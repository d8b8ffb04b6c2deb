"""Exception types shared across the package."""


class TwoMatrixError(Exception):
    """Base class for all errors raised by this package."""


class InvalidSymbolError(TwoMatrixError, ValueError):
    """A symbol with d3 = 0 or non-finite coefficients."""


class BranchPointError(TwoMatrixError, ValueError):
    """Evaluation requested exactly at a branch point."""


class RegimeError(TwoMatrixError, ValueError):
    """A one-cut quantity was requested in the two-cut regime or vice versa."""


class AxisError(TwoMatrixError, ValueError):
    """A point is not on the axis carrying the requested support set."""


class SelectionError(TwoMatrixError, ValueError):
    """The root selection rule is undefined at the requested point."""


class PrecisionError(TwoMatrixError, RuntimeError):
    """A numerical procedure failed to reach its tolerance."""


class ResolutionError(PrecisionError):
    """A zero scan did not find the expected number of sign changes."""


class ConstraintError(TwoMatrixError, ValueError):
    """A measure violates a mass or upper-constraint requirement."""
