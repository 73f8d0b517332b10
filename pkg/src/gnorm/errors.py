"""Exception types shared across the package."""


class GnormError(Exception):
    """Base class for all package errors."""


class ShapeError(GnormError):
    """Dimension or subsystem metadata mismatch."""


class DomainError(GnormError):
    """Input outside the mathematical domain of an operation (e.g. a matrix
    with a genuinely negative eigenvalue passed to a PSD-only routine)."""


class NumericalError(GnormError):
    """A dense linear-algebra kernel failed to converge."""


class ValidationError(GnormError):
    """Structured input failed validation (malformed JSON, non-member
    candidates, inconsistent priors and payoff tables, ...)."""


class EmptySectionError(GnormError):
    """A section turned out to contain no PSD element on its affine slice."""


class SolverError(GnormError):
    """The conic solver stopped without an optimality certificate.

    Carries the best solution found so that callers can inspect bounds.
    """

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution
