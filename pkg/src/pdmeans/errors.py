"""Exception hierarchy for pdmeans.

All errors raised by the library derive from :class:`PdmeansError`, so callers
can catch one base class. Validation errors carry enough context (matrix
index, offending value) to be actionable from the command line.
"""


class PdmeansError(Exception):
    """Base class for all pdmeans errors."""


class ValidationError(PdmeansError):
    """Base class for input-validation failures."""


class NotSymmetric(ValidationError):
    """Matrix is asymmetric beyond the configured tolerance."""


class NotPositiveDefinite(ValidationError):
    """Matrix has an eigenvalue at or below the SPD threshold."""


class NonFinite(ValidationError):
    """Matrix contains a NaN or infinite entry."""


class DimensionMismatch(ValidationError):
    """Operands have incompatible dimensions."""


class ParameterOutOfRange(ValidationError):
    """A scalar parameter lies outside its documented domain."""


class InvalidNormParameter(ValidationError):
    """Norm parameter out of range (Schatten p < 1, Ky Fan k outside 1..d)."""


class ZeroOrder(ValidationError):
    """Power mean requested at t = 0; the order-0 limit is the Karcher mean."""


class NotUnital(ValidationError):
    """Candidate positive linear map does not send I to I."""


class NotIsometry(ValidationError):
    """Compression columns fail V^T V = I beyond tolerance."""


class BadPartition(ValidationError):
    """Pinching blocks do not partition the index set 0..d-1."""


class NoConvergence(PdmeansError):
    """An iterative solver exhausted its iteration budget.

    Carries the last residual so callers can decide whether the partial
    answer is usable.
    """

    def __init__(self, msg, iterations=None, residual=None):
        super().__init__(msg)
        self.iterations = iterations
        self.residual = residual


class UnknownCheck(PdmeansError):
    """Requested check_id is not registered; message lists valid ids."""
