"""Exception and warning types raised by the library."""


class STAError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(STAError, ValueError):
    pass


class ZeroVector(STAError, ValueError):
    pass


class AsymmetricInput(STAError, ValueError):
    pass


class UnsupportedDegree(STAError, ValueError):
    pass


class InvalidScale(STAError, ValueError):
    pass


class InvalidDegreeSplit(STAError, ValueError):
    pass


class ZeroPolynomial(STAError, ValueError):
    pass


class NotNormalized(STAError, ValueError):
    pass


class NonRealResult(STAError, ArithmeticError):
    pass


class DegenerateRetraction(STAError, ArithmeticError):
    """The Hankel matrix of ``P + Q`` vanished for block ``index``."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class DegenerateInitialPoint(STAError, ValueError):
    pass


class InsufficientDegree(STAError, ValueError):
    pass


class NearDegenerateWarning(UserWarning):
    """First and second singular values of a Hankel matrix coincide."""


class RankDeficientPencilWarning(UserWarning):
    """The truncated pencil SVD had (numerically) zero singular values."""


class SubgenericRankWarning(UserWarning):
    """Requested rank is not below the generic rank."""
