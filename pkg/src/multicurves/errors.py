"""Exception hierarchy shared by every module of the package."""


class MulticurveError(Exception):
    """Base class for all errors raised by this package."""


class ConditionError(MulticurveError, ValueError):
    """Construction parameters violate the admissibility conditions."""


class DomainError(MulticurveError, ValueError):
    """An input lies outside the domain of the operation (e.g. infinity fed to a polynomial)."""


class SingularInputError(MulticurveError, ZeroDivisionError):
    """Derivative or map evaluated at a pole."""


class GridError(MulticurveError, ValueError):
    """Grid sizes are incompatible (divisibility, power of two, minimum size)."""


class DegenerateCurveError(MulticurveError):
    """Curve samples self-intersect, fail to close, or give ambiguous jumping integers."""


class DegenerateCycleError(MulticurveError):
    """Periodic points cluster (parabolic or otherwise degenerate parameter)."""


class ContinuationError(MulticurveError):
    """Predictor-corrector continuation broke down."""

    def __init__(self, message, theta=None):
        super().__init__(message)
        self.theta = theta


class AmbiguousMonodromyError(MulticurveError):
    """Endpoint matching of a continuation is not a clean bijection."""


class BranchContinuityError(MulticurveError):
    """A grid-continuous logarithm jumped by more than the allowed amount."""


class InvarianceError(MulticurveError):
    """A constructed curve fails its invariance check under every tried convention."""


class LinearizationError(MulticurveError):
    """Birkhoff linearization could not certify the requested margin."""


class InconsistentClassificationError(MulticurveError):
    """Probing contradicts the multiplier classification (no tube radius accepted)."""
