"""Exception hierarchy shared by every module of the package."""


class DiscretisationError(Exception):
    """Base class for all errors raised by loewner_c2d."""


class NumericFailure(DiscretisationError):
    """A factorisation or iterative kernel did not converge."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class SingularEquationError(NumericFailure):
    """A Lyapunov/Sylvester equation has no unique solution."""


class PoleHitError(NumericFailure):
    """A transfer function was evaluated at (or numerically on) a pole."""

    def __init__(self, message, point=None):
        super().__init__(message, {"point": point})
        self.point = point


class IrregularPencilError(NumericFailure):
    """The pencil zE - A is singular for every z."""


class NonSplittableError(NumericFailure):
    """A pole sits on (or too close to) the stability boundary."""

    def __init__(self, message, pole=None):
        super().__init__(message, {"pole": pole})
        self.pole = pole


class ConjugateInconsistencyError(NumericFailure):
    """Data that should yield a real realisation left a complex residue."""


class PolynomialPartError(NumericFailure):
    """A descriptor model has a singular E and cannot be put in standard form."""


class PartitionError(DiscretisationError, ValueError):
    """Interpolation data cannot be split into two equal halves."""


class CoincidentPointsError(DiscretisationError, ValueError):
    """Two interpolation points from different halves coincide."""


class NotStrictlyProperError(DiscretisationError, ValueError):
    """The operation requires a model with zero feedthrough."""


class UnsupportedCombinationError(DiscretisationError):
    """A method/model/signal combination that is not available."""
