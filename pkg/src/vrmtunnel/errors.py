"""Exception hierarchy shared by the solver, oracles and harness."""


class TunnelingError(Exception):
    """Base class for every error raised by this package."""


class DomainError(TunnelingError, ValueError):
    """Argument outside the domain where a formula or profile is defined."""


class PreconditionError(TunnelingError, ValueError):
    """Physical setup violates a required assumption (e.g. closed channel)."""


class QuadratureError(TunnelingError, ArithmeticError):
    """Adaptive quadrature failed to reach its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ResonanceError(TunnelingError, ArithmeticError):
    """The boundary-augmented matrix is (numerically) singular for this lambda(b)."""

    def __init__(self, message, lambda_b=None, condition=None):
        super().__init__(message)
        self.lambda_b = lambda_b
        self.condition = condition


class DegenerateBoundaryError(TunnelingError, ArithmeticError):
    """Inner solution vanishes at a boundary, so its log-derivative is undefined."""


class DependentSolutionsError(TunnelingError, ArithmeticError):
    """Two inner solutions are linearly dependent; pick a different lambda pair."""


class AccuracyError(TunnelingError, ArithmeticError):
    """Reference integration could not certify the requested tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class ConfigError(TunnelingError, ValueError):
    """Malformed or invalid run configuration; ``field`` names the offending key."""

    def __init__(self, message, field=None, line=None):
        super().__init__(message)
        self.field = field
        self.line = line
