"""Exception types raised across the package."""


class JJGatesError(Exception):
    """Base class for all package errors."""


class NonHermitianError(JJGatesError, ValueError):
    pass


class DimensionError(JJGatesError, ValueError):
    pass


class ParameterError(JJGatesError, ValueError):
    """Physical parameters outside the model's domain (e.g. E_J = 0)."""


class DegenerateParametersError(ParameterError):
    """Diagonalisation formulas are singular (pi*J = 0 or a zero frequency)."""


class DesignError(JJGatesError):
    """No certified design could be produced."""


class SequenceError(JJGatesError, ValueError):
    pass


class PreconditionError(JJGatesError, ValueError):
    pass


class NumericalDegradationError(JJGatesError, ArithmeticError):
    pass
