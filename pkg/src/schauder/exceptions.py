"""Exception types raised by the library."""


class ValidationError(ValueError):
    """Input does not satisfy an operation's preconditions."""


class UndefinedEstimateError(ValueError):
    """A roughness estimate is undefined because the coefficient mass is zero."""


class ConditioningError(ArithmeticError):
    """A dense system is singular to working precision."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class SingularMatrixError(ArithmeticError):
    """LU factorisation hit an exactly zero pivot."""


class ConvergenceError(RuntimeError):
    """Power iteration did not reach the requested tolerance."""

    def __init__(self, message, gap=None, iterations=None):
        super().__init__(message)
        self.gap = gap
        self.iterations = iterations
