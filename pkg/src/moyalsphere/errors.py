"""Exception types raised by the library."""


class MoyalError(Exception):
    """Base class for all library errors."""


class ParameterWindowError(MoyalError, ValueError):
    """Noncommutative parameter outside ``0 < theta_eff < A**2 / 2``."""


class ParameterMismatch(MoyalError, ValueError):
    """Operands built on different ``theta`` / ``half_dim``."""


class ZeroCoefficient(MoyalError, ZeroDivisionError):
    """A diagonal series has a vanishing level, so its star inverse does not exist."""

    def __init__(self, level):
        self.level = level
        super().__init__(f"coefficient vanishes at level {level}")


class Divergent(MoyalError, ArithmeticError):
    """Series fails the tail decay test."""


class ToleranceNotReached(MoyalError, ArithmeticError):
    """Truncation or iteration cap exhausted before the tail bound met ``tol``."""


class Singular(MoyalError, ArithmeticError):
    """Truncated matrix has no usable inverse."""


class PoleError(MoyalError, ZeroDivisionError):
    """Evaluation hit a pole of a truncated (order theta**2) expansion."""


class StepFailure(MoyalError, RuntimeError):
    """ODE integrator did not reach the end of the interval."""


class ResidualTooLarge(MoyalError, ArithmeticError):
    """Numerical solution fails its a-posteriori residual check."""
