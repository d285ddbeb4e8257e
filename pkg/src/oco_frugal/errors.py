"""Exception types shared across the package."""


class DomainError(ValueError):
    """A point lies outside the problem domain [0, 1]."""


class ParameterError(ValueError):
    """A constructor or formula received parameters outside its valid range."""


class NumericError(ArithmeticError):
    """Non-finite input or output in a numerical routine."""


class FormulaInvalidError(ParameterError):
    """A closed-form expression has no real, positive value for these inputs."""


class AssumptionViolation(ValueError):
    """An input sequence fails the smoothness/Lipschitz/zero-minimum assumptions.

    The offending report is attached as ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NoInformation(LookupError):
    """No observation exists yet (stale setting at t = 1)."""
