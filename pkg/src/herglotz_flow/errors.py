"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the domain of a map (e.g. Im z <= 0)."""


class PreconditionError(ValueError):
    """A documented precondition of an operation does not hold."""


class ConvergenceError(RuntimeError):
    """An epsilon- or y-limit did not settle."""


class QuadratureError(RuntimeError):
    """A quadrature estimate did not stabilise under refinement."""


class StepFailure(RuntimeError):
    """Argument tracking could not tame an increment above the minimum step."""


class TailFitError(RuntimeError):
    """Fitted decay exponent of a truncated t-integral deviates from the model."""
