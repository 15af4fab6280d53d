"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to meet its accuracy/convergence contract."""


class UnsupportedMeasureError(DomainError):
    """Requested an entanglement measure outside its defined regime."""


class BracketError(RuntimeError):
    """A root/threshold bracket does not contain a sign change."""


class UsageError(ValueError):
    """Invalid experiment configuration or command-line usage."""
