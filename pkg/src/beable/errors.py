"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class NumericError(ArithmeticError):
    """A numerical procedure failed to converge or hit a degenerate case."""


class SingularityError(NumericError):
    """Evaluation requested at a singular point (caustic, pole, zero wavevector)."""


class TruncationWarning(UserWarning):
    """A truncated Fock basis is too small for the requested state."""
