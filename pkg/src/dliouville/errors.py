"""Exception types raised across the package."""


class DomainError(ValueError):
    """Argument outside the region where an operation is defined."""


class ModeError(ValueError):
    """Evaluation strategy not available for this coupling."""


class PoleError(ValueError):
    """Argument on (or numerically too close to) a pole."""


class SectorError(ValueError):
    """Direction lies on a boundary between asymptotic sectors."""


class ConvergenceError(RuntimeError):
    """Quadrature or series failed to reach the requested tolerance."""


class AdmissibilityError(ValueError):
    """Sample point violates the inequalities required by an identity.

    ``violated`` names the failing inequality.
    """

    def __init__(self, message, violated=None):
        super().__init__(message)
        self.violated = violated


class PositivityError(ArithmeticError):
    """Lattice field left the positive reals (overflow or underflow)."""


class ConfigurationError(ValueError):
    """Combinatorial move not applicable to the current triangulation."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position
