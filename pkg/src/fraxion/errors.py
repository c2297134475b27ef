"""Exception types shared across the library."""


class FraxionError(Exception):
    """Base class for all library errors."""


class DomainError(FraxionError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class NonConvergence(FraxionError):
    """A series or asymptotic scheme could not certify the requested tolerance."""


class QuadratureFailure(FraxionError):
    """Adaptive quadrature could not certify the requested error bound."""


class SolverDivergence(FraxionError):
    """The Abel-Volterra stepping iteration failed to contract."""


class TailUnboundedError(FraxionError):
    """A tail model cannot certify convergence of an improper integral."""


class InversionUnstable(FraxionError):
    """Numerical Laplace inversion methods disagree beyond tolerance."""
