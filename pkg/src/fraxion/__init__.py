"""fraxion: Mittag-Leffler renewal processes.

Special-function kernels with error estimates, closed-form densities and
renewal functions of the alpha-fractional renewal family, grid-based
fractional calculus with an Abel-Volterra solver, a numerical Laplace
transform harness, and seeded Monte Carlo samplers that cross-validate
the analytic formulas.
"""

from .errors import (
    DomainError,
    FraxionError,
    InversionUnstable,
    NonConvergence,
    QuadratureFailure,
    SolverDivergence,
    TailUnboundedError,
)
from .specfun import (
    EvalResult,
    MLParams,
    mainardi,
    mittag_leffler,
    mittag_leffler_deriv,
    recip_gamma,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "EvalResult",
    "FraxionError",
    "InversionUnstable",
    "MLParams",
    "NonConvergence",
    "QuadratureFailure",
    "SolverDivergence",
    "TailUnboundedError",
    "mainardi",
    "mittag_leffler",
    "mittag_leffler_deriv",
    "recip_gamma",
    "__version__",
]
