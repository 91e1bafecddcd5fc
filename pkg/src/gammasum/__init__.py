"""Special functions, double-exponential quadrature and Monte Carlo checks for
series of upper incomplete Gamma integrals."""

from .exceptions import (
    ConvergenceError,
    DivergentError,
    DomainError,
    GammasumError,
    PoleError,
)
from .identities import (
    Convergence,
    Params,
    SeriesSum,
    VerificationReport,
    run_suite,
)
from .quadrature import QuadConfig, QuadResult
from .sampling import McEstimate, MixtureSpec, Stream
from .specfun import EvalResult, Order

__all__ = [
    "Convergence", "ConvergenceError", "DivergentError", "DomainError", "EvalResult",
    "GammasumError", "McEstimate", "MixtureSpec", "Order", "Params", "PoleError",
    "QuadConfig", "QuadResult", "SeriesSum", "Stream", "VerificationReport", "run_suite",
]
