"""Double-exponential quadrature on semi-infinite intervals.

``(lower, lower + split]`` is handled by tanh-sinh and ``[lower + split, inf)``
by exp-sinh.  Each level halves the step in the transformed variable and
reuses the previous nodes; the error estimate is the change between the last
two levels plus an optional analytic tail bound.

Integrands are called with a 1-D ``numpy`` array of abscissae and must return
an array of the same shape.  Pass ``vectorized=False`` for scalar callables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import specfun
from .exceptions import ConvergenceError, DivergentError, DomainError

Integrand = Callable[[np.ndarray], np.ndarray]

_T_TANH_SINH = 6.0
_T_EXP_SINH = 6.5
_MIN_LEVELS = 3
_ROUNDOFF = 4 * specfun.EPS
_LOG_UNDERFLOW = -745.0


@dataclass(frozen=True)
class QuadConfig:
    target_rel_tol: float = 1e-10
    max_levels: int = 12
    split_point: float = 1.0
    target_abs_tol: float = 0.0

    def __post_init__(self):
        if not self.target_rel_tol > 0:
            raise DomainError("target_rel_tol must be > 0")
        if self.max_levels < 3:
            raise DomainError("max_levels must be >= 3")
        if not self.split_point > 0:
            raise DomainError("split_point must be > 0")
        if self.target_abs_tol < 0:
            raise DomainError("target_abs_tol must be >= 0")


DEFAULT_CONFIG = QuadConfig()


@dataclass(frozen=True)
class QuadResult:
    value: float
    est_abs_error: float
    evaluations: int
    levels: int = 0
    tail_bound: float = 0.0
    slow_tail: bool = False

    def __float__(self):
        return self.value


def _tanh_sinh(lo: float, width: float, t: np.ndarray):
    sh = np.sinh(t)
    u = np.exp(-math.pi * np.abs(sh))
    frac = u / (1.0 + u)
    # x measured from lo for t < 0 and from lo + width for t >= 0, without rounding to the ends
    x = np.where(t < 0, lo + width * frac, lo + width - width * frac)
    w = width * math.pi * np.cosh(t) * u / (1.0 + u) ** 2
    return x, w


def _exp_sinh(lo: float, t: np.ndarray):
    e = np.exp(0.5 * math.pi * np.sinh(t))
    return lo + e, 0.5 * math.pi * np.cosh(t) * e


def _level_nodes(level: int, t_max: float) -> np.ndarray:
    if level == 0:
        k = np.arange(-math.floor(t_max), math.floor(t_max) + 1)
        return k.astype(float)
    h = 2.0 ** -level
    # odd multiples of h inside [-t_max, t_max]
    m = np.arange(-math.floor(t_max / h), math.floor(t_max / h) + 1)
    m = m[m % 2 != 0]
    return m * h


def _evaluate(f: Integrand, x: np.ndarray, vectorized: bool) -> np.ndarray:
    with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
        if vectorized:
            y = np.asarray(f(x), dtype=float)
            y = np.broadcast_to(y, x.shape)
        else:
            y = np.fromiter((f(float(xi)) for xi in x), dtype=float, count=x.size)
    return y


def _integrate(f: Integrand, lower: float, cfg: QuadConfig, vectorized: bool,
               tail_bound: Optional[Callable[[float], float]] = None,
               finite_upper: Optional[float] = None) -> QuadResult:
    split = cfg.split_point if finite_upper is None else finite_upper - lower
    evaluations = 0
    sums = [0.0, 0.0]
    abs_sum = 0.0
    x_max = lower + split
    prev_total = None
    history = []
    for level in range(cfg.max_levels + 1):
        h = 2.0 ** -level
        new = [0.0, 0.0]
        t = _level_nodes(level, _T_TANH_SINH)
        x, w = _tanh_sinh(lower, split, t)
        y = _evaluate(f, x, vectorized)
        evaluations += x.size
        contrib = w * y
        if not np.all(np.isfinite(contrib)):
            bad = x[~np.isfinite(contrib)][0]
            raise ConvergenceError(f"integrand not finite at x={bad!r}")
        new[0] = float(np.sum(contrib))
        new_abs = float(np.sum(np.abs(contrib)))
        if finite_upper is None:
            t = _level_nodes(level, _T_EXP_SINH)
            x, w = _exp_sinh(lower + split, t)
            y = _evaluate(f, x, vectorized)
            evaluations += x.size
            contrib = w * y
            ok = np.isfinite(x)
            contrib = np.where(ok, contrib, 0.0)
            if not np.all(np.isfinite(contrib)):
                bad = x[~np.isfinite(contrib)][0]
                raise ConvergenceError(f"integrand not finite at x={bad!r}")
            x_max = max(x_max, float(np.max(x[ok])))
            new[1] = float(np.sum(contrib))
            new_abs += float(np.sum(np.abs(contrib)))
        if level == 0:
            sums = [new[0] * h, new[1] * h]
            abs_sum = new_abs * h
        else:
            sums = [0.5 * sums[0] + h * new[0], 0.5 * sums[1] + h * new[1]]
            abs_sum = 0.5 * abs_sum + h * new_abs
        total = sums[0] + sums[1]
        if prev_total is not None:
            err = abs(total - prev_total) + _ROUNDOFF * abs_sum
            history.append(err)
            tail = tail_bound(x_max) if tail_bound is not None else 0.0
            if level >= _MIN_LEVELS and err <= max(cfg.target_rel_tol * abs(total), cfg.target_abs_tol):
                return QuadResult(total, err + tail, evaluations, level, tail)
        prev_total = total
    tail = tail_bound(x_max) if tail_bound is not None else 0.0
    partial = QuadResult(total, history[-1] + tail, evaluations, cfg.max_levels, tail)
    raise ConvergenceError(
        f"quadrature did not reach rel tol {cfg.target_rel_tol:g} in {cfg.max_levels} levels "
        f"(estimate {total!r}, error {history[-1]:.3g})", partial)


def integrate_zero_to_inf(f: Integrand, cfg: QuadConfig = DEFAULT_CONFIG, *,
                          vectorized: bool = True,
                          tail_bound: Optional[Callable[[float], float]] = None) -> QuadResult:
    """Integrate ``f`` over ``(0, inf)``.

    Endpoint singularities at 0 are allowed; ``f`` must be finite at every
    interior node.  ``tail_bound(X)``, when given, must bound the integral
    over ``[X, inf)`` and is added to the error estimate.

    Raises
    ------
    ConvergenceError
        If the level-to-level change is still above tolerance after
        ``cfg.max_levels`` halvings.  The partial result is attached.
    """
    return _integrate(f, 0.0, cfg, vectorized, tail_bound)


def integrate_lower_to_inf(f: Integrand, lower: float, cfg: QuadConfig = DEFAULT_CONFIG, *,
                           vectorized: bool = True,
                           tail_bound: Optional[Callable[[float], float]] = None) -> QuadResult:
    """Integrate ``f`` over ``(lower, inf)`` for ``lower >= 0``."""
    if not lower >= 0:
        raise DomainError(f"lower must be >= 0, got {lower}")
    return _integrate(f, float(lower), cfg, vectorized, tail_bound)


def integrate_interval(f: Integrand, lo: float, hi: float, cfg: QuadConfig = DEFAULT_CONFIG, *,
                       vectorized: bool = True) -> QuadResult:
    """Tanh-sinh integral of ``f`` over ``(lo, hi)``; endpoint singularities allowed."""
    if not hi > lo:
        raise DomainError(f"need lo < hi, got ({lo}, {hi})")
    return _integrate(f, float(lo), cfg, vectorized, finite_upper=float(hi))


# ---------------------------------------------------------------------------
# Closed forms and the integrand families
# ---------------------------------------------------------------------------

def laplace_integral(A: float, B: float) -> float:
    """``int_0^inf exp(-A x^2 - B / x^2) dx = (1/2) sqrt(pi/A) exp(-2 sqrt(A B))``."""
    if not (A > 0 and B > 0):
        raise DomainError(f"laplace_integral needs A > 0 and B > 0, got ({A}, {B})")
    return 0.5 * math.sqrt(math.pi / A) * math.exp(-2.0 * math.sqrt(A * B))


def lhs_integrand_log(s: float, a: float, b: float, x: np.ndarray) -> np.ndarray:
    """Log of ``exp(a x - b/x) x**(s - 3/2) Gamma(1 - s, x)``; ``-inf`` where it underflows."""
    logx = np.log(x)
    # e^x Gamma(1-s, x) <= x^{-s} for s > 0, so this bounds the log from above
    bound = (a - 1.0) * x - b / x - 1.5 * logx
    out = np.full_like(x, -np.inf)
    live = bound > _LOG_UNDERFLOW
    if live.any():
        xl = x[live]
        lg, _ = specfun.log_scaled_upper_gamma(1.0 - s, xl)
        out[live] = (a - 1.0) * xl - b / xl + (s - 1.5) * logx[live] + lg
    return out


def _check_lhs_params(s: float, a: float, b: float) -> None:
    if not s > 0:
        raise DomainError(f"s must be > 0, got {s}")
    if not 0 < a <= 1:
        raise DomainError(f"a must lie in (0, 1], got {a}")
    if not b > 0:
        raise DomainError(f"b must be > 0, got {b}")


def lhs_integral(s: float, a: float, b: float, cfg: QuadConfig = DEFAULT_CONFIG) -> QuadResult:
    """``int_0^inf exp(a x - b/x) x**(s - 3/2) Gamma(1 - s, x) dx`` by direct quadrature.

    The integrand is evaluated in log space and is 0 where it underflows, in
    particular as ``x -> 0``.  For ``a = 1`` it decays only like
    ``x**(-3/2)``; the bound ``2 / sqrt(X)`` on the remainder past the last
    node ``X`` is added to the error estimate and ``slow_tail`` is set.
    """
    s, a, b = float(s), float(a), float(b)
    _check_lhs_params(s, a, b)

    def f(x):
        return np.exp(lhs_integrand_log(s, a, b, x))

    def tail(x_max):
        return 2.0 / math.sqrt(x_max) * math.exp((a - 1.0) * x_max)

    res = integrate_zero_to_inf(f, cfg, tail_bound=tail)
    if a == 1.0:
        res = QuadResult(res.value, res.est_abs_error, res.evaluations, res.levels,
                         res.tail_bound, slow_tail=True)
    return res


def power_exp_integral(s: float, a: float, b: float, cfg: QuadConfig = DEFAULT_CONFIG) -> QuadResult:
    """``int_{sqrt(1-a)}^inf (a + t^2)**(-s) exp(-2 sqrt(b) t) dt``."""
    s, a, b = float(s), float(a), float(b)
    if not s > 0 or not 0 < a <= 1 or not b > 0:
        raise DomainError(f"need s > 0, a in (0, 1], b > 0; got ({s}, {a}, {b})")
    rb = 2.0 * math.sqrt(b)

    def f(t):
        return np.exp(-s * np.log(a + t * t) - rb * t)

    return integrate_lower_to_inf(f, math.sqrt(1.0 - a), cfg)


def rational_exp_integral(s: float, b: float, cfg: QuadConfig = DEFAULT_CONFIG) -> QuadResult:
    """``int_0^inf (1 + t^2)**(-s) exp(-2 sqrt(b) t) dt``."""
    s, b = float(s), float(b)
    if not s > 0 or not b > 0:
        raise DomainError(f"need s > 0 and b > 0; got ({s}, {b})")
    rb = 2.0 * math.sqrt(b)

    def f(t):
        return np.exp(-s * np.log1p(t * t) - rb * t)

    return integrate_zero_to_inf(f, cfg)


def rhs_integral(a: float, b: float, c: float, cfg: QuadConfig = DEFAULT_CONFIG) -> QuadResult:
    """``int_{sqrt(1-a)}^inf exp(-2 sqrt(b) u) / (c u^2 + a c - 1) du``, no prefactor.

    Raises
    ------
    DivergentError
        For ``a = 1, c = 1``, where the integrand behaves like ``u**-2`` at 0.
    """
    a, b, c = float(a), float(b), float(c)
    if not 0 < a <= 1 or not b > 0:
        raise DomainError(f"need a in (0, 1] and b > 0; got ({a}, {b})")
    if c < 1.0 / a:
        raise DomainError(f"need c >= 1/a = {1.0 / a}; got c={c}")
    if a == 1.0 and c == 1.0:
        raise DivergentError("rhs integral diverges for a = 1, c = 1")
    rb = 2.0 * math.sqrt(b)
    shift = a * c - 1.0

    def f(u):
        return np.exp(-rb * u) / (c * u * u + shift)

    return integrate_lower_to_inf(f, math.sqrt(1.0 - a), cfg)


def bessel_k_representation(A: float, b: float, u: float) -> float:
    """``int_0^inf exp(-b/x - u x) x**A dx = 2 (b/u)**((A+1)/2) K_{A+1}(2 sqrt(b u))``.

    Returns the right-hand side, for non-integer ``A``.
    """
    A, b, u = float(A), float(b), float(u)
    if A == math.floor(A):
        raise DomainError(f"A must not be an integer, got {A}")
    if not (b > 0 and u > 0):
        raise DomainError(f"need b > 0 and u > 0; got ({b}, {u})")
    k = specfun.bessel_k(A + 1.0, 2.0 * math.sqrt(b * u)).value
    return 2.0 * (b / u) ** ((A + 1.0) / 2.0) * k
