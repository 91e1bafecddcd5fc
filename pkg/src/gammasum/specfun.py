"""Real-argument special functions.

Scalar evaluators for the Gamma family, the upper incomplete Gamma function
at arbitrary real order, the generalized exponential integral, the sine and
cosine integrals, and power-series evaluators for Bessel J, Struve H and the
modified Bessel functions I and K, together with the order-derivatives of J
and H at half-integer orders.

Functions whose accuracy depends on a truncation return an :class:`EvalResult`
carrying an error estimate.  The series evaluators accept a keyword-only
``log_scale`` argument: the returned value (and its error) is multiplied by
``exp(-log_scale)`` term by term, so that products with very large or very
small prefactors can be formed without overflow.

The array helpers ``log_scaled_upper_gamma`` and ``upper_gamma_array`` are
vectorized over ``x`` and are what the quadrature integrands call.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Tuple, Union

import numpy as np

from .exceptions import ConvergenceError, DomainError, PoleError

EULER_GAMMA = 0.57721566490153286061
EPS = 2.220446049250313e-16
FPMIN = 1e-300

POLE_GUARD = 1e-12
MAX_SERIES_TERMS = 500
SERIES_REL_STOP = 1e-17
SERIES_ABS_FLOOR = 1e-300
SICI_SERIES_MAX = 4.0

_MAX_CF_ITER = 5000
_LOG_OVERFLOW = 709.0
_LOG_UNDERFLOW = -745.0


@dataclass(frozen=True)
class EvalResult:
    value: float
    est_abs_error: float

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class Order:
    """Order of a Bessel or Struve function.

    Use :meth:`half` to build the half-integer orders ``n - 1/2`` and
    ``1/2 - n`` exactly.
    """

    alpha: float
    half_integer: Optional[int] = None

    @classmethod
    def half(cls, n: int, negative: bool = False) -> "Order":
        if n < 1:
            raise DomainError(f"half-integer tag needs n >= 1, got {n}")
        alpha = 0.5 - n if negative else n - 0.5
        return cls(alpha, int(n))

    def __float__(self):
        return float(self.alpha)


OrderLike = Union[Order, float, int]


# ---------------------------------------------------------------------------
# Gamma family
# ---------------------------------------------------------------------------

def _sinpi(x: float) -> float:
    n = round(x)
    s = math.sin(math.pi * (x - n))
    return -s if n % 2 else s


def _cospi(x: float) -> float:
    n = round(x)
    c = math.cos(math.pi * (x - n))
    return -c if n % 2 else c


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def _check_pole(x: float) -> None:
    if x <= 0 and abs(x - round(x)) < POLE_GUARD:
        raise PoleError(f"Gamma has a pole at {round(x)}; got x={x!r}")


def gamma(x: float) -> float:
    """Gamma function.

    Positive arguments use ``math.gamma``; negative non-integers use the
    reflection formula ``Gamma(x) = pi / (sin(pi x) Gamma(1 - x))``.
    """
    x = float(x)
    _check_pole(x)
    if x > 0:
        if x > 171.6:
            return math.inf
        return math.gamma(x)
    return math.pi / (_sinpi(x) * math.gamma(1.0 - x))


def _lgamma_sign(x: float) -> Tuple[float, float]:
    """Return ``(log|Gamma(x)|, sign(Gamma(x)))`` with no pole guard.

    Exact poles must be filtered by the caller.
    """
    if x > 0:
        return math.lgamma(x), 1.0
    s = _sinpi(x)
    return math.log(math.pi) - math.log(abs(s)) - math.lgamma(1.0 - x), math.copysign(1.0, s)


def lgamma(x: float) -> float:
    """Logarithm of ``|Gamma(x)|``."""
    x = float(x)
    _check_pole(x)
    return _lgamma_sign(x)[0]


def rgamma(x: float) -> float:
    """Reciprocal Gamma function, entire; exactly zero at 0, -1, -2, ..."""
    x = float(x)
    if x > 0:
        return 1.0 / math.gamma(x) if x < 170.0 else math.exp(-math.lgamma(x))
    if _is_nonpositive_integer(x):
        return 0.0
    g = 1.0 - x
    big = math.gamma(g) if g < 170.0 else math.exp(math.lgamma(g))
    return _sinpi(x) * big / math.pi


def digamma(x: float) -> float:
    """Digamma function ``psi(x) = Gamma'(x) / Gamma(x)``."""
    x = float(x)
    _check_pole(x)
    if x <= 0:
        return digamma(1.0 - x) - math.pi * _cospi(x) / _sinpi(x)
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    x2 = 1.0 / (x * x)
    tail = x2 * (1 / 12 - x2 * (1 / 120 - x2 * (1 / 252 - x2 * (
        1 / 240 - x2 * (1 / 132 - x2 * (691 / 32760 - x2 / 12))))))
    return acc + math.log(x) - 0.5 / x - tail


def recip_gamma_deriv_at_nonpositive(j: int) -> float:
    """``d/dz [1/Gamma(z)]`` at ``z = -j``, which equals ``(-1)**j * j!``."""
    if j < 0 or int(j) != j:
        raise DomainError(f"j must be a nonnegative integer, got {j!r}")
    j = int(j)
    return float((-1) ** j * math.factorial(j))


def _zeta_int(k: int) -> float:
    # Euler-Maclaurin with N = 10; remainder is far below double precision.
    n_cut = 10
    head = sum(m ** -k for m in range(1, n_cut))
    tail = n_cut ** (1 - k) / (k - 1) + 0.5 * n_cut ** -k
    bern = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66)
    rising = k
    fact = 2.0
    for j, b2j in enumerate(bern, start=1):
        tail += b2j / fact * rising * n_cut ** (-k - 2 * j + 1)
        rising *= (k + 2 * j - 1) * (k + 2 * j)
        fact *= (2 * j + 1) * (2 * j + 2)
    return head + tail


_ZETA = {k: _zeta_int(k) for k in range(2, 40)}


def _lgamma1p(p: float) -> float:
    """``log Gamma(1 + p)`` accurate for small ``|p|``."""
    if abs(p) >= 0.2:
        return math.lgamma(1.0 + p)
    total = -EULER_GAMMA * p
    pk = -p
    for k in range(2, 40):
        pk *= -p
        term = _ZETA[k] * pk / k
        total += term
        if abs(term) < EPS * abs(total):
            break
    return total


def _gam1(p: float) -> float:
    """``Gamma(p) - 1/p = (Gamma(1+p) - 1) / p`` without cancellation."""
    if p == 0.0:
        return -EULER_GAMMA
    if abs(p) < 0.2:
        return math.expm1(_lgamma1p(p)) / p
    return (math.gamma(1.0 + p) - 1.0) / p


# ---------------------------------------------------------------------------
# Upper incomplete Gamma and E_n (vectorized cores)
# ---------------------------------------------------------------------------

def _lentz_upper_gamma(p: float, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Continued fraction h with ``Gamma(p, x) = exp(-x) x**p h``."""
    b = x + 1.0 - p
    c = np.full_like(x, 1.0 / FPMIN)
    d = 1.0 / b
    h = d.copy()
    delta = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    for i in range(1, _MAX_CF_ITER):
        an = -i * (i - p)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < FPMIN, FPMIN, d)
        c = b + an / c
        c = np.where(np.abs(c) < FPMIN, FPMIN, c)
        d = 1.0 / d
        delta = c * d
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) >= EPS
        if not active.any():
            return h, i * EPS * 2.0 + np.abs(delta - 1.0)
    raise ConvergenceError(f"incomplete Gamma continued fraction failed (p={p})")


def _lower_series_ratio(p: float, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Regularized lower ``P(p, x)`` by its power series (``p > 0``)."""
    ap = p
    term = np.full_like(x, 1.0 / p)
    total = term.copy()
    for i in range(1, _MAX_CF_ITER):
        ap += 1.0
        term = term * x / ap
        total = total + term
        if np.all(np.abs(term) < np.abs(total) * EPS):
            logp = -x + p * np.log(x) - math.lgamma(p) + np.log(total)
            return np.exp(logp), np.full_like(x, (i + 2) * EPS)
    raise ConvergenceError(f"incomplete Gamma series failed (p={p})")


def _small_x_upper_gamma(p0: float, x: np.ndarray) -> np.ndarray:
    """``Gamma(p0, x)`` for ``0 < p0 < 1`` and ``x < 1``, cancellation-free."""
    logx = np.log(x)
    xp = np.exp(p0 * logx)
    # sum_{k>=1} (-x)^k / (k! (p0 + k))
    fact = np.ones_like(x)
    tail = np.zeros_like(x)
    for k in range(1, 200):
        fact = fact * (-x) / k
        term = fact / (p0 + k)
        tail = tail + term
        if np.all(np.abs(term) < EPS * np.abs(tail) + 1e-300):
            break
    return _gam1(p0) - np.expm1(p0 * logx) / p0 - xp * tail


def _log_scaled_expn(n: int, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """``log(exp(x) E_n(x))`` and its relative error, for ``n >= 1``, ``x > 0``."""
    out = np.empty_like(x)
    rel = np.empty_like(x)
    big = x > 1.0
    if big.any():
        xb = x[big]
        b = xb + n
        c = np.full_like(xb, 1.0 / FPMIN)
        d = 1.0 / b
        h = d.copy()
        active = np.ones(xb.shape, dtype=bool)
        for i in range(1, _MAX_CF_ITER):
            an = -i * (n - 1 + i)
            b = b + 2.0
            d = 1.0 / (an * d + b)
            c = b + an / c
            delta = c * d
            h = np.where(active, h * delta, h)
            active &= np.abs(delta - 1.0) >= EPS
            if not active.any():
                break
        else:
            raise ConvergenceError(f"E_{n} continued fraction failed")
        out[big] = np.log(h)
        rel[big] = (i + 2) * EPS
    small = ~big
    if small.any():
        xs = x[small]
        logx = np.log(xs)
        if n == 1:
            total = -logx - EULER_GAMMA
        else:
            total = np.full_like(xs, 1.0 / (n - 1))
        abs_total = np.abs(total)
        fact = np.ones_like(xs)
        psi_n = -EULER_GAMMA + sum(1.0 / k for k in range(1, n))
        for i in range(1, _MAX_CF_ITER):
            fact = fact * (-xs) / i
            if i != n - 1:
                term = -fact / (i - n + 1)
            else:
                term = fact * (-logx + psi_n)
            total = total + term
            abs_total = abs_total + np.abs(term)
            if np.all(np.abs(term) < np.abs(total) * EPS):
                break
        else:
            raise ConvergenceError(f"E_{n} series failed")
        out[small] = np.log(total) + xs
        rel[small] = 4 * EPS * abs_total / np.abs(total)
    return out, rel


def log_scaled_upper_gamma(p: float, x) -> Tuple[np.ndarray, np.ndarray]:
    """Return ``log(exp(x) * Gamma(p, x))`` and a relative error estimate.

    Vectorized over ``x > 0``.  The exponential scaling keeps the result
    finite for arbitrarily large ``x``.
    """
    p = float(p)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x <= 0):
        raise DomainError("log_scaled_upper_gamma requires x > 0")
    if p < 0 and p - math.floor(p) == 1.0:
        # p sits below an integer by less than its ulp
        p = math.floor(p) + 1.0
    if _is_nonpositive_integer(p):
        n = int(1 - p)
        ls, rel = _log_scaled_expn(n, x)
        return ls + (1 - n) * np.log(x), rel

    out = np.empty_like(x)
    rel = np.empty_like(x)
    # for 0 < p < 1 the lower series cancels against Gamma(p) once x >= 1
    cf = x >= (1.0 if p < 1.0 else p + 1.0)
    if cf.any():
        h, r = _lentz_upper_gamma(p, x[cf])
        out[cf] = p * np.log(x[cf]) + np.log(h)
        rel[cf] = r
    ser = ~cf & (p >= 1.0)
    if ser.any():
        # here p >= 1 and x < p + 1
        xs = x[ser]
        ratio, r = _lower_series_ratio(p, xs)
        out[ser] = xs + math.lgamma(p) + np.log1p(-ratio)
        rel[ser] = r / np.maximum(1.0 - ratio, EPS)
    low = ~cf & ~ser
    if low.any():
        xl = x[low]
        p0 = p - math.floor(p)
        g0 = _small_x_upper_gamma(p0, xl)
        if p > 0:
            out[low] = xl + np.log(g0)
            rel[low] = 16 * EPS
        else:
            logx = np.log(xl)
            # R_q = e^x x^{-q} Gamma(q, x);  R_q = (x R_{q+1} - 1) / q
            r_q = g0 * np.exp(xl - p0 * logx)
            q = p0
            steps = int(round(p0 - p))
            for _ in range(steps):
                q -= 1.0
                r_q = (xl * r_q - 1.0) / q
            out[low] = np.log(r_q) + p * logx
            rel[low] = 16 * EPS * (steps + 1)
    return out, rel


def upper_gamma_array(p: float, x) -> np.ndarray:
    """``Gamma(p, x)`` for an array of ``x > 0`` (no error estimate)."""
    ls, _ = log_scaled_upper_gamma(p, x)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return np.exp(ls - x)


def upper_gamma(p: float, x: float) -> EvalResult:
    """Upper incomplete Gamma function ``Gamma(p, x)`` for any real ``p``.

    Parameters
    ----------
    p : float
        Order, any real number.
    x : float
        Lower integration limit; ``x > 0``, or ``x == 0`` when ``p > 0``.

    Notes
    -----
    Integer orders ``p = 1 - n`` go through ``x**(1-n) E_n(x)``.  Otherwise
    the continued fraction is used for ``x >= max(1, p + 1)``, the lower
    series for the remaining ``p > 0`` cases, and for ``x < 1`` with
    ``p < 1`` a cancellation-free anchor in ``(0, 1)`` followed by the
    downward recurrence ``Gamma(p, x) = (Gamma(p+1, x) - x**p e**-x) / p``.
    """
    p = float(p)
    x = float(x)
    if x < 0:
        raise DomainError(f"upper_gamma requires x >= 0, got {x}")
    if x == 0:
        if p <= 0:
            raise DomainError("upper_gamma(p, 0) diverges for p <= 0")
        return EvalResult(gamma(p), 4 * EPS * gamma(p))
    ls, rel = log_scaled_upper_gamma(p, x)
    value = math.exp(float(ls[0]) - x)
    return EvalResult(value, float(rel[0]) * value)


def exp_integral_en(n: int, x: float) -> EvalResult:
    """Generalized exponential integral ``E_n(x) = int_1^inf e^{-xt} t^{-n} dt``."""
    if int(n) != n or n < 1:
        raise DomainError(f"E_n requires an integer n >= 1, got {n!r}")
    x = float(x)
    if x <= 0:
        raise DomainError(f"E_n requires x > 0, got {x}")
    ls, rel = _log_scaled_expn(int(n), np.array([x]))
    value = math.exp(float(ls[0]) - x)
    return EvalResult(value, float(rel[0]) * value)


# ---------------------------------------------------------------------------
# Sine and cosine integrals
# ---------------------------------------------------------------------------

def _sici(z: float) -> Tuple[float, float]:
    z = float(z)
    if not z > 0:
        raise DomainError(f"Si/Ci require z > 0, got {z}")
    if z <= SICI_SERIES_MAX:
        z2 = z * z
        fs = z
        si = z
        fc = 1.0
        ci = 0.0
        for k in range(1, 100):
            fs *= -z2 / ((2 * k) * (2 * k + 1))
            ts = fs / (2 * k + 1)
            si += ts
            fc *= -z2 / ((2 * k - 1) * (2 * k))
            tc = fc / (2 * k)
            ci += tc
            if abs(ts) < EPS * abs(si) and abs(tc) < EPS * abs(ci):
                break
        return si, EULER_GAMMA + math.log(z) + ci
    # E1(iz) = -Ci(z) + i (Si(z) - pi/2), by continued fraction
    b = complex(1.0, z)
    c = 1.0 / FPMIN
    d = h = 1.0 / b
    for i in range(2, _MAX_CF_ITER):
        a = -float((i - 1) ** 2)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta.real - 1.0) + abs(delta.imag) < EPS:
            break
    else:
        raise ConvergenceError(f"Si/Ci continued fraction failed at z={z}")
    e1 = h * cmath.exp(complex(0.0, -z))
    return e1.imag + math.pi / 2, -e1.real


def sine_integral(z: float) -> float:
    """``Si(z)``, the integral of ``sin(t)/t`` from 0 to ``z``."""
    return _sici(z)[0]


def cosine_integral(z: float) -> float:
    """``Ci(z) = -int_z^inf cos(t)/t dt``."""
    return _sici(z)[1]


def si_shifted(z: float) -> float:
    """``si(z) = Si(z) - pi/2``."""
    return sine_integral(z) - math.pi / 2


# ---------------------------------------------------------------------------
# Power series for J, H, I and the order-derivatives
# ---------------------------------------------------------------------------

Term = Optional[Tuple[float, float]]


def _sum_log_terms(terms: Iterable[Term], log_scale: float, what: str) -> EvalResult:
    """Sum terms given as ``(sign, log|term|)``; ``None`` marks an exact zero.

    Stops once three consecutive nonzero terms are below
    ``1e-17 * |partial sum|`` (floor ``1e-300``).
    """
    total = 0.0
    abs_total = 0.0
    last = 0.0
    small_run = 0
    it: Iterator[Term] = iter(terms)
    for k in range(MAX_SERIES_TERMS):
        t = next(it)
        if t is None:
            continue
        sign, logmag = t
        e = logmag - log_scale
        if e > _LOG_OVERFLOW:
            raise ConvergenceError(f"{what}: term {k} overflows; pass a larger log_scale")
        val = sign * math.exp(e) if e > _LOG_UNDERFLOW else 0.0
        total += val
        abs_total += abs(val)
        last = abs(val)
        if last < max(SERIES_REL_STOP * abs(total), SERIES_ABS_FLOOR):
            small_run += 1
            if small_run >= 3:
                return EvalResult(total, last + 4 * EPS * abs_total)
        else:
            small_run = 0
    raise ConvergenceError(f"{what}: no convergence within {MAX_SERIES_TERMS} terms")


def _check_z(z: float) -> float:
    z = float(z)
    if not z > 0:
        raise DomainError(f"argument must be > 0, got {z}")
    return z


def _j_terms(alpha: float, logh: float, sign_flip: float) -> Iterator[Term]:
    k = 0
    while True:
        y = k + alpha + 1.0
        if _is_nonpositive_integer(y):
            yield None
        else:
            lg, sg = _lgamma_sign(y)
            sign = (-1.0 if (k % 2 and sign_flip < 0) else 1.0) * sg
            yield sign, (2 * k + alpha) * logh - math.lgamma(k + 1.0) - lg
        k += 1


def bessel_j(alpha: OrderLike, z: float, *, log_scale: float = 0.0) -> EvalResult:
    """Bessel function of the first kind ``J_alpha(z)`` by its power series."""
    alpha = float(alpha)
    z = _check_z(z)
    return _sum_log_terms(_j_terms(alpha, math.log(z / 2), -1.0), log_scale, "bessel_j")


def bessel_i(alpha: OrderLike, z: float, *, log_scale: float = 0.0) -> EvalResult:
    """Modified Bessel function of the first kind ``I_alpha(z)``."""
    alpha = float(alpha)
    z = _check_z(z)
    return _sum_log_terms(_j_terms(alpha, math.log(z / 2), 1.0), log_scale, "bessel_i")


def bessel_k(alpha: OrderLike, z: float) -> EvalResult:
    """``K_alpha(z) = (pi/2) (I_{-alpha}(z) - I_alpha(z)) / sin(pi alpha)``.

    Only non-integer orders are supported.
    """
    alpha = float(alpha)
    if alpha == math.floor(alpha):
        raise DomainError(f"bessel_k is defined here for non-integer order only, got {alpha}")
    z = _check_z(z)
    neg = bessel_i(-alpha, z)
    pos = bessel_i(alpha, z)
    scale = math.pi / 2 / _sinpi(alpha)
    value = scale * (neg.value - pos.value)
    err = abs(scale) * (neg.est_abs_error + pos.est_abs_error
                        + 4 * EPS * (abs(neg.value) + abs(pos.value)))
    return EvalResult(value, err)


def _h_terms(alpha: float, logh: float) -> Iterator[Term]:
    k = 0
    while True:
        y = k + alpha + 1.5
        if _is_nonpositive_integer(y):
            yield None
        else:
            lg, sg = _lgamma_sign(y)
            sign = (-1.0 if k % 2 else 1.0) * sg
            yield sign, (2 * k + alpha + 1) * logh - math.lgamma(k + 1.5) - lg
        k += 1


def struve_h(alpha: OrderLike, z: float, *, log_scale: float = 0.0) -> EvalResult:
    """Struve function ``H_alpha(z)`` by its power series."""
    alpha = float(alpha)
    z = _check_z(z)
    return _sum_log_terms(_h_terms(alpha, math.log(z / 2)), log_scale, "struve_h")


def _check_n(n: int) -> int:
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    return int(n)


def _j_dorder_terms(n: int, logh: float) -> Iterator[Term]:
    alpha = n - 0.5
    k = 0
    while True:
        y = k + n + 0.5
        factor = logh - digamma(y)
        if factor == 0.0:
            yield 0.0, -math.inf
        else:
            sign = (-1.0 if k % 2 else 1.0) * math.copysign(1.0, factor)
            yield sign, ((2 * k + alpha) * logh - math.lgamma(k + 1.0)
                         - math.lgamma(y) + math.log(abs(factor)))
        k += 1


def bessel_j_dorder(n: int, z: float, *, log_scale: float = 0.0) -> EvalResult:
    """``dJ_alpha(z)/dalpha`` at ``alpha = n - 1/2``.

    Term-wise derivative of the power series: each term picks up the factor
    ``log(z/2) - psi(k + n + 1/2)``.
    """
    n = _check_n(n)
    z = _check_z(z)
    return _sum_log_terms(_j_dorder_terms(n, math.log(z / 2)), log_scale, "bessel_j_dorder")


def _h_dorder_terms(n: int, logh: float) -> Iterator[Term]:
    k = 0
    while True:
        y = k + 2 - n
        base = (2 * k + 1.5 - n) * logh - math.lgamma(k + 1.5)
        ksign = -1.0 if k % 2 else 1.0
        if y <= 0:
            # 1/Gamma vanishes here; only its derivative (-1)^j j! survives
            j = -y
            yield ksign * (-1.0 if j % 2 else 1.0), base + math.lgamma(j + 1.0)
        else:
            factor = logh - digamma(y)
            if factor == 0.0:
                yield 0.0, -math.inf
            else:
                yield (ksign * math.copysign(1.0, factor),
                       base - math.lgamma(y) + math.log(abs(factor)))
        k += 1


def struve_h_dorder(n: int, z: float, *, log_scale: float = 0.0) -> EvalResult:
    """``dH_alpha(z)/dalpha`` at ``alpha = 1/2 - n``.

    For ``k <= n - 2`` the reciprocal Gamma coefficient has a zero at a
    nonpositive integer ``-j``; its derivative there is ``(-1)**j j!``.
    """
    n = _check_n(n)
    z = _check_z(z)
    return _sum_log_terms(_h_dorder_terms(n, math.log(z / 2)), log_scale, "struve_h_dorder")
