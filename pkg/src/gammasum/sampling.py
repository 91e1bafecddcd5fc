"""Seeded sampling for the Beta-mixed normal construction and Monte Carlo estimators.

Streams wrap a counter-based Philox generator.  A stream is a value: it can be
split into independent child streams via ``numpy.random.SeedSequence``, so a
parameter grid can fan out deterministically from one seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Union

import numpy as np

from .exceptions import DivergentError, DomainError

MIN_SAMPLES = 1000
_CHUNK = 1 << 18
_U53 = 2.0 ** -53


def parse_seed(text: Union[str, int]) -> int:
    """Parse a 64-bit seed written in decimal or ``0x`` hex."""
    if isinstance(text, (int, np.integer)):
        value = int(text)
    else:
        text = str(text).strip().lower()
        try:
            value = int(text, 16) if text.startswith("0x") else int(text, 10)
        except ValueError:
            raise DomainError(f"seed must be a decimal or 0x-hex integer, got {text!r}") from None
    if not 0 <= value < 2 ** 64:
        raise DomainError(f"seed must fit in 64 unsigned bits, got {value}")
    return value


@dataclass(frozen=True)
class MixtureSpec:
    """Shape ``lambda`` of the Beta(1, lambda) mixing law."""

    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"lambda must be > 0, got {self.lam}")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n_samples: int
    seed: int

    def z_score(self, target: float) -> float:
        if self.std_error == 0:
            return 0.0 if self.mean == target else math.inf
        return (self.mean - target) / self.std_error

    def agrees_with(self, target: float, k: float = 4.0) -> bool:
        return abs(self.mean - target) <= k * self.std_error


class Stream:
    """Deterministic random stream.

    Two streams built from the same ``seed`` and ``path`` produce
    bit-identical output.
    """

    def __init__(self, seed: int, path: tuple = ()):
        self.seed = parse_seed(seed)
        self.path = tuple(path)
        seq = np.random.SeedSequence(self.seed, spawn_key=self.path)
        self._gen = np.random.Generator(np.random.Philox(seq))

    def split(self, k: int) -> List["Stream"]:
        """Return ``k`` child streams, independent of this one and of each other."""
        return [Stream(self.seed, self.path + (i,)) for i in range(k)]

    def child(self, i: int) -> "Stream":
        return Stream(self.seed, self.path + (i,))

    def uniform_open(self, size: int) -> np.ndarray:
        """Uniforms on the open interval (0, 1)."""
        k = self._gen.integers(0, 2 ** 53, size=size, dtype=np.int64)
        return (k.astype(float) + 0.5) * _U53

    def normal(self, size: int) -> np.ndarray:
        """Standard normals by Box-Muller (cosine branch) on open uniforms."""
        u1 = self.uniform_open(size)
        u2 = self.uniform_open(size)
        return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * math.pi * u2)


def sample_beta_1_lambda(spec: MixtureSpec, stream: Stream, size: int) -> np.ndarray:
    """Draws with density ``lambda w**(lambda - 1)`` on (0, 1), by inversion ``U**(1/lambda)``."""
    u = stream.uniform_open(size)
    w = u ** (1.0 / spec.lam)
    # guard the open interval against rounding of u**(1/lam) to 1 or 0
    return np.clip(w, np.nextafter(0.0, 1.0), np.nextafter(1.0, 0.0))


def sample_mixture_x(spec: MixtureSpec, stream: Stream, size: int) -> np.ndarray:
    """``X = sqrt(W) Z`` with ``W ~ Beta(1, lambda)`` independent of ``Z ~ N(0, 1)``."""
    w = sample_beta_1_lambda(spec, stream, size)
    z = stream.normal(size)
    return np.sqrt(w) * z


def sample_exponential(rate: float, stream: Stream, size: int) -> np.ndarray:
    """Exponential draws with the given rate, ``-log(U) / rate``."""
    if not rate > 0:
        raise DomainError(f"rate must be > 0, got {rate}")
    return -np.log(stream.uniform_open(size)) / rate


def _estimate(sampler, n: int, seed: int) -> McEstimate:
    """Chunked running mean/variance (Chan's pooled update) of ``sampler(stream, m)``."""
    if n < MIN_SAMPLES:
        raise DomainError(f"need at least {MIN_SAMPLES} samples, got {n}")
    stream = Stream(seed)
    count = 0
    mean = 0.0
    m2 = 0.0
    while count < n:
        m = min(_CHUNK, n - count)
        y = sampler(stream, m)
        cm = float(np.mean(y))
        cm2 = float(np.sum((y - cm) ** 2))
        delta = cm - mean
        total = count + m
        mean += delta * m / total
        m2 += cm2 + delta * delta * count * m / total
        count = total
    var = m2 / (n - 1)
    return McEstimate(mean, math.sqrt(var / n), n, seed)


def mc_mixture_expectation(a: float, b: float, spec: MixtureSpec, n: int, seed: int) -> McEstimate:
    """Monte Carlo estimate of ``E[exp(a X^2 / 2 - 2 b / X^2)]`` for the mixture ``X``.

    The integrand is taken as 0 at ``X = 0``.
    """
    if not 0 < a <= 1 or not b > 0:
        raise DomainError(f"need a in (0, 1] and b > 0; got ({a}, {b})")

    def draw(stream, m):
        x2 = sample_mixture_x(spec, stream, m) ** 2
        with np.errstate(divide="ignore", over="ignore"):
            y = np.exp(0.5 * a * x2 - 2.0 * b / x2)
        return np.where(x2 > 0, y, 0.0)

    return _estimate(draw, n, parse_seed(seed))


def mc_exponential_expectation(a: float, b: float, c: float, n: int, seed: int) -> McEstimate:
    """Monte Carlo estimate of ``E[(c xi^2 + a c - 1)^-1 1{xi >= sqrt(1-a)}]``, ``xi ~ Exp(2 sqrt(b))``."""
    if not 0 < a <= 1 or not b > 0:
        raise DomainError(f"need a in (0, 1] and b > 0; got ({a}, {b})")
    if c < 1.0 / a:
        raise DomainError(f"need c >= 1/a; got a={a}, c={c}")
    if a == 1.0 and c == 1.0:
        raise DivergentError("expectation is infinite for a = 1, c = 1")
    rate = 2.0 * math.sqrt(b)
    lower = math.sqrt(1.0 - a)
    shift = a * c - 1.0

    def draw(stream, m):
        xi = sample_exponential(rate, stream, m)
        with np.errstate(divide="ignore"):
            return np.where(xi >= lower, 1.0 / (c * xi * xi + shift), 0.0)

    return _estimate(draw, n, parse_seed(seed))
