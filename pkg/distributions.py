"""Reference distributions on the positive semi-axis.

Maxwell(σ), Weibull(s) with unit scale, and Gamma(α, β) in the shape/scale
parameterization. Each exposes the analytic pdf with its first and second
derivatives (the second derivative feeds the bias functional P(x)), the CDF,
a quantile function, and an exact sampler driven by a ``PhiloxStream``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import ClassVar, Dict, Tuple, Type

import numpy as np

from errors import ConfigError, DomainError
from estimator import Sample, SampleMode
from prng import PhiloxStream
from special_math import ln_gamma, regularized_gamma_p, regularized_gamma_q, trigamma

SQRT_TWO_OVER_PI = math.sqrt(2.0 / math.pi)
_QUANTILE_MAX_ITER = 400


def _check_x(x: float) -> float:
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"density argument must be finite and > 0, got x={x!r}")
    return x


def _check_param(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise DomainError(f"parameter {name} must be finite and > 0, got {value!r}")
    return value


@dataclass(frozen=True)
class ReferenceDistribution:
    kind: ClassVar[str] = ""

    @property
    def params(self) -> Tuple[float, ...]:
        raise NotImplementedError

    @property
    def label(self) -> str:
        return f"{self.kind}({','.join(f'{p:g}' for p in self.params)})"

    @property
    def spec(self) -> str:
        return f"{self.kind}:{','.join(f'{p:g}' for p in self.params)}"

    # analytic pieces supplied by each family
    def logpdf(self, x: float) -> float:
        raise NotImplementedError

    def pdf(self, x: float) -> float:
        return math.exp(self.logpdf(x))

    def pdf_derivative(self, x: float) -> float:
        raise NotImplementedError

    def pdf_second_derivative(self, x: float) -> float:
        raise NotImplementedError

    def cdf(self, x: float) -> float:
        raise NotImplementedError

    def survival(self, x: float) -> float:
        return 1.0 - self.cdf(x)

    @property
    def mean(self) -> float:
        raise NotImplementedError

    @property
    def variance(self) -> float:
        raise NotImplementedError

    @property
    def log_spread(self) -> float:
        """Standard deviation of ln X."""
        raise NotImplementedError

    def draw(self, size: int, stream: PhiloxStream) -> np.ndarray:
        raise NotImplementedError

    def quantile(self, p: float) -> float:
        """Bisection on the CDF (upper tail on the survival function)."""
        p = _check_probability(p)
        upper_tail = p > 0.5
        target = 1.0 - p if upper_tail else p

        def below(x: float) -> bool:
            # True while x is left of the quantile
            if upper_tail:
                return self.survival(x) > target
            return self.cdf(x) < target

        lo, hi = 0.0, self.mean + math.sqrt(self.variance)
        while below(hi):
            lo, hi = hi, 2.0 * hi
        for _ in range(_QUANTILE_MAX_ITER):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if below(mid):
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)


def _check_probability(p: float) -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got p={p!r}")
    return p


@dataclass(frozen=True)
class Maxwell(ReferenceDistribution):
    sigma: float = 1.0
    kind: ClassVar[str] = "maxwell"

    def __post_init__(self):
        _check_param("sigma", self.sigma)

    @property
    def params(self) -> Tuple[float, ...]:
        return (self.sigma,)

    def logpdf(self, x: float) -> float:
        x = _check_x(x)
        s = self.sigma
        return (0.5 * math.log(2.0) + 2.0 * math.log(x) - x * x / (2.0 * s * s)
                - 3.0 * math.log(s) - 0.5 * math.log(math.pi))

    def _scaled_exp(self, x: float) -> float:
        s = self.sigma
        return math.sqrt(2.0) * math.exp(-x * x / (2.0 * s * s)) / math.sqrt(math.pi)

    def pdf(self, x: float) -> float:
        x = _check_x(x)
        return self._scaled_exp(x) * x * x / self.sigma ** 3

    def pdf_derivative(self, x: float) -> float:
        x = _check_x(x)
        s2 = self.sigma ** 2
        return -self._scaled_exp(x) * x * (x * x - 2.0 * s2) / self.sigma ** 5

    def pdf_second_derivative(self, x: float) -> float:
        x = _check_x(x)
        r = x * x / self.sigma ** 2
        return self._scaled_exp(x) * (2.0 - 5.0 * r + r * r) / self.sigma ** 3

    def cdf(self, x: float) -> float:
        x = _check_x(x)
        z = x / self.sigma
        return math.erf(z / math.sqrt(2.0)) - SQRT_TWO_OVER_PI * z * math.exp(-0.5 * z * z)

    def survival(self, x: float) -> float:
        x = _check_x(x)
        z = x / self.sigma
        return math.erfc(z / math.sqrt(2.0)) + SQRT_TWO_OVER_PI * z * math.exp(-0.5 * z * z)

    @property
    def mean(self) -> float:
        return 2.0 * self.sigma * SQRT_TWO_OVER_PI

    @property
    def variance(self) -> float:
        return self.sigma ** 2 * (3.0 * math.pi - 8.0) / math.pi

    @property
    def log_spread(self) -> float:
        # (X/σ)² is chi-square with 3 degrees of freedom
        return 0.5 * math.sqrt(trigamma(1.5))

    def draw(self, size: int, stream: PhiloxStream) -> np.ndarray:
        z = stream.normals(3 * size).reshape(size, 3)
        return self.sigma * np.sqrt(np.sum(z * z, axis=1))


@dataclass(frozen=True)
class Weibull(ReferenceDistribution):
    """Unit-scale Weibull, f(x) = s x^(s-1) exp(-x^s)."""

    shape: float = 1.0
    kind: ClassVar[str] = "weibull"

    def __post_init__(self):
        _check_param("shape", self.shape)

    @property
    def params(self) -> Tuple[float, ...]:
        return (self.shape,)

    def logpdf(self, x: float) -> float:
        x = _check_x(x)
        s = self.shape
        return math.log(s) + (s - 1.0) * math.log(x) - x ** s

    def pdf_derivative(self, x: float) -> float:
        x = _check_x(x)
        s = self.shape
        xs = x ** s
        return -s * x ** (s - 2.0) * math.exp(-xs) * (s * xs - s + 1.0)

    def pdf_second_derivative(self, x: float) -> float:
        x = _check_x(x)
        s = self.shape
        xs = x ** s
        a = s - 1.0 - s * xs
        return s * x ** (s - 3.0) * math.exp(-xs) * (a * a - (s - 1.0) - s * (s - 1.0) * xs)

    def cdf(self, x: float) -> float:
        x = _check_x(x)
        return -math.expm1(-x ** self.shape)

    def survival(self, x: float) -> float:
        x = _check_x(x)
        return math.exp(-x ** self.shape)

    def quantile(self, p: float) -> float:
        p = _check_probability(p)
        return (-math.log1p(-p)) ** (1.0 / self.shape)

    @property
    def mean(self) -> float:
        return math.exp(ln_gamma(1.0 + 1.0 / self.shape))

    @property
    def variance(self) -> float:
        return math.exp(ln_gamma(1.0 + 2.0 / self.shape)) - self.mean ** 2

    @property
    def log_spread(self) -> float:
        return math.pi / (self.shape * math.sqrt(6.0))

    def draw(self, size: int, stream: PhiloxStream) -> np.ndarray:
        u = stream.uniforms(size)
        return (-np.log(u)) ** (1.0 / self.shape)


@dataclass(frozen=True)
class Gamma(ReferenceDistribution):
    """Gamma with shape α and scale β."""

    alpha: float = 1.0
    beta: float = 1.0
    kind: ClassVar[str] = "gamma"

    def __post_init__(self):
        _check_param("alpha", self.alpha)
        _check_param("beta", self.beta)

    @property
    def params(self) -> Tuple[float, ...]:
        return (self.alpha, self.beta)

    def logpdf(self, x: float) -> float:
        x = _check_x(x)
        a, b = self.alpha, self.beta
        return (a - 1.0) * math.log(x) - x / b - a * math.log(b) - ln_gamma(a)

    def _score(self, x: float) -> float:
        return (self.alpha - 1.0) / x - 1.0 / self.beta

    def pdf_derivative(self, x: float) -> float:
        x = _check_x(x)
        return self.pdf(x) * self._score(x)

    def pdf_second_derivative(self, x: float) -> float:
        x = _check_x(x)
        h = self._score(x)
        return self.pdf(x) * (h * h - (self.alpha - 1.0) / (x * x))

    def cdf(self, x: float) -> float:
        x = _check_x(x)
        return regularized_gamma_p(self.alpha, x / self.beta)

    def survival(self, x: float) -> float:
        x = _check_x(x)
        return regularized_gamma_q(self.alpha, x / self.beta)

    @property
    def mean(self) -> float:
        return self.alpha * self.beta

    @property
    def variance(self) -> float:
        return self.alpha * self.beta ** 2

    @property
    def log_spread(self) -> float:
        return math.sqrt(trigamma(self.alpha))

    def draw(self, size: int, stream: PhiloxStream) -> np.ndarray:
        if self.alpha >= 1.0:
            return self.beta * _marsaglia_tsang(self.alpha, size, stream)
        # boost: Gamma(α) = Gamma(α + 1) · U^(1/α)
        g = _marsaglia_tsang(self.alpha + 1.0, size, stream)
        u = stream.uniforms(size)
        return self.beta * g * u ** (1.0 / self.alpha)


def _marsaglia_tsang(alpha: float, size: int, stream: PhiloxStream) -> np.ndarray:
    """Rejection sampler for Gamma(α, 1), α >= 1, filled in batches."""
    d = alpha - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(size, dtype=np.float64)
    filled = 0
    while filled < size:
        batch = int(1.1 * (size - filled)) + 16
        z = stream.normals(batch)
        u = stream.uniforms(batch)
        v = (1.0 + c * z) ** 3
        ok = v > 0.0
        with np.errstate(invalid="ignore", divide="ignore"):
            accept = ok & (np.log(u) < 0.5 * z * z + d - d * v + d * np.log(np.where(ok, v, 1.0)))
        got = d * v[accept]
        take = min(got.size, size - filled)
        out[filled:filled + take] = got[:take]
        filled += take
    return out


FAMILIES: Dict[str, Type[ReferenceDistribution]] = {
    Maxwell.kind: Maxwell,
    Weibull.kind: Weibull,
    Gamma.kind: Gamma,
}

# Parameterizations used for the error tables
STUDY_DISTRIBUTIONS: Tuple[ReferenceDistribution, ...] = (
    Gamma(2.43, 1.0),
    Weibull(4.0),
    Maxwell(2.0),
)


def parse_distribution(text: str, key: str = "distribution") -> ReferenceDistribution:
    """Parse ``maxwell:2``, ``weibull:4``, ``gamma:2.43,1`` (β defaults to 1)."""
    name, _, raw = text.strip().partition(":")
    family = FAMILIES.get(name.strip().lower())
    if family is None:
        raise ConfigError(key, f"unknown distribution {name!r}; expected one of {sorted(FAMILIES)}")
    try:
        params = [float(p) for p in raw.split(",") if p.strip()]
    except ValueError:
        raise ConfigError(key, f"bad parameters in {text!r}") from None
    arity = 2 if family is Gamma else 1
    if not params or len(params) > arity:
        raise ConfigError(key, f"{name} takes {arity} parameter(s), got {text!r}")
    try:
        return family(*params)
    except DomainError as e:
        raise ConfigError(key, str(e)) from None


def pdf(d: ReferenceDistribution, x: float) -> float:
    return d.pdf(x)


def pdf_derivative(d: ReferenceDistribution, x: float) -> float:
    return d.pdf_derivative(x)


def pdf_second_derivative(d: ReferenceDistribution, x: float) -> float:
    return d.pdf_second_derivative(x)


def quantile(d: ReferenceDistribution, p: float) -> float:
    return d.quantile(p)


def sample(d: ReferenceDistribution, n: int, seed: int) -> Sample:
    """n i.i.d. draws, a pure function of (d, n, seed)."""
    if n < 1:
        raise DomainError(f"sample size must be >= 1, got {n}")
    values = d.draw(n, PhiloxStream(seed))
    return Sample(values, SampleMode.IID, {"generator": "iid", "distribution": d.spec, "seed": seed})


INTEGRATION_LOWER = 1e-6
INTEGRATION_TAIL = 1e-9


@lru_cache(maxsize=256)
def integration_domain(d: ReferenceDistribution) -> Tuple[float, float]:
    """[1e-6, q_{1-1e-9}]: domain of every functional and MISE integral."""
    return INTEGRATION_LOWER, d.quantile(1.0 - INTEGRATION_TAIL)
