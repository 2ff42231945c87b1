"""MISE diagnostics for the density-derivative estimator.

Leading MISE term for i.i.d. data, the covariance bound for strongly mixing
data with its constants C1-C3, the AR(1) mixing integral, and the resulting
MISE upper bound for dependent data. All integrals run over
[1e-6, q_{1-1e-9}] of the reference distribution.

The x-integrals do not depend on b or n, so they are computed once per
distribution and cached; b and n then enter through closed-form factors.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Iterable, Tuple

import numpy as np

from bandwidth import integrate_functional, squared_bias_density
from distributions import ReferenceDistribution, integration_domain
from errors import DomainError
from quadrature import DEFAULT_SETTINGS, adaptive_simpson

logger = logging.getLogger(__name__)

SQRT_PI = math.sqrt(math.pi)
# ∫ e^(-t) dt beyond this many e-folds is below double precision
_TAIL_EFOLDS = 50.0


class ConstantsOrder(str, Enum):
    """Order parameter fed to C1-C3: υ itself, or q = 2/(1-υ)."""

    UPSILON = "upsilon"
    Q = "q"


@dataclass(frozen=True)
class MixingSpec:
    C: float
    nu: float
    rho_ar: float
    tau0: float
    abs_moment: float
    upsilon: float

    def __post_init__(self):
        for name in ("C", "nu", "rho_ar", "tau0", "abs_moment", "upsilon"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"mixing spec {name} must be finite")
        if self.C <= 0.0:
            raise DomainError(f"mixing constant C must be > 0, got {self.C}")
        if not 0.0 < self.nu <= 1.0:
            raise DomainError(f"nu must lie in (0, 1], got {self.nu}")
        if not abs(self.rho_ar) < 1.0:
            raise DomainError(f"AR coefficient must satisfy |rho| < 1, got {self.rho_ar}")
        if self.tau0 < 1.0:
            raise DomainError(f"tau0 must be >= 1, got {self.tau0}")
        if self.abs_moment <= 0.0:
            raise DomainError(f"E|X|^nu must be > 0, got {self.abs_moment}")
        if not 0.0 < self.upsilon < 1.0:
            raise DomainError(f"upsilon must lie in (0, 1), got {self.upsilon}")

    @property
    def q(self) -> float:
        return 2.0 / (1.0 - self.upsilon)

    @property
    def decay(self) -> float:
        """|ρ^ν|, the per-lag decay factor of the mixing coefficients."""
        return abs(self.rho_ar) ** self.nu

    @property
    def scale(self) -> float:
        return 2.0 * (self.C + 1.0) * self.abs_moment


@dataclass(frozen=True)
class CovarianceConstants:
    c1: float
    c2: float
    c3: float


@dataclass(frozen=True)
class MiseTerms:
    """Parts of a MISE expression; ``total`` is their sum.

    ``variance`` carries the O(b) correction along with the leading
    b^(-3/2) part, so it is signed. It can turn negative at large b when
    the correction integral is negative, as it is for gamma densities.
    """

    bias: float
    variance: float
    covariance: float = 0.0

    @property
    def total(self) -> float:
        return self.bias + self.variance + self.covariance


def _check_x(x: float) -> float:
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"x must be finite and > 0, got {x!r}")
    return x


def _check_bn(b: float, n: int) -> Tuple[float, int]:
    b = float(b)
    if not math.isfinite(b) or b <= 0.0:
        raise DomainError(f"bandwidth must be positive, got b={b!r}")
    if int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n!r}")
    return b, int(n)


def pointwise_P(dist: ReferenceDistribution, x: float) -> float:
    return squared_bias_density(dist, _check_x(x))


def covariance_constants_from(f: float, df: float, d2f: float, q: float, x: float) -> CovarianceConstants:
    """C1-C3 from the values f(x), f'(x), f''(x)."""
    x = _check_x(x)
    q2, q3, q4 = q * q, q ** 3, q ** 4
    c1 = (-f * (2.0 * q3 - 9.0 * q2 + 4.0 * q - 33.0) / (24.0 * x)
          - df * (q + 1.0) / 2.0
          + d2f * x / 2.0)
    c2 = (f * (2.0 * q + 54.0 * x - q2 * x + 21.0 * q3 * x + q4 * x + 93.0 * q * x) / (144.0 * x ** 3)
          - df * (q + 1.0) ** 2 / (12.0 * x)
          + d2f * (q + 1.0) / 12.0)
    c3 = -f * (q + 1.0) * (q - 2.0) / 2.0
    return CovarianceConstants(c1, c2, c3)


def covariance_constants(dist: ReferenceDistribution, q_order: float, x: float) -> CovarianceConstants:
    x = _check_x(x)
    return covariance_constants_from(dist.pdf(x), dist.pdf_derivative(x),
                                     dist.pdf_second_derivative(x), q_order, x)


def order_parameter(spec: MixingSpec, order: ConstantsOrder = ConstantsOrder.UPSILON) -> float:
    return spec.upsilon if ConstantsOrder(order) is ConstantsOrder.UPSILON else spec.q


def mixing_integral(spec: MixingSpec) -> float:
    """(τ0 - 1) + ∫_τ0^∞ α̃(τ)^υ dτ in closed form, α̃(τ) = 2(C+1)E|X|^ν |ρ^ν|^τ."""
    head = spec.tau0 - 1.0
    r = spec.decay
    if r == 0.0:
        return head
    u = spec.upsilon
    return head + spec.scale ** u * r ** (spec.tau0 * u) / (u * math.log(1.0 / r))


def mixing_integral_quadrature(spec: MixingSpec) -> float:
    """The same integral by adaptive Simpson on a truncated τ range."""
    head = spec.tau0 - 1.0
    r = spec.decay
    if r == 0.0:
        return head
    u = spec.upsilon
    rate = u * math.log(1.0 / r)
    upper = spec.tau0 + _TAIL_EFOLDS / rate

    def alpha_pow(tau: float) -> float:
        return spec.scale ** u * math.exp(-rate * tau)

    return head + adaptive_simpson(alpha_pow, spec.tau0, upper, DEFAULT_SETTINGS).value


def _covariance_prefactor(u: float) -> float:
    return 2.0 ** (-(u + 3.0) / 2.0) * math.pi ** ((1.0 - u) / 2.0)


def covariance_bound(dist: ReferenceDistribution, x: float, b: float, n: int, spec: MixingSpec,
                     order: ConstantsOrder = ConstantsOrder.UPSILON) -> float:
    """Pointwise bound on the covariance part of the estimator variance at x."""
    x = _check_x(x)
    b, n = _check_bn(b, n)
    u = spec.upsilon
    c = covariance_constants(dist, order_parameter(spec, order), x)
    base = abs(b * b * c.c2 + b * c.c1 + c.c3)
    return (_covariance_prefactor(u) * x ** (-(u + 5.0) / 2.0)
            * b ** (-(u + 1.0) / 2.0) / n
            * base ** (1.0 - u) * mixing_integral(spec))


@lru_cache(maxsize=64)
def _bias_integral(dist: ReferenceDistribution) -> float:
    lower, upper = integration_domain(dist)
    return integrate_functional("∫P", dist, lambda x: squared_bias_density(dist, x), lower, upper,
                                DEFAULT_SETTINGS)


@lru_cache(maxsize=64)
def _variance_integrals(dist: ReferenceDistribution) -> Tuple[float, float]:
    """(∫ x^(-3/2) f, ∫ x^(-3/2) (f/(2x) - f'/2)) over the integration domain."""
    lower, upper = integration_domain(dist)

    def lead(x: float) -> float:
        return dist.pdf(x) / (x * math.sqrt(x))

    def correction(x: float) -> float:
        return (dist.pdf(x) / (2.0 * x) - dist.pdf_derivative(x) / 2.0) / (x * math.sqrt(x))

    a = integrate_functional("variance integral", dist, lead, lower, upper, DEFAULT_SETTINGS)
    c = integrate_functional("variance correction", dist, correction, lower, upper, DEFAULT_SETTINGS)
    return a, c


@lru_cache(maxsize=256)
def _covariance_integral(dist: ReferenceDistribution, q: float, u: float) -> float:
    """∫ x^(-(υ+5)/2) |C3(q, x)|^(1-υ) dx over the integration domain."""
    lower, upper = integration_domain(dist)
    factor = abs((q + 1.0) * (q - 2.0) / 2.0)
    if factor == 0.0:
        return 0.0

    def weight(x: float) -> float:
        return x ** (-(u + 5.0) / 2.0) * (factor * dist.pdf(x)) ** (1.0 - u)

    return integrate_functional("covariance integral", dist, weight, lower, upper, DEFAULT_SETTINGS)


def mise_terms(dist: ReferenceDistribution, b: float, n: int) -> MiseTerms:
    """Bias and variance parts of the i.i.d. MISE leading term."""
    b, n = _check_bn(b, n)
    lead, correction = _variance_integrals(dist)
    bias = b * b / 16.0 * _bias_integral(dist)
    variance = (lead + b * correction) / (4.0 * SQRT_PI * n * b ** 1.5)
    return MiseTerms(bias=bias, variance=variance)


def mise_leading_term(dist: ReferenceDistribution, b: float, n: int) -> float:
    return mise_terms(dist, b, n).total


def mise_upper_bound_terms(dist: ReferenceDistribution, b: float, n: int, spec: MixingSpec,
                           order: ConstantsOrder = ConstantsOrder.UPSILON) -> MiseTerms:
    base = mise_terms(dist, b, n)
    mixing = mixing_integral(spec)
    if mixing == 0.0:
        return base
    u = spec.upsilon
    weight = _covariance_integral(dist, order_parameter(spec, order), u)
    covariance = _covariance_prefactor(u) * b ** (-(u + 1.0) / 2.0) / n * weight * mixing
    return MiseTerms(bias=base.bias, variance=base.variance, covariance=covariance)


def mise_upper_bound_dependent(dist: ReferenceDistribution, b: float, n: int, spec: MixingSpec,
                               order: ConstantsOrder = ConstantsOrder.UPSILON) -> float:
    return mise_upper_bound_terms(dist, b, n, spec, order).total


def log_bandwidth_grid(lower: float, upper: float, count: int = 200) -> np.ndarray:
    if not 0.0 < lower < upper:
        raise DomainError(f"bandwidth grid needs 0 < lower < upper, got [{lower}, {upper}]")
    return np.geomspace(lower, upper, count)


def minimize_over_bandwidth(fn: Callable[[float], float], grid: Iterable[float]) -> Tuple[float, float]:
    """(b, fn(b)) at the grid point with the smallest value."""
    values = [(float(b), float(fn(float(b)))) for b in grid]
    if not values:
        raise DomainError("empty bandwidth grid")
    best = min(values, key=lambda item: item[1])
    logger.debug("grid minimum at b=%.6g (value %.6g) over %d points", best[0], best[1], len(values))
    return best
