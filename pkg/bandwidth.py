"""Global bandwidth for the density-derivative estimator.

Dropping the b^(-3/2) term of the MISE stationarity equation leaves the closed
form

    b0 = T^(2/7) n^(-2/7),   T = 3 I1 / (√π I2)
    I1 = ∫ x^(-3/2) f(x) dx,  I2 = ∫ (f(x)/(3x²) + f''(x))² dx

The rule of thumb plugs in a Gamma reference density fitted to the sample by
moments. I2 runs over [1e-6, q_{1-1e-9}] of the distribution; I1 also takes
its tail below 1e-6, which matters for shapes close to the α = 3/2 limit.

For comparison runs the density-estimation bandwidth of the modified gamma
kernel is available as well:

    b2* = (J1 / (2√π J2))^(2/5) n^(-2/5),   J1 = ∫ x^(-1/2) f,  J2 = ∫ (x f''(x))²
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from distributions import Gamma, ReferenceDistribution, integration_domain
from errors import DegenerateSampleError, DivergedFunctionalError, DomainError
from estimator import Sample
from quadrature import DEFAULT_SETTINGS, QuadratureSettings, integrate_semi_axis

logger = logging.getLogger(__name__)

SQRT_PI = math.sqrt(math.pi)
# I1 is finite for a gamma reference only when α > 3/2, I2 only when α > 5/2
ALPHA_FLOOR = 2.6
# how far below the lower cut (in ln x) an integrand is checked for decay
DECAY_SPAN = math.log(1e3)
# I1 origin tail: integrated in blocks of this ratio down to ORIGIN_FLOOR
ORIGIN_STEP = 1e-6
ORIGIN_FLOOR = 1e-200


class BandwidthSource(str, Enum):
    EXPLICIT = "explicit"
    RULE_OF_THUMB = "rule_of_thumb"
    FUNCTIONALS = "functionals"


class BandwidthLaw(str, Enum):
    """DERIVATIVE is the n^(-2/7) law; PDF is the n^(-2/5) density bandwidth b2*, kept for comparison."""

    DERIVATIVE = "derivative"
    PDF = "pdf"


def _check_functionals(owner: object, names) -> None:
    for name in names:
        value = getattr(owner, name)
        if not (math.isfinite(value) and value > 0.0):
            raise DivergedFunctionalError(f"functional {name} = {value!r} is not finite and positive")


@dataclass(frozen=True)
class DensityFunctionals:
    I1: float
    I2: float
    T: float

    def __post_init__(self):
        _check_functionals(self, ("I1", "I2", "T"))

    @classmethod
    def from_integrals(cls, I1: float, I2: float) -> "DensityFunctionals":
        return cls(I1=I1, I2=I2, T=3.0 * I1 / (SQRT_PI * I2))


@dataclass(frozen=True)
class PdfFunctionals:
    """Functionals of the density-estimation bandwidth b2*."""

    J1: float
    J2: float

    def __post_init__(self):
        _check_functionals(self, ("J1", "J2"))

    @property
    def scale(self) -> float:
        return self.J1 / (2.0 * SQRT_PI * self.J2)


@dataclass(frozen=True)
class GammaFit:
    alpha: float
    beta: float
    alpha_moment: float
    clamped: bool


@dataclass(frozen=True)
class Bandwidth:
    value: float
    n: int
    source: BandwidthSource
    functionals: Optional[DensityFunctionals] = None
    reference: Optional[GammaFit] = None
    pdf_functionals: Optional[PdfFunctionals] = None

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value > 0.0):
            raise DomainError(f"bandwidth must be positive, got {self.value!r}")

    @classmethod
    def explicit(cls, value: float, n: int) -> "Bandwidth":
        return cls(float(value), n, BandwidthSource.EXPLICIT)


def squared_bias_density(dist: ReferenceDistribution, x: float) -> float:
    """P(x) = (f(x)/(3x²) + f''(x))²."""
    term = dist.pdf(x) / (3.0 * x * x) + dist.pdf_second_derivative(x)
    return term * term


def _check_origin_decay(name: str, dist: ReferenceDistribution, fn: Callable[[float], float],
                        lower: float) -> None:
    # in u = ln x the integrand is x fn(x); it must shrink towards the origin
    at_cut = lower * fn(lower)
    deeper = lower * math.exp(-DECAY_SPAN)
    inside = deeper * fn(deeper)
    if at_cut > 0.0 and inside >= at_cut:
        raise DivergedFunctionalError(f"{name} diverges at the origin for {dist.label}")


def integrate_functional(name: str, dist: ReferenceDistribution, fn, lower: float, upper: float,
                         settings: QuadratureSettings) -> float:
    res = integrate_semi_axis(fn, lower, upper, settings)
    if not res.converged or not math.isfinite(res.value):
        raise DivergedFunctionalError(
            f"quadrature for {name} of {dist.label} did not converge "
            f"(value {res.value!r}, error {res.error:.3g}, {res.evaluations} evaluations)"
        )
    return res.value


def _origin_tail(dist: ReferenceDistribution, fn, lower: float, body: float,
                 settings: QuadratureSettings) -> float:
    """∫_0^lower of the I1 integrand, block by block until a block is below rel_tol."""
    tail = 0.0
    hi = lower
    while True:
        lo = hi * ORIGIN_STEP
        if lo < ORIGIN_FLOOR:
            raise DivergedFunctionalError(
                f"I1 of {dist.label} converges too slowly at the origin "
                f"(tail {tail:.3g} still growing at x={hi:.3g})"
            )
        piece = integrate_functional("I1", dist, fn, lo, hi, settings)
        tail += piece
        if piece <= settings.rel_tol * (body + tail):
            return tail
        hi = lo


def i1_functional(dist: ReferenceDistribution, settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """I1 = ∫ x^(-3/2) f over (0, q_{1-1e-9}]."""
    lower, upper = integration_domain(dist)

    def fn(x: float) -> float:
        return dist.pdf(x) / (x * math.sqrt(x))

    _check_origin_decay("I1 = ∫ x^(-3/2) f(x) dx", dist, fn, lower)
    body = integrate_functional("I1", dist, fn, lower, upper, settings)
    return body + _origin_tail(dist, fn, lower, body, settings)


def i2_functional(dist: ReferenceDistribution, settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """I2 = ∫ P(x) dx over [1e-6, q_{1-1e-9}]."""
    lower, upper = integration_domain(dist)

    def fn(x: float) -> float:
        return squared_bias_density(dist, x)

    _check_origin_decay("I2 = ∫ (f/(3x²) + f'')² dx", dist, fn, lower)
    return integrate_functional("I2", dist, fn, lower, upper, settings)


def functionals_of(dist: ReferenceDistribution,
                   settings: QuadratureSettings = DEFAULT_SETTINGS) -> DensityFunctionals:
    fun = DensityFunctionals.from_integrals(i1_functional(dist, settings), i2_functional(dist, settings))
    logger.debug("functionals of %s: I1=%.10g I2=%.10g T=%.10g", dist.label, fun.I1, fun.I2, fun.T)
    return fun


def pdf_functionals_of(dist: ReferenceDistribution,
                       settings: QuadratureSettings = DEFAULT_SETTINGS) -> PdfFunctionals:
    """J1 = ∫ x^(-1/2) f and J2 = ∫ (x f'')² over [1e-6, q_{1-1e-9}]."""
    lower, upper = integration_domain(dist)

    def j1(x: float) -> float:
        return dist.pdf(x) / math.sqrt(x)

    def j2(x: float) -> float:
        t = x * dist.pdf_second_derivative(x)
        return t * t

    _check_origin_decay("J1 = ∫ x^(-1/2) f(x) dx", dist, j1, lower)
    _check_origin_decay("J2 = ∫ (x f''(x))² dx", dist, j2, lower)
    fun = PdfFunctionals(J1=integrate_functional("J1", dist, j1, lower, upper, settings),
                         J2=integrate_functional("J2", dist, j2, lower, upper, settings))
    logger.debug("pdf functionals of %s: J1=%.10g J2=%.10g", dist.label, fun.J1, fun.J2)
    return fun


def _check_size(n: int) -> int:
    if int(n) != n or n < 2:
        raise DomainError(f"sample size must be an integer >= 2, got {n!r}")
    return int(n)


def optimal_bandwidth(fun: DensityFunctionals, n: int) -> Bandwidth:
    n = _check_size(n)
    # n^(-2/7) as 1 / (n^(1/7))^2 keeps n = 2^7 exact
    root = float(n) ** (1.0 / 7.0)
    value = fun.T ** (2.0 / 7.0) / (root * root)
    return Bandwidth(value, n, BandwidthSource.FUNCTIONALS, functionals=fun)


def pdf_law_bandwidth(fun: PdfFunctionals, n: int) -> float:
    """b2* = (J1 / (2√π J2))^(2/5) n^(-2/5): the density-estimation bandwidth, for comparison runs only."""
    n = _check_size(n)
    return (fun.scale / float(n)) ** 0.4


def fit_gamma_reference(s: Sample) -> GammaFit:
    if s.n < 2:
        raise DegenerateSampleError("rule of thumb needs at least 2 observations")
    values = s.sorted_values
    mean = float(np.mean(values))
    var = float(np.var(values, ddof=1))
    if not var > 0.0:
        raise DegenerateSampleError("sample variance is zero; cannot fit a gamma reference")
    alpha = mean * mean / var
    beta = var / mean
    clamped = alpha <= ALPHA_FLOOR
    return GammaFit(alpha=ALPHA_FLOOR if clamped else alpha, beta=beta,
                    alpha_moment=alpha, clamped=clamped)


def _reference(s: Sample) -> GammaFit:
    fit = fit_gamma_reference(s)
    if fit.clamped:
        logger.info("moment fit alpha=%.4g clamped to %.2g", fit.alpha_moment, ALPHA_FLOOR)
    return fit


def rule_of_thumb(s: Sample, settings: QuadratureSettings = DEFAULT_SETTINGS) -> Bandwidth:
    fit = _reference(s)
    fun = functionals_of(Gamma(fit.alpha, fit.beta), settings)
    b = optimal_bandwidth(fun, s.n)
    logger.debug("rule of thumb: alpha=%.6g beta=%.6g b0=%.10g (n=%d)", fit.alpha, fit.beta, b.value, s.n)
    return Bandwidth(b.value, s.n, BandwidthSource.RULE_OF_THUMB, functionals=fun, reference=fit)


def pdf_rule_of_thumb(s: Sample, settings: QuadratureSettings = DEFAULT_SETTINGS) -> Bandwidth:
    """b2* for the same gamma reference the derivative rule of thumb uses."""
    fit = _reference(s)
    fun = pdf_functionals_of(Gamma(fit.alpha, fit.beta), settings)
    value = pdf_law_bandwidth(fun, s.n)
    logger.debug("pdf rule of thumb: alpha=%.6g beta=%.6g b2*=%.10g (n=%d)", fit.alpha, fit.beta, value, s.n)
    return Bandwidth(value, s.n, BandwidthSource.EXPLICIT, reference=fit, pdf_functionals=fun)


def select_bandwidth(s: Sample, law: BandwidthLaw = BandwidthLaw.DERIVATIVE,
                     settings: QuadratureSettings = DEFAULT_SETTINGS) -> Bandwidth:
    """Rule-of-thumb bandwidth under the chosen rate law."""
    if BandwidthLaw(law) is BandwidthLaw.DERIVATIVE:
        return rule_of_thumb(s, settings)
    return pdf_rule_of_thumb(s, settings)
