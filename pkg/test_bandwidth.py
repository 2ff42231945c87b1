#!/usr/bin/env python3
"""Tests for the density functionals and the bandwidth selectors."""
import math

import numpy as np
import pytest

from bandwidth import (
    ALPHA_FLOOR,
    Bandwidth,
    BandwidthLaw,
    BandwidthSource,
    DensityFunctionals,
    PdfFunctionals,
    fit_gamma_reference,
    functionals_of,
    i1_functional,
    i2_functional,
    optimal_bandwidth,
    pdf_functionals_of,
    pdf_law_bandwidth,
    rule_of_thumb,
    select_bandwidth,
    squared_bias_density,
)
from distributions import Gamma, Maxwell, Weibull, sample
from errors import DegenerateSampleError, DivergedFunctionalError, DomainError
from estimator import Sample
from special_math import ln_gamma

UNIT = DensityFunctionals(I1=1.0, I2=3.0 / math.sqrt(math.pi), T=1.0)


def gamma_i1(alpha, beta):
    return math.exp(ln_gamma(alpha - 1.5) - ln_gamma(alpha)) / beta ** 1.5


def test_unit_functionals_at_128():
    assert optimal_bandwidth(UNIT, 128).value == pytest.approx(0.25, rel=1e-15)


def test_power_law():
    b = optimal_bandwidth(UNIT, 2000).value
    assert b == pytest.approx(2000.0 ** (-2.0 / 7.0), rel=1e-14)
    assert b == pytest.approx(0.11399, abs=1e-4)


@pytest.mark.parametrize("n", [10, 100, 1000, 12345])
def test_doubling_ratio(n):
    fun = DensityFunctionals.from_integrals(0.7, 0.02)
    ratio = optimal_bandwidth(fun, 2 * n).value / optimal_bandwidth(fun, n).value
    assert ratio == pytest.approx(2.0 ** (-2.0 / 7.0), rel=2e-15)


def test_optimal_bandwidth_records_functionals():
    fun = DensityFunctionals.from_integrals(0.7, 0.02)
    b = optimal_bandwidth(fun, 500)
    assert b.source is BandwidthSource.FUNCTIONALS
    assert b.functionals is fun
    assert b.value == pytest.approx(fun.T ** (2.0 / 7.0) * 500.0 ** (-2.0 / 7.0), rel=1e-14)


@pytest.mark.parametrize("n", [1, 0, 2.5])
def test_optimal_bandwidth_rejects_bad_n(n):
    with pytest.raises(DomainError):
        optimal_bandwidth(UNIT, n)


def test_pdf_law():
    unit = PdfFunctionals(J1=2.0 * math.sqrt(math.pi), J2=1.0)
    assert pdf_law_bandwidth(unit, 1000) == pytest.approx(1000.0 ** -0.4, rel=1e-14)
    ratio = pdf_law_bandwidth(unit, 2000) / pdf_law_bandwidth(unit, 1000)
    assert ratio == pytest.approx(2.0 ** -0.4, rel=1e-14)


@pytest.mark.parametrize("beta", [1.0, 0.5])
def test_pdf_functionals_of_gamma3(beta):
    # f = x² e^-x / 2: J1 = Γ(5/2)/Γ(3), ∫ (x f'')² = 5/32; J1 ∝ β^(-1/2), J2 ∝ β^(-3)
    fun = pdf_functionals_of(Gamma(3.0, beta))
    assert fun.J1 == pytest.approx(0.375 * math.sqrt(math.pi) / math.sqrt(beta), rel=1e-6)
    assert fun.J2 == pytest.approx(5.0 / 32.0 / beta ** 3, rel=1e-6)


def test_pdf_functionals_validation():
    with pytest.raises(DivergedFunctionalError):
        PdfFunctionals(J1=1.0, J2=0.0)


def test_functionals_validation():
    with pytest.raises(DivergedFunctionalError):
        DensityFunctionals.from_integrals(math.inf, 1.0)
    with pytest.raises(DivergedFunctionalError):
        DensityFunctionals.from_integrals(1.0, 0.0)


def test_bandwidth_validation():
    with pytest.raises(DomainError):
        Bandwidth.explicit(0.0, 10)
    assert Bandwidth.explicit(0.05, 10).source is BandwidthSource.EXPLICIT


@pytest.mark.parametrize("alpha, beta", [(2.0, 1.0), (2.43, 1.0), (3.0, 0.5), (1.6, 1.0)])
def test_i1_matches_closed_form(alpha, beta):
    assert i1_functional(Gamma(alpha, beta)) == pytest.approx(gamma_i1(alpha, beta), rel=1e-6)


def test_i1_diverges_below_three_halves():
    with pytest.raises(DivergedFunctionalError):
        functionals_of(Gamma(1.2, 1.0))


# near the origin P(x) ~ x^(2α-6) for a gamma density
@pytest.mark.parametrize("alpha", [2.0, 2.43, 2.5])
def test_i2_diverges_up_to_five_halves(alpha):
    with pytest.raises(DivergedFunctionalError, match="I2"):
        i2_functional(Gamma(alpha, 1.0))
    with pytest.raises(DivergedFunctionalError, match="I2"):
        functionals_of(Gamma(alpha, 1.0))


def test_i2_finite_at_the_floor():
    value = i2_functional(Gamma(ALPHA_FLOOR, 1.0))
    assert math.isfinite(value) and value > 0.0
    assert ALPHA_FLOOR > 2.5


def test_maxwell_rescaling():
    one = functionals_of(Maxwell(1.0))
    two = functionals_of(Maxwell(2.0))
    assert two.I1 / one.I1 == pytest.approx(2.0 ** -1.5, rel=1e-4)
    assert two.I2 / one.I2 == pytest.approx(2.0 ** -5, rel=1e-4)


def test_squared_bias_density_gamma2():
    # f = x e^-x: f/(3x²) + f'' = e^-x (1/(3x) + x - 2)
    x = 0.7
    expected = (math.exp(-x) * (1.0 / (3.0 * x) + x - 2.0)) ** 2
    assert squared_bias_density(Gamma(2.0, 1.0), x) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("dist", [Gamma(ALPHA_FLOOR, 1.0), Gamma(3.0, 0.5), Weibull(4.0), Maxwell(2.0)], ids=lambda d: d.label)
def test_functionals_positive_for_reference_distributions(dist):
    fun = functionals_of(dist)
    assert fun.I1 > 0.0 and fun.I2 > 0.0
    assert fun.T == pytest.approx(3.0 * fun.I1 / (math.sqrt(math.pi) * fun.I2), rel=1e-15)


def test_moment_fit_on_large_sample():
    fit = fit_gamma_reference(sample(Gamma(2.43, 1.0), 100_000, seed=2014))
    assert 2.3 <= fit.alpha <= 2.6
    assert 0.92 <= fit.beta <= 1.08
    assert not fit.clamped


def test_moment_fit_uses_unbiased_variance():
    values = np.array([1.0, 2.0, 4.0])
    fit = fit_gamma_reference(Sample(values))
    var = np.var(values, ddof=1)
    assert fit.alpha_moment == pytest.approx(values.mean() ** 2 / var, rel=1e-14)
    assert fit.beta == pytest.approx(var / values.mean(), rel=1e-14)


def test_constant_sample_is_degenerate():
    with pytest.raises(DegenerateSampleError):
        rule_of_thumb(Sample([2.0] * 50))
    with pytest.raises(DegenerateSampleError):
        rule_of_thumb(Sample([2.0]))


def test_heavy_origin_sample_is_clamped():
    s = sample(Gamma(0.8, 1.0), 5000, seed=3)
    b = rule_of_thumb(s)
    assert b.reference.clamped
    assert b.reference.alpha == ALPHA_FLOOR
    assert b.reference.alpha_moment < ALPHA_FLOOR
    assert math.isfinite(b.value) and b.value > 0.0


def test_small_gamma_samples_keep_a_sane_bandwidth():
    # moment fits of Gamma(2.43) samples often land well below 5/2
    for seed in range(40):
        s = sample(Gamma(2.43, 1.0), 100, seed=seed)
        b = rule_of_thumb(s)
        assert b.reference.alpha >= ALPHA_FLOOR
        assert b.value > 0.03, (seed, b.reference.alpha_moment, b.value)


def test_rule_of_thumb_equals_formula():
    s = sample(Maxwell(2.0), 800, seed=5)
    b = rule_of_thumb(s)
    assert b.source is BandwidthSource.RULE_OF_THUMB
    assert b.n == 800
    assert b.value == pytest.approx(b.functionals.T ** (2.0 / 7.0) * 800.0 ** (-2.0 / 7.0), rel=1e-14)


def test_duplicated_sample_shrinks_bandwidth():
    s = sample(Gamma(2.43, 1.0), 1000, seed=6)
    doubled = s.concat(s)
    ratio = rule_of_thumb(doubled).value / rule_of_thumb(s).value
    assert ratio == pytest.approx(2.0 ** (-2.0 / 7.0), rel=1e-3)


def test_select_bandwidth_laws():
    s = sample(Gamma(2.43, 1.0), 1000, seed=9)
    derivative = select_bandwidth(s, BandwidthLaw.DERIVATIVE)
    density = select_bandwidth(s, BandwidthLaw.PDF)
    assert derivative.value == rule_of_thumb(s).value
    ref = derivative.reference
    expected = pdf_law_bandwidth(pdf_functionals_of(Gamma(ref.alpha, ref.beta)), 1000)
    assert density.value == pytest.approx(expected, rel=1e-15)
    assert density.reference == ref
    assert density.pdf_functionals is not None


def test_density_bandwidth_is_narrower_for_maxwell():
    s = sample(Maxwell(2.0), 2000, seed=20140)
    derivative = select_bandwidth(s, BandwidthLaw.DERIVATIVE).value
    density = select_bandwidth(s, BandwidthLaw.PDF).value
    assert density < 0.5 * derivative


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
