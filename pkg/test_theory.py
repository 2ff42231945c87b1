#!/usr/bin/env python3
"""Tests for the MISE diagnostics, the covariance bound and the mixing integral."""
import math

import numpy as np
import pytest
from scipy import optimize

from bandwidth import functionals_of, optimal_bandwidth
from distributions import Gamma, Maxwell
from errors import DomainError
from prng import PhiloxStream
from theory import (
    ConstantsOrder,
    MixingSpec,
    covariance_bound,
    covariance_constants,
    covariance_constants_from,
    log_bandwidth_grid,
    minimize_over_bandwidth,
    mise_leading_term,
    mise_terms,
    mise_upper_bound_dependent,
    mise_upper_bound_terms,
    mixing_integral,
    mixing_integral_quadrature,
    pointwise_P,
)

GAMMA = Gamma(2.43, 1.0)
# I2 exists for this one, so b0 does too
REGULAR = Gamma(3.0, 1.0)
# 2(C+1)E|X|^nu = 1
AR_HALF = MixingSpec(C=1.0, nu=1.0, rho_ar=0.5, tau0=1.0, abs_moment=0.25, upsilon=0.5)
# mixing integral around 1e-17: the leading term governs
WEAK = MixingSpec(C=1.0, nu=1.0, rho_ar=1e-30, tau0=1.0, abs_moment=0.25, upsilon=0.5)


def test_mixing_integral_example():
    expected = 0.5 ** 0.5 / (0.5 * math.log(2.0))
    assert mixing_integral(AR_HALF) == pytest.approx(expected, rel=1e-14)
    assert mixing_integral(AR_HALF) == pytest.approx(2.0404, abs=1e-3)


def test_mixing_integral_without_dependence():
    spec = MixingSpec(C=1.0, nu=1.0, rho_ar=0.0, tau0=3.0, abs_moment=0.25, upsilon=0.5)
    assert mixing_integral(spec) == 2.0


def test_mixing_integral_monotone_in_rho():
    low = MixingSpec(C=1.0, nu=0.8, rho_ar=0.3, tau0=2.0, abs_moment=0.4, upsilon=0.3)
    high = MixingSpec(C=1.0, nu=0.8, rho_ar=0.7, tau0=2.0, abs_moment=0.4, upsilon=0.3)
    assert mixing_integral(high) > mixing_integral(low)
    negative = MixingSpec(C=1.0, nu=0.8, rho_ar=-0.7, tau0=2.0, abs_moment=0.4, upsilon=0.3)
    assert mixing_integral(negative) == mixing_integral(high)


def test_mixing_integral_matches_quadrature():
    u = PhiloxStream(404).uniforms(20 * 6).reshape(20, 6)
    for row in u:
        spec = MixingSpec(
            C=0.1 + 3.0 * row[0],
            nu=0.05 + 0.95 * row[1],
            rho_ar=-0.95 + 1.9 * row[2],
            tau0=1.0 + 4.0 * row[3],
            abs_moment=0.1 + 2.0 * row[4],
            upsilon=0.05 + 0.9 * row[5],
        )
        assert mixing_integral_quadrature(spec) == pytest.approx(mixing_integral(spec), rel=1e-6, abs=1e-8)


@pytest.mark.parametrize("field, value", [
    ("C", 0.0), ("nu", 0.0), ("nu", 1.5), ("rho_ar", 1.0), ("rho_ar", -1.0),
    ("tau0", 0.5), ("abs_moment", 0.0), ("upsilon", 0.0), ("upsilon", 1.0), ("C", math.nan),
])
def test_mixing_spec_validation(field, value):
    params = dict(C=1.0, nu=1.0, rho_ar=0.5, tau0=1.0, abs_moment=0.25, upsilon=0.5)
    params[field] = value
    with pytest.raises(DomainError):
        MixingSpec(**params)


def test_order_parameter_q():
    assert AR_HALF.q == 4.0


def test_pointwise_P_at_one():
    f, d2f = GAMMA.pdf(1.0), GAMMA.pdf_second_derivative(1.0)
    assert pointwise_P(GAMMA, 1.0) == pytest.approx((f / 3.0 + d2f) ** 2, rel=1e-14)
    with pytest.raises(DomainError):
        pointwise_P(GAMMA, 0.0)


def test_pointwise_P_vanishes_at_sign_change():
    d = Maxwell(2.0)
    root = optimize.brentq(lambda x: d.pdf(x) / (3.0 * x * x) + d.pdf_second_derivative(x), 1.0, 2.0, xtol=1e-15)
    assert pointwise_P(d, root) == pytest.approx(0.0, abs=1e-24)
    assert pointwise_P(d, 3.0) > 0.0


@pytest.mark.parametrize("x", [0.2, 1.0, 3.7])
def test_c3_vanishes_at_q_two(x):
    assert covariance_constants(GAMMA, 2.0, x).c3 == 0.0


def test_constants_at_q_two_and_a_half():
    q, x = 2.5, 1.0
    f, df, d2f = GAMMA.pdf(x), GAMMA.pdf_derivative(x), GAMMA.pdf_second_derivative(x)
    c = covariance_constants(GAMMA, q, x)
    # polynomial coefficients collected by power of q
    c1 = f * np.polyval([-2.0, 9.0, -4.0, 33.0], q) / (24.0 * x) - df * (q + 1.0) / 2.0 + d2f * x / 2.0
    c2_poly = np.polyval([x, 21.0 * x, -x, 2.0 + 93.0 * x, 54.0 * x], q)
    c2 = f * c2_poly / (144.0 * x ** 3) - df * (q + 1.0) ** 2 / (12.0 * x) + d2f * (q + 1.0) / 12.0
    c3 = -f * (q * q - q - 2.0) / 2.0
    assert all(math.isfinite(v) for v in (c.c1, c.c2, c.c3))
    assert c.c1 == pytest.approx(c1, rel=1e-12)
    assert c.c2 == pytest.approx(c2, rel=1e-12)
    assert c.c3 == pytest.approx(c3, rel=1e-12)


def test_constants_without_density_value():
    q, x, df, d2f = 0.7, 1.3, -0.4, 0.25
    c = covariance_constants_from(0.0, df, d2f, q, x)
    assert c.c1 == pytest.approx(-df * (q + 1.0) / 2.0 + d2f * x / 2.0, rel=1e-15)
    assert c.c2 == pytest.approx(-df * (q + 1.0) ** 2 / (12.0 * x) + d2f * (q + 1.0) / 12.0, rel=1e-15)
    assert c.c3 == 0.0


def test_covariance_bound_scales_with_n():
    half = covariance_bound(GAMMA, 1.0, 0.1, 2000, AR_HALF)
    full = covariance_bound(GAMMA, 1.0, 0.1, 1000, AR_HALF)
    assert math.isfinite(full) and full > 0.0
    assert half == pytest.approx(full / 2.0, rel=1e-15)


def test_covariance_bound_scales_with_b_when_c3_dominates():
    u = AR_HALF.upsilon
    b = 1e-3
    ratio = covariance_bound(GAMMA, 1.0, b / 2.0, 1000, AR_HALF) / covariance_bound(GAMMA, 1.0, b, 1000, AR_HALF)
    assert ratio == pytest.approx(2.0 ** ((u + 1.0) / 2.0), rel=0.02)


def test_covariance_bound_takes_magnitude_of_base():
    for x in np.linspace(0.05, 8.0, 60):
        for order in ConstantsOrder:
            value = covariance_bound(GAMMA, float(x), 0.2, 500, AR_HALF, order)
            assert math.isfinite(value) and value >= 0.0


def test_leading_term_blows_up_as_b_shrinks():
    assert mise_leading_term(GAMMA, 1e-4, 1000) > mise_leading_term(GAMMA, 1e-2, 1000)


def test_doubling_n_halves_variance():
    one = mise_terms(GAMMA, 0.05, 1000)
    two = mise_terms(GAMMA, 0.05, 2000)
    assert two.variance == one.variance / 2.0
    assert two.bias == one.bias


def test_variance_term_is_signed():
    # the O(b) correction is negative for a gamma density and wins at large b
    t = mise_terms(GAMMA, 0.5, 1000)
    assert t.variance < 0.0
    assert t.total > 0.0
    assert mise_terms(GAMMA, 0.05, 1000).variance > 0.0


def test_terms_add_up():
    t = mise_terms(Maxwell(2.0), 0.1, 500)
    assert t.covariance == 0.0
    assert mise_leading_term(Maxwell(2.0), 0.1, 500) == t.bias + t.variance


def test_upper_bound_without_dependence_equals_leading_term():
    spec = MixingSpec(C=1.0, nu=1.0, rho_ar=0.0, tau0=1.0, abs_moment=0.25, upsilon=0.5)
    for b in [0.01, 0.05, 0.2]:
        assert mise_upper_bound_dependent(GAMMA, b, 1000, spec) == mise_leading_term(GAMMA, b, 1000)


def test_upper_bound_dominates_leading_term():
    for b in [0.01, 0.05, 0.2]:
        terms = mise_upper_bound_terms(GAMMA, b, 1000, AR_HALF)
        assert terms.covariance > 0.0
        assert terms.total >= mise_leading_term(GAMMA, b, 1000)


@pytest.mark.parametrize("u", [0.1, 0.5, 0.9])
def test_covariance_negligible_as_b_shrinks(u):
    spec = MixingSpec(C=1.0, nu=1.0, rho_ar=0.5, tau0=1.0, abs_moment=0.25, upsilon=u)
    ratios = []
    for b in [1e-1, 1e-2, 1e-3]:
        t = mise_upper_bound_terms(GAMMA, b, 1000, spec)
        ratios.append(t.covariance / t.variance)
    assert ratios[0] > ratios[1] > ratios[2] > 0.0


def test_grid_helpers():
    grid = log_bandwidth_grid(1e-3, 1.0, 4)
    assert grid == pytest.approx([1e-3, 1e-2, 1e-1, 1.0], rel=1e-12)
    b, value = minimize_over_bandwidth(lambda t: (math.log10(t) + 2.0) ** 2, grid)
    assert b == pytest.approx(1e-2) and value == pytest.approx(0.0, abs=1e-24)
    with pytest.raises(DomainError):
        log_bandwidth_grid(1.0, 0.5)
    with pytest.raises(DomainError):
        minimize_over_bandwidth(abs, [])


def test_leading_term_near_minimum_at_rule_bandwidth():
    n = 1000
    b0 = optimal_bandwidth(functionals_of(REGULAR), n).value
    _, best = minimize_over_bandwidth(lambda b: mise_leading_term(REGULAR, b, n),
                                      log_bandwidth_grid(b0 / 4.0, b0 * 2.0, 120))
    assert mise_leading_term(REGULAR, b0, n) <= 1.05 * best


@pytest.mark.slow
def test_upper_bound_minimizer_matches_rule_bandwidth():
    n = 10_000
    b0 = optimal_bandwidth(functionals_of(REGULAR), n).value
    b, _ = minimize_over_bandwidth(lambda t: mise_upper_bound_dependent(REGULAR, t, n, WEAK),
                                   log_bandwidth_grid(b0 / 4.0, b0 * 2.0, 200))
    assert b0 / 1.25 <= b <= b0 * 1.25


@pytest.mark.slow
def test_minimized_bound_rate():
    sizes = [1_000, 10_000, 100_000]
    fun = functionals_of(REGULAR)
    minima = []
    for n in sizes:
        b0 = optimal_bandwidth(fun, n).value
        _, value = minimize_over_bandwidth(lambda t: mise_upper_bound_dependent(REGULAR, t, n, WEAK),
                                           log_bandwidth_grid(b0 / 4.0, b0 * 2.0, 200))
        minima.append(value)
    slope = np.polyfit(np.log(sizes), np.log(minima), 1)[0]
    assert slope == pytest.approx(-4.0 / 7.0, abs=0.1)


@pytest.mark.slow
def test_dependent_bound_shrinks_with_n():
    grid = log_bandwidth_grid(1e-4, 10.0, 240)
    rows = []
    for n in [1_000, 10_000, 100_000]:
        b_dep, bound = minimize_over_bandwidth(lambda t: mise_upper_bound_dependent(REGULAR, t, n, AR_HALF), grid)
        b_iid, leading = minimize_over_bandwidth(lambda t: mise_leading_term(REGULAR, t, n), grid)
        assert mise_upper_bound_terms(REGULAR, b_dep, n, AR_HALF).covariance > 0.0
        # the covariance term falls with b, so it pushes the minimizer up
        assert b_dep >= b_iid
        assert bound > leading
        rows.append((b_dep, bound))
    assert rows[0][1] > rows[1][1] > rows[2][1]
    assert rows[0][0] >= rows[1][0] >= rows[2][0]
    assert rows[2][0] < rows[0][0]


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
