#!/usr/bin/env python3
"""Tests for the reference distributions and their samplers."""
import math

import numpy as np
import pytest
from scipy import integrate, stats

from distributions import (
    STUDY_DISTRIBUTIONS,
    Gamma,
    Maxwell,
    Weibull,
    integration_domain,
    parse_distribution,
    pdf,
    pdf_derivative,
    pdf_second_derivative,
    quantile,
    sample,
)
from errors import ConfigError, DomainError
from simulation import ks_statistic

ALL = STUDY_DISTRIBUTIONS + (Gamma(2.0, 1.0), Gamma(0.6, 2.0), Weibull(1.5), Maxwell(0.7))
ids = [d.label for d in ALL]


def test_known_pdf_values():
    assert pdf(Gamma(1.0, 1.0), 1.0) == pytest.approx(math.exp(-1.0), rel=1e-14)
    assert pdf(Maxwell(2.0), 2.0) == pytest.approx(0.2419707, rel=1e-6)
    assert pdf_derivative(Maxwell(2.0), 2.0) == pytest.approx(0.1209854, rel=1e-6)


@pytest.mark.parametrize("dist", ALL, ids=ids)
def test_pdf_normalization(dist):
    head, _ = integrate.quad(dist.pdf, 1e-300, dist.mean, epsabs=1e-12, epsrel=1e-10, limit=200)
    tail, _ = integrate.quad(dist.pdf, dist.mean, math.inf, epsabs=1e-12, epsrel=1e-10, limit=200)
    assert head + tail == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("dist", ALL, ids=ids)
def test_pdf_matches_scipy(dist):
    ref = {
        "gamma": lambda d: stats.gamma(a=d.alpha, scale=d.beta),
        "weibull": lambda d: stats.weibull_min(c=d.shape),
        "maxwell": lambda d: stats.maxwell(scale=d.sigma),
    }[dist.kind](dist)
    for x in np.linspace(0.05, dist.quantile(0.999), 25):
        assert dist.pdf(x) == pytest.approx(ref.pdf(x), rel=1e-11)
        assert dist.cdf(x) == pytest.approx(ref.cdf(x), rel=1e-10, abs=1e-14)


@pytest.mark.parametrize("dist", ALL, ids=ids)
def test_derivatives_match_finite_differences(dist):
    for x in np.linspace(0.1, dist.quantile(0.99), 40):
        h = 1e-5 * x
        fd1 = (dist.pdf(x + h) - dist.pdf(x - h)) / (2.0 * h)
        d1 = pdf_derivative(dist, x)
        assert abs(d1 - fd1) <= 1e-7 * max(abs(d1), dist.pdf(x)), x
        fd2 = (dist.pdf_derivative(x + h) - dist.pdf_derivative(x - h)) / (2.0 * h)
        d2 = pdf_second_derivative(dist, x)
        assert abs(d2 - fd2) <= 1e-6 * max(abs(d2), abs(d1) / x, dist.pdf(x) / x ** 2), x


def test_second_difference_of_pdf():
    dist = Gamma(2.43, 1.0)
    for x in np.linspace(0.5, 6.0, 12):
        h = 1e-3
        fd = (dist.pdf(x + h) - 2.0 * dist.pdf(x) + dist.pdf(x - h)) / h ** 2
        assert fd == pytest.approx(dist.pdf_second_derivative(x), rel=1e-5, abs=1e-7)


@pytest.mark.parametrize("alpha, beta", [(2.43, 1.0), (3.0, 0.5), (1.7, 2.0)])
def test_gamma_derivative_zero_at_mode(alpha, beta):
    assert Gamma(alpha, beta).pdf_derivative(beta * (alpha - 1.0)) == pytest.approx(0.0, abs=1e-15)


def test_gamma2_second_derivative_zero_at_two():
    # f(x) = x e^-x, f''(x) = e^-x (x - 2)
    d = Gamma(2.0, 1.0)
    assert d.pdf_second_derivative(2.0) == pytest.approx(0.0, abs=1e-15)
    assert d.pdf_second_derivative(1.0) == pytest.approx(-math.exp(-1.0), rel=1e-12)


def test_maxwell_second_derivative_has_two_sign_changes():
    d = Maxwell(2.0)
    xs = np.linspace(0.01, d.quantile(0.99), 2000)
    signs = np.sign([d.pdf_second_derivative(x) for x in xs])
    assert int(np.count_nonzero(np.diff(signs))) == 2


@pytest.mark.parametrize("dist", [Gamma(2.43, 1.0), Weibull(4.0), Maxwell(2.0)], ids=lambda d: d.label)
@pytest.mark.parametrize("fn", [pdf, pdf_derivative, pdf_second_derivative])
def test_rejects_nonpositive_x(dist, fn):
    with pytest.raises(DomainError):
        fn(dist, 0.0)
    with pytest.raises(DomainError):
        fn(dist, -1.0)


def test_quantiles():
    assert quantile(Weibull(4.0), 1.0 - math.exp(-1.0)) == pytest.approx(1.0, rel=1e-14)
    for dist in ALL:
        assert dist.quantile(0.9) > dist.quantile(0.5)
        for p in [1e-6, 0.5, 0.9, 1.0 - 1e-9]:
            x = dist.quantile(p)
            assert dist.cdf(x) == pytest.approx(p, abs=1e-9)
            if p > 0.5:
                assert dist.survival(x) == pytest.approx(1.0 - p, rel=1e-6)
    with pytest.raises(DomainError):
        quantile(Gamma(2.43, 1.0), 1.0)
    with pytest.raises(DomainError):
        quantile(Gamma(2.43, 1.0), 0.0)


def test_integration_domain():
    lo, hi = integration_domain(Gamma(2.43, 1.0))
    assert lo == 1e-6
    assert Gamma(2.43, 1.0).survival(hi) == pytest.approx(1e-9, rel=1e-6)


def test_invalid_parameters():
    for bad in [lambda: Gamma(0.0, 1.0), lambda: Gamma(1.0, -1.0), lambda: Weibull(0.0), lambda: Maxwell(-2.0)]:
        with pytest.raises(DomainError):
            bad()


@pytest.mark.parametrize("text, expected", [
    ("gamma:2.43,1", Gamma(2.43, 1.0)),
    ("gamma:3", Gamma(3.0, 1.0)),
    ("Weibull:4", Weibull(4.0)),
    (" maxwell:2 ", Maxwell(2.0)),
])
def test_parse_distribution(text, expected):
    assert parse_distribution(text) == expected


@pytest.mark.parametrize("text", ["cauchy:1", "gamma:", "gamma:a,b", "maxwell:1,2", "weibull:-4"])
def test_parse_distribution_errors(text):
    with pytest.raises(ConfigError) as info:
        parse_distribution(text, key="distributions")
    assert info.value.key == "distributions"


def test_labels_round_trip():
    for d in STUDY_DISTRIBUTIONS:
        assert parse_distribution(d.spec) == d
    assert Gamma(2.43, 1.0).label == "gamma(2.43,1)"


def test_sampler_is_deterministic():
    a = sample(Gamma(2.43, 1.0), 50, seed=7)
    b = sample(Gamma(2.43, 1.0), 50, seed=7)
    c = sample(Gamma(2.43, 1.0), 50, seed=8)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)
    assert a.seed_info == {"generator": "iid", "distribution": "gamma:2.43,1", "seed": 7}


@pytest.mark.parametrize("dist", ALL, ids=ids)
def test_sampler_mean(dist):
    s = sample(dist, 100_000, seed=1234)
    se = math.sqrt(dist.variance / s.n)
    assert float(np.mean(s.values)) == pytest.approx(dist.mean, abs=4.0 * se)
    assert np.all(s.values > 0.0)


@pytest.mark.parametrize("dist", ALL, ids=ids)
def test_sampler_ks(dist):
    s = sample(dist, 20_000, seed=99)
    assert ks_statistic(s.values, dist) < 0.015


@pytest.mark.parametrize("dist", ALL, ids=ids)
def test_log_spread(dist):
    s = sample(dist, 100_000, seed=77)
    assert float(np.std(np.log(s.values))) == pytest.approx(dist.log_spread, rel=0.02)


def test_sample_size_must_be_positive():
    with pytest.raises(DomainError):
        sample(Maxwell(2.0), 0, seed=1)
