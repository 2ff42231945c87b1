"""Adaptive Simpson quadrature.

The density functionals and MISE integrands carry x^(-3/2), x^(-4) and
x^(-(υ+5)/2) factors concentrated at the origin. ``integrate_semi_axis``
therefore integrates the part below x = 1 in the variable u = ln x, where
those power laws become smooth exponentials, and the rest on the linear scale.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Tuple

logger = logging.getLogger(__name__)

Integrand = Callable[[float], float]


@dataclass
class QuadratureSettings:
    abs_tol: float = 1e-9
    rel_tol: float = 1e-7
    max_depth: int = 48
    panels: int = 8
    max_evaluations: int = 2_000_000


@dataclass
class QuadratureResult:
    value: float
    error: float
    evaluations: int
    converged: bool

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(
            value=self.value + other.value,
            error=self.error + other.error,
            evaluations=self.evaluations + other.evaluations,
            converged=self.converged and other.converged,
        )


DEFAULT_SETTINGS = QuadratureSettings()


def _simpson(fa: float, fm: float, fb: float, h: float) -> float:
    return h / 3.0 * (fa + 4.0 * fm + fb)


class _Integrator:
    def __init__(self, f: Integrand, settings: QuadratureSettings):
        self.f = f
        self.settings = settings
        self.evaluations = 0
        self.converged = True

    def __call__(self, x: float) -> float:
        self.evaluations += 1
        return self.f(x)

    def adaptive(self, a: float, b: float, fa: float, fm: float, fb: float,
                 whole: float, tol: float, depth: int) -> Tuple[float, float]:
        m = 0.5 * (a + b)
        h = 0.5 * (b - a)
        flm = self(0.5 * (a + m))
        frm = self(0.5 * (m + b))
        left = _simpson(fa, flm, fm, 0.5 * h)
        right = _simpson(fm, frm, fb, 0.5 * h)
        combined = left + right
        err = (combined - whole) / 15.0
        if abs(err) <= tol:
            return combined + err, abs(err)
        if depth >= self.settings.max_depth or self.evaluations >= self.settings.max_evaluations:
            self.converged = False
            return combined + err, abs(err)
        lv, le = self.adaptive(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
        rv, re = self.adaptive(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)
        return lv + rv, le + re


def adaptive_simpson(f: Integrand, a: float, b: float,
                     settings: QuadratureSettings = DEFAULT_SETTINGS) -> QuadratureResult:
    """Integrate f over [a, b] to max(abs_tol, rel_tol·|I|).

    The interval is first cut into ``settings.panels`` equal panels whose
    coarse Simpson sum sets the relative tolerance scale; each panel is then
    refined recursively.
    """
    if a == b:
        return QuadratureResult(0.0, 0.0, 0, True)
    if a > b:
        res = adaptive_simpson(f, b, a, settings)
        return QuadratureResult(-res.value, res.error, res.evaluations, res.converged)

    integ = _Integrator(f, settings)
    edges = [a + (b - a) * k / settings.panels for k in range(settings.panels)] + [b]
    fvals = [integ(x) for x in edges]
    mids: List[Tuple[float, float]] = []
    coarse = 0.0
    for k in range(settings.panels):
        xm = 0.5 * (edges[k] + edges[k + 1])
        fm = integ(xm)
        whole = _simpson(fvals[k], fm, fvals[k + 1], 0.5 * (edges[k + 1] - edges[k]))
        mids.append((fm, whole))
        coarse += whole
    if not math.isfinite(coarse):
        return QuadratureResult(coarse, math.inf, integ.evaluations, False)

    tol = max(settings.abs_tol, settings.rel_tol * abs(coarse)) / settings.panels
    total = 0.0
    error = 0.0
    for k in range(settings.panels):
        fm, whole = mids[k]
        v, e = integ.adaptive(edges[k], edges[k + 1], fvals[k], fm, fvals[k + 1], whole, tol, 0)
        total += v
        error += e
    converged = integ.converged and math.isfinite(total)
    if not converged:
        logger.warning("adaptive Simpson did not converge on [%g, %g] (error %.3g)", a, b, error)
    return QuadratureResult(total, error, integ.evaluations, converged)


def integrate_semi_axis(f: Integrand, lower: float, upper: float,
                        settings: QuadratureSettings = DEFAULT_SETTINGS) -> QuadratureResult:
    """Integrate f over [lower, upper] ⊂ (0, ∞), in ln x below x = 1."""
    if lower <= 0.0:
        raise ValueError(f"integrate_semi_axis needs a positive lower limit, got {lower}")
    if upper <= lower:
        return QuadratureResult(0.0, 0.0, 0, True)

    result = QuadratureResult(0.0, 0.0, 0, True)
    split = min(1.0, upper)
    if lower < split:
        def in_log(u: float) -> float:
            x = math.exp(u)
            return f(x) * x
        result = result + adaptive_simpson(in_log, math.log(lower), math.log(split), settings)
    start = max(1.0, lower)
    if upper > start:
        result = result + adaptive_simpson(f, start, upper, settings)
    return result
