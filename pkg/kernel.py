"""Gamma kernel K_{ρ_b(x), b}(t), its shape parameter and its x-derivative.

K is the Gamma(ρ, b) density in the data argument t, anchored at the
evaluation point x through the two-branch shape

    ρ_b(x) = x / b                 if x >= 2b   (interior)
    ρ_b(x) = (x / (2b))^2 + 1      if 0 <= x < 2b (boundary)

All arithmetic is done on the log scale; only the final value is
exponentiated. The ``*_values`` functions evaluate one (x, b) against a whole
vector of observations and are what the estimators use.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from errors import DomainError
from special_math import digamma, ln_gamma

MAX_SHAPE = 1e8


class Branch(str, Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class ShapeParam:
    branch: Branch
    value: float


@dataclass(frozen=True)
class KernelPoint:
    x: float
    b: float
    t: float

    def __post_init__(self):
        _check_xb(self.x, self.b)
        if not math.isfinite(self.t) or self.t < 0.0:
            raise DomainError(f"kernel data argument must be >= 0, got t={self.t!r}")


def _check_xb(x: float, b: float) -> None:
    if not math.isfinite(b) or b <= 0.0:
        raise DomainError(f"bandwidth must be positive, got b={b!r}")
    if not math.isfinite(x) or x < 0.0:
        raise DomainError(f"evaluation point must be >= 0, got x={x!r}")


def shape_param(x: float, b: float) -> ShapeParam:
    _check_xb(x, b)
    if x >= 2.0 * b:
        shape = ShapeParam(Branch.INTERIOR, x / b)
    else:
        half = x / (2.0 * b)
        shape = ShapeParam(Branch.BOUNDARY, half * half + 1.0)
    if shape.value > MAX_SHAPE:
        raise DomainError(
            f"shape x/b = {shape.value:.3g} exceeds the supported maximum {MAX_SHAPE:.0e}"
        )
    return shape


def _as_data(t) -> np.ndarray:
    arr = np.asarray(t, dtype=np.float64)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0):
        raise DomainError("kernel data arguments must be finite and >= 0")
    return arr


def _log_kernel(shape: ShapeParam, b: float, t: np.ndarray) -> np.ndarray:
    rho = shape.value
    return (rho - 1.0) * np.log(t) - t / b - rho * math.log(b) - ln_gamma(rho)


def kernel_values(x: float, b: float, t) -> np.ndarray:
    """K_{ρ_b(x), b}(t) for every entry of t."""
    shape = shape_param(x, b)
    t = _as_data(t)
    out = np.zeros_like(t)
    pos = t > 0.0
    out[pos] = np.exp(_log_kernel(shape, b, t[pos]))
    if shape.value == 1.0:
        # Gamma(1, b) density at t = 0
        out[~pos] = 1.0 / b
    return out


def log_correction_values(x: float, b: float, t) -> np.ndarray:
    """L(t, x) = ln t - ln b - Ψ(ρ_b(x)); -inf at t = 0."""
    shape = shape_param(x, b)
    t = _as_data(t)
    with np.errstate(divide="ignore"):
        return np.log(t) - math.log(b) - digamma(shape.value)


def derivative_prefactor(x: float, b: float, shape: ShapeParam) -> float:
    if shape.branch is Branch.INTERIOR:
        return 1.0 / b
    return x / (2.0 * b * b)


def kernel_derivative_values(x: float, b: float, t) -> np.ndarray:
    """∂K_{ρ_b(x), b}(t)/∂x for every entry of t."""
    shape = shape_param(x, b)
    t = _as_data(t)
    out = np.zeros_like(t)
    pre = derivative_prefactor(x, b, shape)
    if pre == 0.0:
        return out
    pos = t > 0.0
    tp = t[pos]
    k = np.exp(_log_kernel(shape, b, tp))
    l = np.log(tp) - math.log(b) - digamma(shape.value)
    out[pos] = pre * k * l
    return out


def gamma_kernel(p: KernelPoint) -> float:
    return float(kernel_values(p.x, p.b, np.array([p.t]))[0])


def log_correction(p: KernelPoint) -> float:
    return float(log_correction_values(p.x, p.b, np.array([p.t]))[0])


def gamma_kernel_derivative(p: KernelPoint) -> float:
    return float(kernel_derivative_values(p.x, p.b, np.array([p.t]))[0])
