"""Exception types shared across the estimation toolkit.

Bad input raises a ``ValueError`` subclass, a numerical or generation failure
raises a ``RuntimeError`` subclass. The CLI relies on that split for exit codes.
"""
from __future__ import annotations

from typing import Optional


class DomainError(ValueError):
    """Argument outside the mathematical domain of a function."""


class SampleError(ValueError):
    """Sample could not be ingested or used (empty, nonpositive, unparsable)."""


class DegenerateSampleError(SampleError):
    """Sample has zero variance, so no reference density can be fitted."""


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


class DivergedFunctionalError(RuntimeError):
    """A density functional integral diverged or its quadrature did not converge."""


class GenerationError(RuntimeError):
    """A generated chain violated its positivity contract."""


class StudyError(RuntimeError):
    def __init__(self, message: str, seed: int, distribution: str = "", n: Optional[int] = None):
        super().__init__(f"{message} (distribution={distribution}, n={n}, seed={seed})")
        self.seed = seed
        self.distribution = distribution
        self.n = n
