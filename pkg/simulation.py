"""Dependent-data generators, the error metric m and the replication study.

Generators:
    mh_chain(cfg, n)   Metropolis-Hastings chain with a reference stationary law
    ar1_chain(cfg, n)  X_i = ρ X_{i-1} + ε_i with i.i.d. positive noise

Every replication of a study draws from its own seed, derived from the study
seed and the (distribution, size, mode, replication) indices, so a failing
replication can be regenerated from the seed it reports and parallel runs
reproduce serial ones bit for bit.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats

from bandwidth import Bandwidth, BandwidthLaw, select_bandwidth
from distributions import STUDY_DISTRIBUTIONS, ReferenceDistribution, parse_distribution, sample
from errors import ConfigError, DomainError, GenerationError, StudyError
from estimator import (
    DEFAULT_GRID_POINTS,
    Estimand,
    EvalGrid,
    Sample,
    SampleMode,
    default_grid,
    estimate_values,
)
from prng import PhiloxStream, derive_seed

logger = logging.getLogger(__name__)

DEFAULT_SEED = 20140
DEFAULT_SIZES: Tuple[int, ...] = (100, 500, 1000, 2000)
DEFAULT_REPLICATIONS = 100
REFERENCE_RUN = 200_000
# default MH proposal half-width, in units of the target's ln-scale standard deviation
MH_STEP_SCALE = 2.5

_trapezoid = getattr(np, "trapezoid", None) or np.trapz


class DataMode(str, Enum):
    IID = "iid"
    MH = "mh"


# Position in this tuple is the mode's index in the seed derivation path
_MODE_ORDER: Tuple[DataMode, ...] = (DataMode.IID, DataMode.MH)


def _check_burn_in(burn_in: int) -> None:
    if int(burn_in) != burn_in or burn_in < 0:
        raise DomainError(f"burn_in must be a nonnegative integer, got {burn_in!r}")


def default_proposal_step(target: ReferenceDistribution) -> float:
    return MH_STEP_SCALE * target.log_spread


@dataclass(frozen=True)
class MHConfig:
    """``proposal_step=None`` scales the step to the target (see default_proposal_step)."""

    target: ReferenceDistribution
    proposal_step: Optional[float] = None
    burn_in: int = 1000
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.proposal_step is not None and not (
                math.isfinite(self.proposal_step) and self.proposal_step > 0.0):
            raise DomainError(f"proposal_step must be > 0, got {self.proposal_step!r}")
        _check_burn_in(self.burn_in)

    @property
    def step(self) -> float:
        if self.proposal_step is None:
            return default_proposal_step(self.target)
        return self.proposal_step


@dataclass(frozen=True)
class AR1Config:
    rho_ar: float
    noise: ReferenceDistribution
    burn_in: int = 1000
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if not (math.isfinite(self.rho_ar) and abs(self.rho_ar) < 1.0):
            raise DomainError(f"AR coefficient must satisfy |rho| < 1, got {self.rho_ar!r}")
        _check_burn_in(self.burn_in)


@dataclass(frozen=True)
class StudyConfig:
    distributions: Tuple[ReferenceDistribution, ...] = STUDY_DISTRIBUTIONS
    sizes: Tuple[int, ...] = DEFAULT_SIZES
    replications: int = DEFAULT_REPLICATIONS
    modes: Tuple[DataMode, ...] = (DataMode.IID,)
    seed: int = DEFAULT_SEED
    proposal_step: Optional[float] = None
    burn_in: int = 1000
    law: BandwidthLaw = BandwidthLaw.DERIVATIVE
    grid_points: int = DEFAULT_GRID_POINTS
    workers: int = 1

    def __post_init__(self):
        if not self.distributions:
            raise ConfigError("distributions", "at least one distribution is required")
        if not self.sizes:
            raise ConfigError("sizes", "at least one sample size is required")
        if any(int(n) != n or n < 2 for n in self.sizes):
            raise ConfigError("sizes", f"sample sizes must be integers >= 2, got {list(self.sizes)}")
        if self.replications < 1:
            raise ConfigError("replications", f"must be >= 1, got {self.replications}")
        if not self.modes:
            raise ConfigError("mode", "at least one data mode is required")
        if self.proposal_step is not None and not (
                math.isfinite(self.proposal_step) and self.proposal_step > 0.0):
            raise ConfigError("proposal_step", f"must be > 0, got {self.proposal_step}")
        if self.burn_in < 0:
            raise ConfigError("burn_in", f"must be >= 0, got {self.burn_in}")
        if self.grid_points < 2:
            raise ConfigError("grid_points", f"must be >= 2, got {self.grid_points}")
        if self.workers < 1:
            raise ConfigError("workers", f"must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class ErrorSummary:
    distribution: str
    n: int
    mode: DataMode
    mean_m: float
    std_m: float


@dataclass(frozen=True, eq=False)
class Curve:
    """Reference curve and estimate on a common grid, ready for plotting."""

    x: np.ndarray
    reference: np.ndarray
    estimate: np.ndarray
    reference_name: str
    bandwidth: float


# --- generators -------------------------------------------------------------

def mh_chain(cfg: MHConfig, n: int) -> Sample:
    """Random-walk Metropolis-Hastings on ln x.

    The proposal is X' = X e^ζ with ζ ~ U[-step, step], step defaulting to
    MH_STEP_SCALE times the ln-scale spread of the target; the Jacobian of the
    multiplicative move turns the acceptance ratio into π(X')X' / (π(X)X).
    The chain starts at the target mean.
    """
    if n < 1:
        raise DomainError(f"chain length must be >= 1, got {n}")
    steps = cfg.burn_in + n
    stream = PhiloxStream(cfg.seed)
    step = cfg.step
    zeta = step * (2.0 * stream.uniforms(steps) - 1.0)
    log_u = np.log(stream.uniforms(steps))

    target = cfg.target
    x = target.mean
    log_p = target.logpdf(x) + math.log(x)
    chain = np.empty(steps, dtype=np.float64)
    accepted = 0
    for i in range(steps):
        proposal = x * math.exp(zeta[i])
        log_q = target.logpdf(proposal) + math.log(proposal)
        if log_u[i] < log_q - log_p:
            x, log_p = proposal, log_q
            accepted += 1
        chain[i] = x
    rate = accepted / steps
    logger.debug("MH %s: acceptance rate %.3f over %d steps", target.label, rate, steps)
    return Sample(chain[cfg.burn_in:], SampleMode.DEPENDENT, {
        "generator": "mh",
        "distribution": target.spec,
        "seed": cfg.seed,
        "proposal_step": step,
        "burn_in": cfg.burn_in,
        "acceptance_rate": rate,
    })


def ar1_chain(cfg: AR1Config, n: int) -> Sample:
    """AR(1) chain started at the noise mean; the first ``burn_in`` values are dropped."""
    if n < 1:
        raise DomainError(f"chain length must be >= 1, got {n}")
    steps = cfg.burn_in + n
    eps = cfg.noise.draw(steps, PhiloxStream(cfg.seed))
    chain = np.empty(steps, dtype=np.float64)
    x = cfg.noise.mean
    rho = cfg.rho_ar
    for i in range(steps):
        x = rho * x + eps[i]
        chain[i] = x
    values = chain[cfg.burn_in:]
    bad = np.flatnonzero(values <= 0.0)
    if bad.size:
        raise GenerationError(
            f"AR(1) chain with rho={rho} produced a nonpositive value at index {int(bad[0])}; "
            f"use rho >= 0 with positive noise"
        )
    return Sample(values, SampleMode.DEPENDENT, {
        "generator": "ar1",
        "rho": rho,
        "noise": cfg.noise.spec,
        "seed": cfg.seed,
        "burn_in": cfg.burn_in,
    })


# --- error metric -----------------------------------------------------------

def integrated_squared_error(x: np.ndarray, truth: np.ndarray, estimate: np.ndarray) -> float:
    diff = np.asarray(truth, dtype=np.float64) - np.asarray(estimate, dtype=np.float64)
    return float(_trapezoid(diff * diff, np.asarray(x, dtype=np.float64)))


def _bandwidth_value(b: Union[Bandwidth, float]) -> float:
    return b.value if isinstance(b, Bandwidth) else float(b)


def true_values(dist: ReferenceDistribution, g: EvalGrid, which: Estimand = Estimand.DERIVATIVE) -> np.ndarray:
    fn = dist.pdf_derivative if Estimand(which) is Estimand.DERIVATIVE else dist.pdf
    return np.array([fn(float(x)) for x in g.points], dtype=np.float64)


def error_metric(dist: ReferenceDistribution, s: Sample, b: Union[Bandwidth, float], g: EvalGrid) -> float:
    """m = ∫ (f' - f̂')² dx by the trapezoid rule on the grid."""
    estimate = estimate_values(s, _bandwidth_value(b), g, Estimand.DERIVATIVE)
    return integrated_squared_error(g.points, true_values(dist, g), estimate)


def ks_statistic(values: Sequence[float], dist: ReferenceDistribution) -> float:
    """Kolmogorov-Smirnov distance between the empirical CDF of ``values`` and dist."""
    xs = np.asarray(values, dtype=np.float64)
    if xs.size == 0:
        raise DomainError("KS statistic of an empty sample")
    return float(stats.kstest(xs, np.vectorize(dist.cdf, otypes=[np.float64])).statistic)


# --- curves -----------------------------------------------------------------

def curve_for_distribution(dist: ReferenceDistribution, s: Sample, b: Union[Bandwidth, float], g: EvalGrid,
                           which: Estimand = Estimand.DERIVATIVE) -> Curve:
    value = _bandwidth_value(b)
    return Curve(
        x=g.points,
        reference=true_values(dist, g, which),
        estimate=estimate_values(s, value, g, which),
        reference_name="true",
        bandwidth=value,
    )


def histogram_on_grid(values: np.ndarray, g: EvalGrid, bins: int = 100) -> np.ndarray:
    """Density histogram of ``values`` over the grid range, read off at each grid point."""
    edges = np.linspace(g.lower_cut, g.upper_cut, bins + 1)
    counts, _ = np.histogram(values, bins=edges)
    density = counts / (values.size * np.diff(edges))
    idx = np.clip(np.searchsorted(edges, g.points, side="right") - 1, 0, bins - 1)
    return density[idx]


def ar1_overlay(cfg: AR1Config, n: int, long_run: int = REFERENCE_RUN,
                law: BandwidthLaw = BandwidthLaw.DERIVATIVE, grid_points: int = DEFAULT_GRID_POINTS,
                which: Estimand = Estimand.DENSITY, bandwidth: Optional[float] = None) -> Curve:
    """Estimate from an n-long chain against a histogram of an independent long chain.

    The stationary pdf of an AR(1) chain has no closed form, so the histogram
    of ``long_run`` observations stands in for it.
    """
    s = ar1_chain(cfg, n)
    reference_chain = ar1_chain(replace(cfg, seed=derive_seed(cfg.seed, 1)), long_run)
    b = select_bandwidth(s, law).value if bandwidth is None else float(bandwidth)
    g = default_grid(s, grid_points)
    return Curve(
        x=g.points,
        reference=histogram_on_grid(reference_chain.values, g),
        estimate=estimate_values(s, b, g, which),
        reference_name="histogram",
        bandwidth=b,
    )


# --- replication study ------------------------------------------------------

@dataclass(frozen=True)
class _Replication:
    dist: ReferenceDistribution
    n: int
    mode: DataMode
    seed: int
    proposal_step: Optional[float]
    burn_in: int
    law: BandwidthLaw
    grid_points: int


def generate(task: _Replication) -> Sample:
    if task.mode is DataMode.IID:
        return sample(task.dist, task.n, task.seed)
    return mh_chain(MHConfig(task.dist, task.proposal_step, task.burn_in, task.seed), task.n)


def run_replication(task: _Replication) -> float:
    s = generate(task)
    b = select_bandwidth(s, task.law)
    g = default_grid(s, task.grid_points)
    return error_metric(task.dist, s, b, g)


def _summarize(label: str, n: int, mode: DataMode, ms: List[float]) -> ErrorSummary:
    mean = math.fsum(ms) / len(ms)
    if len(ms) > 1:
        std = math.sqrt(math.fsum((m - mean) ** 2 for m in ms) / (len(ms) - 1))
    else:
        std = 0.0
    return ErrorSummary(label, n, mode, mean, std)


def _cells(cfg: StudyConfig) -> List[Tuple[ReferenceDistribution, int, DataMode, List[_Replication]]]:
    cells = []
    for d_idx, dist in enumerate(cfg.distributions):
        for s_idx, n in enumerate(cfg.sizes):
            for mode in cfg.modes:
                m_idx = _MODE_ORDER.index(DataMode(mode))
                tasks = [
                    _Replication(dist, int(n), DataMode(mode), derive_seed(cfg.seed, d_idx, s_idx, m_idx, r),
                                 cfg.proposal_step, cfg.burn_in, BandwidthLaw(cfg.law), cfg.grid_points)
                    for r in range(cfg.replications)
                ]
                cells.append((dist, int(n), DataMode(mode), tasks))
    return cells


def _fail(task: _Replication, index: int, exc: BaseException) -> StudyError:
    logger.error("replication %d of %s n=%d (%s) failed; seed=%d: %s",
                 index, task.dist.label, task.n, task.mode.value, task.seed, exc)
    return StudyError(f"replication {index} failed: {exc}", task.seed, task.dist.label, task.n)


def replication_study(cfg: StudyConfig) -> List[ErrorSummary]:
    """Mean and standard deviation of m per (distribution, n, mode) cell, in config order."""
    cells = _cells(cfg)
    results: Dict[int, List[float]] = {}
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [[pool.submit(run_replication, t) for t in tasks] for _, _, _, tasks in cells]
            for c, (_, _, _, tasks) in enumerate(cells):
                ms = []
                for r, fut in enumerate(futures[c]):
                    try:
                        ms.append(fut.result())
                    except (ValueError, RuntimeError) as e:
                        for pending in (f for row in futures for f in row):
                            pending.cancel()
                        raise _fail(tasks[r], r, e) from e
                results[c] = ms
    else:
        for c, (_, _, _, tasks) in enumerate(cells):
            ms = []
            for r, task in enumerate(tasks):
                try:
                    ms.append(run_replication(task))
                except (ValueError, RuntimeError) as e:
                    raise _fail(task, r, e) from e
            results[c] = ms

    summaries = []
    for c, (dist, n, mode, _) in enumerate(cells):
        summary = _summarize(dist.label, n, mode, results[c])
        logger.info("%s n=%d %s: mean m=%.6g std m=%.6g", summary.distribution, n, mode.value,
                    summary.mean_m, summary.std_m)
        summaries.append(summary)
    return summaries


# --- study config -----------------------------------------------------------

def _parse_int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(key, f"expected an integer, got {value!r}") from None


def _parse_float(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(key, f"expected a number, got {value!r}") from None


def _parse_modes(value: str) -> Tuple[DataMode, ...]:
    modes = []
    for item in value.split(","):
        item = item.strip().lower()
        try:
            modes.append(DataMode(item))
        except ValueError:
            raise ConfigError("mode", f"unknown mode {item!r}; expected iid, mh or iid,mh") from None
    return tuple(modes)


def _parse_law(value: str) -> BandwidthLaw:
    try:
        return BandwidthLaw(value.strip().lower())
    except ValueError:
        raise ConfigError("law", f"unknown law {value!r}; expected derivative or pdf") from None


_CONFIG_KEYS = {
    "distributions": lambda v: tuple(parse_distribution(d, "distributions") for d in v.split(";") if d.strip()),
    "sizes": lambda v: tuple(_parse_int("sizes", x.strip()) for x in v.split(",") if x.strip()),
    "replications": lambda v: _parse_int("replications", v),
    "mode": _parse_modes,
    "seed": lambda v: _parse_int("seed", v),
    "proposal_step": lambda v: _parse_float("proposal_step", v),
    "burn_in": lambda v: _parse_int("burn_in", v),
    "law": _parse_law,
    "grid_points": lambda v: _parse_int("grid_points", v),
    "workers": lambda v: _parse_int("workers", v),
}

# config key -> StudyConfig field
_FIELD_NAMES = {"mode": "modes"}


def parse_study_config(text: str, **overrides) -> StudyConfig:
    """Build a StudyConfig from ``key=value`` lines; ``#`` starts a comment.

    Keyword overrides (e.g. a seed from the command line) win over the file.
    """
    fields = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lower()
        if not sep:
            raise ConfigError(key or f"line {lineno}", f"line {lineno}: expected key=value")
        parser = _CONFIG_KEYS.get(key)
        if parser is None:
            raise ConfigError(key, f"unknown study config key (line {lineno})")
        fields[_FIELD_NAMES.get(key, key)] = parser(value.strip())
    fields.update({k: v for k, v in overrides.items() if v is not None})
    return StudyConfig(**fields)
