"""Moment estimators and validation of the samplers against closed forms."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .ou import OUVGParams, TimeGrid, simulate_skeleton, theoretical_moments

STATS = ("mean", "variance", "skewness", "kurtosis")
DEFAULT_THRESHOLD = 4.0
BOOTSTRAP_RESAMPLES = 200


@dataclass(frozen=True)
class SampleMoments:
    """Estimates and standard errors, in :data:`STATS` order.

    Skewness and kurtosis are NaN for a zero-variance sample; ``defined`` is
    then False.
    """

    values: tuple
    stderr: tuple
    n: int

    @property
    def mean(self):
        return self.values[0]

    @property
    def variance(self):
        return self.values[1]

    @property
    def skewness(self):
        return self.values[2]

    @property
    def kurtosis(self):
        return self.values[3]

    @property
    def defined(self) -> bool:
        return not math.isnan(self.values[2])


def _shape_stats(weights, powers, n):
    """Standardised skewness and kurtosis from weighted power sums of centred data."""
    s1, s2, s3, s4 = (weights @ p for p in powers)
    m = s1 / n
    c2 = s2 / n - m * m
    c3 = s3 / n - 3 * m * s2 / n + 2 * m ** 3
    c4 = s4 / n - 4 * m * s3 / n + 6 * m * m * s2 / n - 3 * m ** 4
    return c3 / c2 ** 1.5, c4 / c2 ** 2


def sample_moments(values, bootstrap: int = BOOTSTRAP_RESAMPLES, seed: int = 0) -> SampleMoments:
    """Mean, unbiased variance, skewness and kurtosis (not excess) with standard errors.

    The mean and variance errors are the usual plug-in ones; the skewness and
    kurtosis errors come from a nonparametric bootstrap with ``bootstrap``
    resamples drawn from a generator seeded with ``seed``.
    """
    # sorted so that every estimate is a function of the multiset of values only
    x = np.sort(np.asarray(values, dtype=float).ravel())
    n = x.size
    if n < 8:
        raise DomainError(f"need at least 8 observations, got {n}")
    mean = float(np.mean(x))
    d = x - mean
    d2 = d * d
    m2 = float(np.mean(d2))
    m4 = float(np.mean(d2 * d2))
    var = m2 * n / (n - 1)
    se_mean = math.sqrt(var / n)
    se_var = math.sqrt(max(m4 - m2 * m2, 0.0) / n)
    if m2 <= 1e-300 or var <= 1e-28 * mean * mean:
        return SampleMoments((mean, var, math.nan, math.nan), (se_mean, se_var, math.nan, math.nan), n)
    skew = float(np.mean(d2 * d)) / m2 ** 1.5
    kurt = m4 / m2 ** 2
    powers = (d, d2, d2 * d, d2 * d2)
    rng = np.random.Generator(np.random.Philox(seed))
    boot = np.empty((bootstrap, 2))
    for b in range(bootstrap):
        counts = np.bincount(rng.integers(0, n, n), minlength=n).astype(float)
        boot[b] = _shape_stats(counts, powers, n)
    se_skew, se_kurt = boot.std(axis=0, ddof=1)
    return SampleMoments((mean, var, skew, kurt), (se_mean, se_var, float(se_skew), float(se_kurt)), n)


@dataclass(frozen=True)
class MomentReport:
    estimated: tuple
    stderr: tuple
    theoretical: tuple
    z_scores: tuple
    cpu_seconds: float
    n_paths: int
    threshold: float = DEFAULT_THRESHOLD

    @property
    def passed(self) -> bool:
        return all(abs(z) < self.threshold for z in self.z_scores if not math.isnan(z))

    def rows(self):
        return list(zip(STATS, self.estimated, self.stderr, self.theoretical, self.z_scores))

    def to_text(self) -> str:
        lines = [f"n_paths = {self.n_paths}   cpu = {self.cpu_seconds:.3f}s"]
        lines.append(f"{'stat':<10}{'estimated':>14}{'stderr':>12}{'theoretical':>14}{'z':>9}")
        for stat, est, se, th, z in self.rows():
            flag = "" if math.isnan(z) or abs(z) < self.threshold else "  FAIL"
            lines.append(f"{stat:<10}{est:>14.6g}{se:>12.3g}{th:>14.6g}{z:>9.3f}{flag}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def z_score(estimate, stderr, target):
    if math.isnan(estimate) or math.isnan(target):
        return math.nan
    if stderr == 0:
        return 0.0 if estimate == target else math.copysign(math.inf, estimate - target)
    return (estimate - target) / stderr


def compare_moments(moments: SampleMoments, theoretical, cpu_seconds=0.0, threshold=DEFAULT_THRESHOLD):
    z = tuple(z_score(e, s, t) for e, s, t in zip(moments.values, moments.stderr, theoretical))
    return MomentReport(
        estimated=moments.values,
        stderr=moments.stderr,
        theoretical=tuple(theoretical),
        z_scores=z,
        cpu_seconds=cpu_seconds,
        n_paths=moments.n,
        threshold=threshold,
    )


def validate_ouvg(
    params: OUVGParams,
    dt: float,
    n_steps: int,
    n_paths: int,
    seed: int,
    symmetric: bool = False,
    threads=None,
    threshold: float = DEFAULT_THRESHOLD,
    bootstrap: int = BOOTSTRAP_RESAMPLES,
) -> MomentReport:
    """Simulate to ``T = n_steps * dt`` and compare terminal moments with the closed forms."""
    if int(n_steps) < 1:
        raise DomainError(f"n_steps must be >= 1, got {n_steps!r}")
    grid = TimeGrid.uniform(dt * n_steps, n_steps)
    start = time.process_time()
    paths = simulate_skeleton(params, grid, n_paths, seed, symmetric=symmetric, threads=threads)
    cpu = time.process_time() - start
    moments = sample_moments(paths.values[:, -1], bootstrap=bootstrap, seed=seed)
    target = theoretical_moments(params, params.x0, grid.t[-1])
    return compare_moments(moments, target, cpu, threshold)


def empirical_log_mgf(values, u: float):
    """``log mean(exp(u x))`` and its delta-method standard error."""
    x = np.asarray(values, dtype=float).ravel()
    if u == 0:
        return 0.0, 0.0
    with np.errstate(over="raise"):
        try:
            e = np.exp(u * x)
        except FloatingPointError:
            raise OverflowError(f"exp(u x) overflows at u = {u!r}") from None
    m = float(np.mean(e))
    if not math.isfinite(m) or m <= 0:
        raise OverflowError(f"empirical MGF not finite at u = {u!r}")
    se = float(np.std(e, ddof=1)) / (math.sqrt(x.size) * m)
    return math.log(m), se
