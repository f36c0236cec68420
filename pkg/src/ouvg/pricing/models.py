"""Risk-neutral spot models ``S(t) = F(0, t) exp(h(t) + factors)``.

The deterministic drift ``h`` is minus the cumulant of the factor sum at
``u = 1`` (increment part only), so ``E[S(t)] = F(0, t)`` whenever the factors
start at 0.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..ou import (
    BLOCK_SIZE,
    OUVGParams,
    PathSet,
    TimeGrid,
    increment_cumulant,
    iter_skeleton_blocks,
    map_blocks,
)
from ..sampling import RngStream
from ..special_functions import dilog
from ..vg import VGParams, simulate_vg_increment, vg_cumulant


@dataclass(frozen=True, eq=False)
class ForwardCurve:
    """Piecewise-linear forward curve ``t -> F(0, t)``, flat beyond its end points."""

    times: np.ndarray
    prices: np.ndarray

    def __post_init__(self):
        times = np.atleast_1d(np.asarray(self.times, dtype=float))
        prices = np.atleast_1d(np.asarray(self.prices, dtype=float))
        if times.shape != prices.shape or times.ndim != 1:
            raise DomainError("forward curve needs matching 1-d times and prices")
        if np.any(np.diff(times) <= 0):
            raise DomainError("forward curve times must be strictly increasing")
        if np.any(~(prices > 0)):
            raise DomainError("forward prices must be positive")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "prices", prices)

    @classmethod
    def flat(cls, level: float) -> "ForwardCurve":
        return cls(np.array([0.0]), np.array([float(level)]))

    def __call__(self, t):
        out = np.interp(t, self.times, self.prices)
        return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True, eq=False)
class SpotModel2F:
    """OU-VG factor ``X1`` plus an independent VG factor ``X2``."""

    curve: ForwardCurve
    ou: OUVGParams
    vg: VGParams

    def __post_init__(self):
        try:
            increment_cumulant(1.0, 1.0, self.ou)
            vg_cumulant(1.0, self.vg)
        except DomainError as exc:
            raise DomainError(f"u = 1 outside the MGF domain of the spot factors: {exc}") from None


@dataclass(frozen=True, eq=False)
class SpotModel1F:
    """Single OU-SVG factor with parameters ``(k, nu, sigma)``."""

    curve: ForwardCurve
    k: float
    nu: float
    sigma: float
    x0: float = 0.0

    def __post_init__(self):
        OUVGParams.from_values(self.k, 0.0, self.nu, self.sigma, self.x0)
        if not self.sigma ** 2 * self.nu / 2.0 < 1.0:
            raise DomainError("one-factor model needs sigma^2 nu / 2 < 1")

    @property
    def ou(self) -> OUVGParams:
        return OUVGParams.from_values(self.k, 0.0, self.nu, self.sigma, self.x0)


def drift_2f(t, model: SpotModel2F):
    """``h(t) = -kappa_X1(1, t) - t kappa_VG2(1)``."""
    t = np.asarray(t, dtype=float)
    out = -increment_cumulant(1.0, t, model.ou) - t * vg_cumulant(1.0, model.vg)
    return float(out) if np.ndim(out) == 0 else out


def drift_1f(t, model: SpotModel1F):
    """``h(t) = -(Li2(z) - Li2(z e^{-2kt})) / (2 k nu)`` with ``z = sigma^2 nu / 2``.

    The stationary cumulant of the symmetric factor depends on ``u^2``, so the
    decayed argument carries ``e^{-2kt}``.
    """
    t = np.asarray(t, dtype=float)
    z = model.sigma ** 2 * model.nu / 2.0
    out = -(dilog(z) - dilog(z * np.exp(-2.0 * model.k * t))) / (2.0 * model.k * model.nu)
    return float(out) if np.ndim(out) == 0 else out


def drift(t, model):
    if isinstance(model, SpotModel2F):
        return drift_2f(t, model)
    return drift_1f(t, model)


def spot_block_fn(model, grid: TimeGrid, seed: int):
    """``fn(block) -> (BLOCK_SIZE, M+1)`` spot values, for :func:`ouvg.ou.map_blocks`."""
    level = np.asarray(model.curve(grid.t)) * np.exp(drift(grid.t, model))
    dts = grid.dt
    if isinstance(model, SpotModel2F):
        x1_fn = iter_skeleton_blocks(model.ou, grid, seed, symmetric=False, factor=0)

        def fn(b):
            x = x1_fn(b)
            stream = RngStream(seed, (1, b))
            incr = simulate_vg_increment(dts, model.vg, stream, size=(BLOCK_SIZE, dts.size))
            x[:, 1:] += np.cumsum(incr, axis=1)
            return level * np.exp(x)
    else:
        x_fn = iter_skeleton_blocks(model.ou, grid, seed, symmetric=True, factor=0)

        def fn(b):
            return level * np.exp(x_fn(b))
    return fn


def simulate_spot_paths(model, grid: TimeGrid, n_paths: int, seed: int, threads=None) -> PathSet:
    """Spot price paths; the two factors of the 2F model use independent streams."""
    if int(n_paths) < 1:
        raise DomainError(f"n_paths must be positive, got {n_paths!r}")
    start = time.process_time()
    blocks = map_blocks(spot_block_fn(model, grid, seed), n_paths, threads)
    values = np.concatenate(blocks)[: int(n_paths)]
    values.setflags(write=False)
    return PathSet(values, grid, int(seed), extra={"cpu_seconds": time.process_time() - start})


@dataclass(frozen=True)
class PriceResult:
    price: float
    stdev: float
    error: float
    cpu_seconds: float
    cpu_paths_seconds: float
    n_paths: int

    @classmethod
    def from_samples(cls, samples, cpu_seconds, cpu_paths_seconds) -> "PriceResult":
        samples = np.asarray(samples, dtype=float)
        n = samples.size
        stdev = float(np.std(samples, ddof=1)) if n > 1 else 0.0
        return cls(
            price=float(np.mean(samples)),
            stdev=stdev,
            error=stdev / math.sqrt(n),
            cpu_seconds=cpu_seconds,
            cpu_paths_seconds=cpu_paths_seconds,
            n_paths=n,
        )
