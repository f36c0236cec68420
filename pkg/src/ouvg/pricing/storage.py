"""Gas storage valuation by Least-Squares Monte Carlo on a volume grid.

Each day the holder injects (regime -1), does nothing (0) or withdraws (1).
Continuation values are regressed per date and per volume level on
polynomials in ``log(S / F(0, t))``; the realised cash flows of the resulting
policy along the simulated paths give the value estimate.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numba
import numpy as np

from ..errors import DomainError
from ..ou import TimeGrid
from .models import ForwardCurve, PriceResult, SpotModel1F, simulate_spot_paths

PENALTIES = ("shortfall", "none")
# a regime must beat the current best by more than rounding to be chosen
TIE_TOL = 1e-12


@dataclass(frozen=True)
class StorageSpec:
    """Capacity, rates, costs and terminal rule of a storage contract.

    ``penalty = "shortfall"`` charges ``penalty_coeff * S(T) * max(c0 - C(T), 0)``
    at maturity; ``"none"`` sets the terminal value to 0.
    """

    c_min: float = 0.0
    c_max: float = 1.0
    a_in: float = 0.05
    a_w: float = 0.05
    k_in: float = 0.01
    k_out: float = 0.01
    k_n: float = 0.0
    penalty: str = "shortfall"
    penalty_coeff: float = 1.0
    volume_grid_steps: int = 100
    c0: float = 0.0

    def __post_init__(self):
        if not self.c_min < self.c_max:
            raise DomainError("need c_min < c_max")
        if not self.c_min <= self.c0 <= self.c_max:
            raise DomainError("initial volume c0 must lie in [c_min, c_max]")
        if not (self.a_in > 0 and self.a_w > 0):
            raise DomainError("injection and withdrawal rates must be positive")
        span = self.c_max - self.c_min
        if self.a_in > span or self.a_w > span:
            raise DomainError("injection/withdrawal rate exceeds the capacity range")
        if min(self.k_in, self.k_out, self.k_n, self.penalty_coeff) < 0:
            raise DomainError("costs and penalty coefficient must be non-negative")
        if self.penalty not in PENALTIES:
            raise DomainError(f"penalty must be one of {PENALTIES}, got {self.penalty!r}")
        if int(self.volume_grid_steps) < 1:
            raise DomainError("volume_grid_steps must be >= 1")
        spacing = span / self.volume_grid_steps
        if self.a_in < spacing / 2 or self.a_w < spacing / 2:
            raise DomainError("rates smaller than half a volume step never move the volume")

    @property
    def levels(self) -> np.ndarray:
        return np.linspace(self.c_min, self.c_max, int(self.volume_grid_steps) + 1)

    def snap(self, c):
        """Index of the volume level nearest to ``c``."""
        spacing = (self.c_max - self.c_min) / self.volume_grid_steps
        idx = np.rint((np.asarray(c) - self.c_min) / spacing).astype(int)
        return np.clip(idx, 0, int(self.volume_grid_steps))

    def terminal_value(self, spot, levels=None):
        """``q(S(T), C(T))`` for every path (rows) and volume level (columns)."""
        levels = self.levels if levels is None else levels
        spot = np.asarray(spot, dtype=float)
        if self.penalty == "none":
            return np.zeros((spot.size, levels.size))
        shortfall = np.maximum(self.c0 - levels, 0.0)
        return -self.penalty_coeff * np.outer(spot, shortfall)


@dataclass(frozen=True)
class _Transitions:
    to_in: np.ndarray
    frac_in: np.ndarray
    ok_in: np.ndarray
    to_w: np.ndarray
    frac_w: np.ndarray
    ok_w: np.ndarray


def _transitions(spec: StorageSpec) -> _Transitions:
    # cash flows are pro-rated by the volume actually moved at the bounds
    levels = spec.levels
    to_in = spec.snap(np.minimum(levels + spec.a_in, spec.c_max))
    to_w = spec.snap(np.maximum(levels - spec.a_w, spec.c_min))
    frac_in = (levels[to_in] - levels) / spec.a_in
    frac_w = (levels - levels[to_w]) / spec.a_w
    return _Transitions(to_in, frac_in, to_in != np.arange(levels.size),
                        to_w, frac_w, to_w != np.arange(levels.size))


@numba.njit(cache=True)
def _step(cont, value, spot, in_cost, out_cost, k_n, to_in, frac_in, ok_in, to_w, frac_w, ok_w):
    """Pick the regime maximising cash flow plus continuation; return realised values.

    ``cont`` and ``value`` are ``(levels, paths)``.  Ties, up to rounding
    (``TIE_TOL`` relative), go to doing nothing.
    """
    n_levels, n_paths = value.shape
    out = np.empty_like(value)
    for g in range(n_levels):
        gi = to_in[g]
        gw = to_w[g]
        for n in range(n_paths):
            best = cont[g, n] - k_n
            res = value[g, n] - k_n
            tol = TIE_TOL * (abs(best) + abs(spot[n]))
            if ok_in[g]:
                flow = -(spot[n] + in_cost) * frac_in[g]
                total = cont[gi, n] + flow
                if total > best + tol:
                    best = total
                    res = value[gi, n] + flow
            if ok_w[g]:
                flow = (spot[n] - out_cost) * frac_w[g]
                total = cont[gw, n] + flow
                if total > best + tol:
                    best = total
                    res = value[gw, n] + flow
            out[g, n] = res
    return out


def _continuation(x, value, degree):
    """Least-squares projection of ``value`` (levels x paths) on polynomials in ``x``."""
    spread = np.std(x)
    if not spread > 1e-12 * max(1.0, abs(float(np.mean(x)))):
        return np.repeat(value.mean(axis=1, keepdims=True), value.shape[1], axis=1)
    z = (x - x.mean()) / spread
    q, _ = np.linalg.qr(np.vander(z, degree + 1, increasing=True))
    return (value @ q) @ q.T


def price_storage(
    model: SpotModel1F,
    spec: StorageSpec,
    grid: TimeGrid,
    n_paths: int,
    seed: int,
    threads=None,
    regression: bool = True,
    degree: int = 3,
) -> PriceResult:
    """LSMC value of the storage at ``(t0, S(t0), c0)``.

    Decisions are taken at every grid date but the last, where the terminal
    rule applies.  With ``regression=False`` the continuation estimate is 0
    before the final decision date, which gives a myopic lower bound.
    """
    if int(n_paths) < 2:
        raise DomainError(f"n_paths must be at least 2, got {n_paths!r}")
    start = time.process_time()
    paths = simulate_spot_paths(model, grid, n_paths, seed, threads)
    cpu_paths = paths.extra["cpu_seconds"]
    spot = paths.values
    spot_t = np.ascontiguousarray(spot.T)
    forward = np.asarray(model.curve(grid.t), dtype=float)
    tr = _transitions(spec)
    value = np.ascontiguousarray(spec.terminal_value(spot[:, -1]).T)
    last = grid.n_steps - 1
    for i in range(last, -1, -1):
        if regression or i == last:
            cont = _continuation(np.log(spot_t[i] / forward[i]), value, degree)
        else:
            cont = np.zeros_like(value)
        value = _step(
            np.ascontiguousarray(cont), value, spot_t[i], spec.k_in * spec.a_in,
            spec.k_out * spec.a_w, spec.k_n, tr.to_in, tr.frac_in, tr.ok_in,
            tr.to_w, tr.frac_w, tr.ok_w,
        )
    samples = value[int(spec.snap(spec.c0))]
    cpu = time.process_time() - start
    return PriceResult.from_samples(samples, cpu, cpu_paths)


def intrinsic_value(curve: ForwardCurve, spec: StorageSpec, grid: TimeGrid) -> float:
    """Deterministic dynamic programme on the forward curve alone (same volume grid)."""
    prices = np.asarray(curve(grid.t), dtype=float)
    levels = spec.levels
    # plain loops: kept independent of the vectorised LSMC kernels above
    value = [float(v) for v in spec.terminal_value(prices[-1:])[0]]
    for i in range(grid.n_steps - 1, -1, -1):
        s = prices[i]
        new = []
        for g, c in enumerate(levels):
            idle = value[g] - spec.k_n
            tol = TIE_TOL * (abs(idle) + abs(s))
            best = idle
            c_in = min(c + spec.a_in, spec.c_max)
            g_in = int(spec.snap(c_in))
            if g_in != g:
                moved = (levels[g_in] - c) / spec.a_in
                candidate = -(s + spec.k_in * spec.a_in) * moved + value[g_in]
                if candidate > best + tol:
                    best = candidate
            c_w = max(c - spec.a_w, spec.c_min)
            g_w = int(spec.snap(c_w))
            if g_w != g:
                moved = (c - levels[g_w]) / spec.a_w
                candidate = (s - spec.k_out * spec.a_w) * moved + value[g_w]
                if candidate > best + tol:
                    best = candidate
            new.append(best)
        value = new
    return value[int(spec.snap(spec.c0))] + 0.0
