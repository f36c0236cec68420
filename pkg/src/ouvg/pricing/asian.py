"""Monte Carlo pricing of arithmetic-average Asian options (zero interest rate)."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..ou import BLOCK_SIZE, TimeGrid, map_blocks
from .models import PriceResult, SpotModel2F, spot_block_fn


@dataclass(frozen=True, eq=False)
class AsianSpec:
    """Payoff ``(sum_i w_i S(t_i) - K)^+``; equal weights ``1/d`` by default."""

    strike: float
    fixings: np.ndarray
    weights: np.ndarray = None

    def __post_init__(self):
        fixings = np.atleast_1d(np.asarray(self.fixings, dtype=float))
        if fixings.ndim != 1 or fixings.size == 0 or np.any(fixings <= 0):
            raise DomainError("fixing dates must be a non-empty sequence of positive times")
        if np.any(np.diff(fixings) <= 0):
            raise DomainError("fixing dates must be strictly increasing")
        if self.weights is None:
            weights = np.full(fixings.size, 1.0 / fixings.size)
        else:
            weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if weights.shape != fixings.shape or np.any(weights < 0):
            raise DomainError("weights must be non-negative, one per fixing date")
        if not self.strike >= 0:
            raise DomainError(f"strike must be non-negative, got {self.strike!r}")
        object.__setattr__(self, "fixings", fixings)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def equally_spaced(cls, strike, maturity, n_fixings) -> "AsianSpec":
        return cls(strike, np.linspace(0.0, maturity, int(n_fixings) + 1)[1:])


def _fixing_columns(grid: TimeGrid, fixings):
    cols = np.searchsorted(grid.t, fixings)
    cols = np.minimum(cols, grid.t.size - 1)
    if not np.allclose(grid.t[cols], fixings, rtol=0, atol=1e-12):
        raise DomainError("every fixing date must lie on the simulation grid")
    return cols


def price_asian(
    model: SpotModel2F, spec: AsianSpec, n_paths: int, seed: int, grid: TimeGrid = None, threads=None
) -> PriceResult:
    """Undiscounted Monte Carlo price of the Asian payoff.

    The default grid is 0 plus the fixing dates, which is all an exact
    simulation needs.
    """
    if int(n_paths) < 2:
        raise DomainError(f"n_paths must be at least 2, got {n_paths!r}")
    if grid is None:
        grid = TimeGrid(np.concatenate([[0.0], spec.fixings]))
    cols = _fixing_columns(grid, spec.fixings)
    start = time.process_time()
    fn = spot_block_fn(model, grid, seed)

    def payoff(b):
        t0 = time.thread_time()
        s = fn(b)
        elapsed = time.thread_time() - t0
        avg = s[:, cols] @ spec.weights
        return np.maximum(avg - spec.strike, 0.0), elapsed

    parts = map_blocks(payoff, n_paths, threads)
    samples = np.concatenate([p for p, _ in parts])[: int(n_paths)]
    cpu_paths = sum(e for _, e in parts)
    cpu = time.process_time() - start
    return PriceResult.from_samples(samples, cpu, min(cpu_paths, cpu))
