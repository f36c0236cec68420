"""Exact simulation of VG-driven Ornstein-Uhlenbeck processes.

``dX = -k X dt + dV`` with ``V`` a Variance Gamma process.  Over a step of
length ``dt`` the state moves to ``a X + R`` with ``a = exp(-k dt)``, where the
remainder ``R`` has the law of the a-remainder of the stationary distribution.
Writing ``V`` as a difference of two gamma processes, ``R`` is the difference
of two Gamma-OU remainders, each of which is a gamma variate plus a compound
Poisson sum with exponential jumps of random rate.  No numerical inversion or
time discretisation is involved.

Paths are generated in blocks of :data:`BLOCK_SIZE`; block ``b`` of factor
``f`` always draws from ``RngStream(master_seed, (f, b))`` and always simulates
a full block, so path ``i`` depends on ``(master_seed, i)`` only and never on
the number of paths requested or the number of worker threads.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .sampling import RngStream, sample_gamma, sample_poisson
from .special_functions import dilog
from .vg import VGParams, to_gamma_difference

BLOCK_SIZE = 4096


@dataclass(frozen=True)
class OUVGParams:
    """Mean-reversion speed ``k``, driving VG parameters and initial state."""

    k: float
    vg: VGParams
    x0: float = 0.0

    def __post_init__(self):
        if not self.k > 0:
            raise DomainError(f"k must be positive, got {self.k!r}")
        if not math.isfinite(self.x0):
            raise DomainError(f"x0 must be finite, got {self.x0!r}")

    @classmethod
    def from_values(cls, k, theta, nu, sigma, x0=0.0) -> "OUVGParams":
        return cls(k=k, vg=VGParams(theta=theta, nu=nu, sigma=sigma), x0=x0)

    @property
    def theta(self) -> float:
        return self.vg.theta

    @property
    def nu(self) -> float:
        return self.vg.nu

    @property
    def sigma(self) -> float:
        return self.vg.sigma


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Strictly increasing times starting at 0."""

    t: np.ndarray

    def __post_init__(self):
        t = np.array(self.t, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise DomainError("a time grid needs at least two points")
        if t[0] != 0.0:
            raise DomainError(f"time grid must start at 0, got {t[0]!r}")
        if np.any(np.diff(t) <= 0):
            raise DomainError("time grid must be strictly increasing")
        t.setflags(write=False)
        object.__setattr__(self, "t", t)

    @classmethod
    def uniform(cls, horizon: float, steps: int) -> "TimeGrid":
        if not horizon > 0 or int(steps) < 1:
            raise DomainError(f"need horizon > 0 and steps >= 1, got {horizon!r}, {steps!r}")
        return cls(np.linspace(0.0, horizon, int(steps) + 1))

    @property
    def dt(self) -> np.ndarray:
        return np.diff(self.t)

    @property
    def n_steps(self) -> int:
        return self.t.size - 1

    def __len__(self):
        return self.t.size


@dataclass(frozen=True, eq=False)
class PathSet:
    """``values[i, j]`` is path ``i`` at time ``grid.t[j]``."""

    values: np.ndarray
    grid: TimeGrid
    master_seed: int
    extra: dict = field(default_factory=dict)

    @property
    def n_paths(self) -> int:
        return self.values.shape[0]


# ---------------------------------------------------------------------------
# samplers

def _check_dt(dt):
    dt = np.asarray(dt, dtype=float)
    if np.any(~(dt > 0)):
        raise DomainError(f"dt must be positive, got {dt!r}")
    return dt


def _jump_sums(counts, dt, k, scale, gen, laplace=False):
    """Per-cell sums of ``counts`` jumps with scale ``scale * exp(-k dt sqrt(U))``.

    Exponential jumps by default (rate ``exp(k dt sqrt U) / scale``), central
    Laplace jumps with that scale when ``laplace`` is set.
    """
    counts = np.asarray(counts)
    flat = counts.ravel()
    total = int(flat.sum())
    if total == 0:
        return np.zeros(counts.shape)
    owner = np.repeat(np.arange(flat.size), flat)
    dt_jump = np.broadcast_to(dt, counts.shape).ravel()[owner]
    u = gen.random(total)
    jump_scale = scale * np.exp(-k * dt_jump * np.sqrt(u))
    if laplace:
        y = gen.random(total)
        y[y == 0.0] = np.nextafter(0.0, 1.0)
        centred = y - 0.5
        jumps = -jump_scale * np.sign(centred) * np.log1p(-2.0 * np.abs(centred))
    else:
        jumps = gen.standard_exponential(total) * jump_scale
    return np.bincount(owner, weights=jumps, minlength=flat.size).reshape(counts.shape)


def _ouvg_remainders(params: OUVGParams, dt, gen, shape):
    """Remainders ``X(t + dt) - a X(t)`` of the OU-VG process.

    Draw order is fixed: both gamma legs, both jump counts, then the jumps.
    """
    k, nu = params.k, params.nu
    legs = to_gamma_difference(params.vg)
    shape_gamma = np.broadcast_to(dt / nu, shape)
    growth = np.exp(k * dt)
    intensity = np.broadcast_to(k * dt ** 2 / (2.0 * nu), shape)
    active = [s > 0 for s in (legs.scale_p, legs.scale_n)]
    g_p = gen.standard_gamma(shape_gamma) * (legs.scale_p / growth) if active[0] else 0.0
    g_n = gen.standard_gamma(shape_gamma) * (legs.scale_n / growth) if active[1] else 0.0
    r = gen.poisson(intensity) if active[0] else None
    s = gen.poisson(intensity) if active[1] else None
    j_p = _jump_sums(r, dt, k, legs.scale_p, gen) if active[0] else 0.0
    j_n = _jump_sums(s, dt, k, legs.scale_n, gen) if active[1] else 0.0
    return np.broadcast_to(g_p - g_n + j_p - j_n, shape).copy()


def _ousvg_remainders(k, nu, sigma, dt, gen, shape):
    """Remainders of the symmetric OU-VG process (Laplace jumps)."""
    if sigma == 0:
        return np.zeros(shape)
    scale = sigma * math.sqrt(nu / 2.0)
    shape_gamma = np.broadcast_to(dt / nu, shape)
    growth = np.exp(k * dt)
    g_p = gen.standard_gamma(shape_gamma) * (scale / growth)
    g_n = gen.standard_gamma(shape_gamma) * (scale / growth)
    r = gen.poisson(np.broadcast_to(k * dt ** 2 / nu, shape))
    return g_p - g_n + _jump_sums(r, dt, k, scale, gen, laplace=True)


def gamma_ou_increment(alpha, beta, k, dt, stream: RngStream, size=None):
    """Exact a-remainder of the OU process driven by ``Gamma(alpha, beta)`` (per unit time).

    ``Y1 ~ Gamma(alpha dt, beta e^{k dt})`` plus ``M ~ Poisson(alpha k dt^2 / 2)``
    exponential jumps with rates ``beta e^{k dt sqrt(U_m)}``.
    """
    for name, value in (("alpha", alpha), ("beta", beta), ("k", k)):
        if not value > 0:
            raise DomainError(f"{name} must be positive, got {value!r}")
    dt = _check_dt(dt)
    y1 = sample_gamma(alpha * dt, beta * np.exp(k * dt), stream, size)
    counts = np.asarray(sample_poisson(alpha * k * dt ** 2 / 2.0, stream, np.shape(y1)))
    jumps = _jump_sums(counts, dt, k, 1.0 / beta, stream.generator)
    out = y1 + jumps
    return float(out) if size is None and np.ndim(out) == 0 else out


def _shape_of(x_prev, size):
    if size is not None:
        return tuple(np.atleast_1d(size))
    return np.shape(x_prev)


def step_ouvg(x_prev, params: OUVGParams, dt, stream: RngStream, size=None):
    """Exact draw of ``X(t + dt)`` given ``X(t) = x_prev`` (array-valued with ``size``)."""
    dt = float(_check_dt(dt))
    shape = _shape_of(x_prev, size)
    rem = _ouvg_remainders(params, dt, stream.generator, shape)
    out = np.asarray(x_prev) * math.exp(-params.k * dt) + rem
    return float(out) if out.ndim == 0 else out


def step_ousvg(x_prev, k, nu, sigma, dt, stream: RngStream, size=None):
    """Exact OU-SVG transition: gamma difference plus Laplace jumps."""
    if not (k > 0 and nu > 0 and sigma >= 0):
        raise DomainError(f"need k > 0, nu > 0, sigma >= 0, got {k!r}, {nu!r}, {sigma!r}")
    dt = float(_check_dt(dt))
    shape = _shape_of(x_prev, size)
    rem = _ousvg_remainders(k, nu, sigma, dt, stream.generator, shape)
    out = np.asarray(x_prev) * math.exp(-k * dt) + rem
    return float(out) if out.ndim == 0 else out


def _skeleton_block(params, dts, symmetric, master_seed, factor, block):
    gen = RngStream(master_seed, (factor, block)).generator
    shape = (BLOCK_SIZE, dts.size)
    if symmetric:
        rem = _ousvg_remainders(params.k, params.nu, params.sigma, dts, gen, shape)
    else:
        rem = _ouvg_remainders(params, dts, gen, shape)
    decay = np.exp(-params.k * dts)
    out = np.empty((BLOCK_SIZE, dts.size + 1))
    out[:, 0] = params.x0
    for j in range(dts.size):
        out[:, j + 1] = decay[j] * out[:, j] + rem[:, j]
    return out


def default_threads() -> int:
    return os.cpu_count() or 1


def map_blocks(fn, n_paths: int, threads=None):
    """Apply ``fn(block_index)`` to every block covering ``n_paths``, in order."""
    n_blocks = -(-int(n_paths) // BLOCK_SIZE)
    threads = default_threads() if threads is None else max(1, int(threads))
    if threads == 1 or n_blocks == 1:
        return [fn(b) for b in range(n_blocks)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n_blocks)))


def iter_skeleton_blocks(params, grid, master_seed, symmetric=False, factor=0):
    """Return ``fn(block) -> (BLOCK_SIZE, M+1)`` array for use with :func:`map_blocks`."""
    if symmetric and params.theta != 0:
        raise DomainError(f"symmetric simulation requires theta = 0, got {params.theta!r}")
    dts = grid.dt
    return lambda b: _skeleton_block(params, dts, symmetric, master_seed, factor, b)


def simulate_skeleton(
    params: OUVGParams,
    grid: TimeGrid,
    n_paths: int,
    master_seed: int,
    symmetric: bool = False,
    threads=None,
    factor: int = 0,
) -> PathSet:
    """Simulate ``n_paths`` independent skeletons of the OU-VG (or OU-SVG) process."""
    if int(n_paths) < 1:
        raise DomainError(f"n_paths must be positive, got {n_paths!r}")
    fn = iter_skeleton_blocks(params, grid, master_seed, symmetric, factor)
    blocks = map_blocks(fn, n_paths, threads)
    values = np.concatenate(blocks)[: int(n_paths)]
    values.setflags(write=False)
    return PathSet(values=values, grid=grid, master_seed=int(master_seed))


# ---------------------------------------------------------------------------
# cumulant functions

def _check_dilog_args(*zs):
    for z in zs:
        if np.any(np.asarray(z) > 1.0):
            raise DomainError("moment generating function diverges at this u")


def stationary_cumulant(u, params: OUVGParams):
    """Cumulant function of the stationary law, ``log E[exp(u X_inf)]``."""
    legs = to_gamma_difference(params.vg)
    zp = np.asarray(u, dtype=float) * legs.scale_p
    zn = -np.asarray(u, dtype=float) * legs.scale_n
    _check_dilog_args(zp, zn)
    return (dilog(zp) + dilog(zn)) / (params.k * params.nu)


def increment_cumulant(u, t, params: OUVGParams):
    """Cumulant function of ``X(t) - X(0) e^{-kt}``."""
    if np.any(np.asarray(t) < 0):
        raise DomainError(f"t must be non-negative, got {t!r}")
    u = np.asarray(u, dtype=float)
    decayed = u * np.exp(-params.k * np.asarray(t, dtype=float))
    return stationary_cumulant(u, params) - stationary_cumulant(decayed, params)


def full_cumulant(u, t, params: OUVGParams):
    """Cumulant function of ``X(t)`` given ``X(0) = params.x0``."""
    u = np.asarray(u, dtype=float)
    drift = u * params.x0 * np.exp(-params.k * np.asarray(t, dtype=float))
    return drift + increment_cumulant(u, t, params)


def gamma_ou_cumulant(u, alpha, beta, k, dt):
    """Cumulant function of :func:`gamma_ou_increment`, ``(alpha/k)(Li2(u/beta) - Li2(u a/beta))``."""
    u = np.asarray(u, dtype=float)
    z = u / beta
    _check_dilog_args(z)
    return alpha / k * (dilog(z) - dilog(z * math.exp(-k * dt)))


def theoretical_moments(params: OUVGParams, x_prev, dt):
    """Mean, variance, skewness and (non-excess) kurtosis of ``X(t + dt)`` given ``X(t)``."""
    dt = float(_check_dt(dt))
    k, th, nu, s2 = params.k, params.theta, params.nu, params.sigma ** 2
    a = math.exp(-k * dt)
    mean = a * x_prev + (1.0 - a) * th / k
    base = s2 + th ** 2 * nu
    if base == 0:
        return mean, 0.0, math.nan, math.nan
    one_m_a2 = -math.expm1(-2.0 * k * dt)
    var = one_m_a2 * base / (2.0 * k)
    skew = (
        2.0 * math.sqrt(2.0 * k) / 3.0
        * (-math.expm1(-3.0 * k * dt)) / one_m_a2 ** 1.5
        * (2.0 * th ** 3 * nu ** 2 + 3.0 * s2 * th * nu) / base ** 1.5
    )
    kurt = (
        k * (1.0 + a * a) / one_m_a2
        * (3.0 * s2 ** 2 * nu + 12.0 * s2 * th ** 2 * nu ** 2 + 6.0 * th ** 4 * nu ** 3) / base ** 2
        + 3.0
    )
    return mean, var, skew, kurt
