"""Variance Gamma parameter algebra, exponents and a subordination sampler.

A VG process is ``V(t) = theta G(t) + sigma W(G(t))`` with ``G`` a gamma
subordinator of unit mean rate and variance rate ``nu``.  It is also the
difference of two independent gamma processes, which is the representation
the exact OU samplers are built on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .sampling import RngStream, sample_gamma, sample_normal


@dataclass(frozen=True)
class VGParams:
    """Drift ``theta``, variance rate ``nu`` and volatility ``sigma``.

    ``sigma = 0`` is accepted as a degenerate case (a pure gamma drift, or the
    zero process when ``theta`` is also 0).
    """

    theta: float
    nu: float
    sigma: float

    def __post_init__(self):
        if not self.nu > 0:
            raise DomainError(f"nu must be positive, got {self.nu!r}")
        if not self.sigma >= 0:
            raise DomainError(f"sigma must be non-negative, got {self.sigma!r}")
        if not math.isfinite(self.theta):
            raise DomainError(f"theta must be finite, got {self.theta!r}")

    @property
    def symmetric(self) -> bool:
        return self.theta == 0.0


@dataclass(frozen=True)
class GammaDiffParams:
    """``V = gamma_p - gamma_n`` with ``gamma_x(1) ~ Gamma(1/nu, mu_x / nu_x)``."""

    mu_p: float
    nu_p: float
    mu_n: float
    nu_n: float
    nu: float

    @property
    def rate_p(self) -> float:
        """Gamma rate ``mu_p / nu_p = 1 / (mu_p nu)`` of the positive leg."""
        return 1.0 / (self.mu_p * self.nu) if self.mu_p > 0 else math.inf

    @property
    def rate_n(self) -> float:
        return 1.0 / (self.mu_n * self.nu) if self.mu_n > 0 else math.inf

    @property
    def scale_p(self) -> float:
        """``nu_p / mu_p``; zero for a vanishing leg."""
        return self.mu_p * self.nu

    @property
    def scale_n(self) -> float:
        return self.mu_n * self.nu


def to_gamma_difference(p: VGParams) -> GammaDiffParams:
    """Gamma legs with ``mu_p - mu_n = theta`` and ``mu_p mu_n = sigma^2 / (2 nu)``.

    The larger leg comes from ``root + |theta|/2``; the smaller one from the
    product, which avoids cancellation when ``|theta|`` dominates.
    """
    root = 0.5 * math.sqrt(p.theta ** 2 + 2.0 * p.sigma ** 2 / p.nu)
    large = root + 0.5 * abs(p.theta)
    small = p.sigma ** 2 / (2.0 * p.nu * large) if large > 0 else 0.0
    if p.theta == 0:
        mu_p = mu_n = root
    else:
        mu_p, mu_n = (large, small) if p.theta > 0 else (small, large)
    return GammaDiffParams(
        mu_p=mu_p, nu_p=mu_p ** 2 * p.nu, mu_n=mu_n, nu_n=mu_n ** 2 * p.nu, nu=p.nu
    )


def gamma_char_exponent(u, shape: float, rate: float):
    """``log E[exp(i u G)]`` for ``G ~ Gamma(shape, rate)``."""
    u = np.asarray(u, dtype=float)
    return -shape * np.log(1.0 - 1j * u / rate)


def vg_char_exponent(u, p: VGParams):
    """Characteristic exponent ``log E[exp(i u V(1))]`` (principal branch)."""
    u = np.asarray(u, dtype=float)
    out = -np.log(1.0 - 1j * u * p.theta * p.nu + 0.5 * u ** 2 * p.sigma ** 2 * p.nu) / p.nu
    return out[()] if out.ndim == 0 else out


def vg_cumulant(u, p: VGParams):
    """Real cumulant function ``log E[exp(u V(1))]``.

    Raises :class:`DomainError` where the moment generating function diverges.
    """
    u = np.asarray(u, dtype=float)
    arg = 1.0 - u * p.theta * p.nu - 0.5 * u ** 2 * p.sigma ** 2 * p.nu
    if np.any(arg <= 0):
        raise DomainError(f"VG moment generating function diverges at u = {u!r}")
    out = -np.log(arg) / p.nu
    return float(out) if out.ndim == 0 else out


def vg_cumulants(p: VGParams) -> tuple:
    """First four cumulants of ``V(1)``."""
    th, nu, s2 = p.theta, p.nu, p.sigma ** 2
    return (
        th,
        s2 + th ** 2 * nu,
        2.0 * th ** 3 * nu ** 2 + 3.0 * s2 * th * nu,
        3.0 * s2 ** 2 * nu + 12.0 * s2 * th ** 2 * nu ** 2 + 6.0 * th ** 4 * nu ** 3,
    )


def simulate_vg_increment(dt, p: VGParams, stream: RngStream, size=None):
    """Exact draw of ``V(t + dt) - V(t)`` by subordination.

    Used as an independent oracle and for the pure-VG factor of the two-factor
    spot model; the exact OU samplers do not go through it.
    """
    if np.any(np.asarray(dt) <= 0):
        raise DomainError(f"dt must be positive, got {dt!r}")
    g = sample_gamma(np.asarray(dt) / p.nu, 1.0 / p.nu, stream, size)
    z = sample_normal(stream, None if np.ndim(g) == 0 else np.shape(g))
    return p.theta * g + p.sigma * np.sqrt(g) * z
