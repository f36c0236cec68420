"""Seeded random variate generation.

Every sampler draws from an :class:`RngStream`, a Philox (counter-based)
generator keyed by ``(master_seed, stream_id)``.  Streams with distinct ids are
independent, and a stream is fully reproducible from its key, which is what
lets path blocks be generated in any order or on any number of threads.

All samplers take an optional ``size`` and then return an ``ndarray``;
parameters broadcast against ``size`` the way numpy's do.
"""
from __future__ import annotations

from typing import Sequence, Union

import numpy as np

from .errors import DomainError

StreamId = Union[int, Sequence[int]]


class RngStream:
    """A single-owner random stream derived from ``(master_seed, stream_id)``.

    ``stream_id`` may be an integer or a tuple of non-negative integers; the
    package uses fixed-length tuples ``(factor, block)`` for path simulation.
    """

    def __init__(self, master_seed: int, stream_id: StreamId = 0):
        if isinstance(stream_id, (int, np.integer)):
            key = (int(stream_id),)
        else:
            key = tuple(int(s) for s in stream_id)
        if any(s < 0 for s in key):
            raise DomainError(f"stream ids must be non-negative, got {key}")
        self.master_seed = int(master_seed)
        self.stream_id = key
        seq = np.random.SeedSequence(self.master_seed & (2**64 - 1), spawn_key=key)
        self.generator = np.random.Generator(np.random.Philox(seq))

    def __repr__(self) -> str:
        return f"RngStream(master_seed={self.master_seed}, stream_id={self.stream_id})"


def _check_positive(name, value):
    if np.any(np.asarray(value) <= 0) or np.any(np.isnan(value)):
        raise DomainError(f"{name} must be positive, got {value!r}")


def sample_uniform(stream: RngStream, size=None):
    """Uniform draws on ``[0, 1)``."""
    return stream.generator.random(size)


def sample_gamma(shape, rate, stream: RngStream, size=None):
    """Draws from the gamma law with density ``rate^shape x^(shape-1) e^(-rate x) / Gamma(shape)``.

    Exact for every positive shape, including ``shape < 1``.
    """
    _check_positive("shape", shape)
    _check_positive("rate", rate)
    return stream.generator.standard_gamma(shape, size) / rate


def sample_poisson(intensity, stream: RngStream, size=None):
    """Poisson counts with the given intensity (``>= 0``)."""
    if np.any(np.asarray(intensity) < 0) or np.any(np.isnan(intensity)):
        raise DomainError(f"intensity must be non-negative, got {intensity!r}")
    return stream.generator.poisson(intensity, size)


def sample_exponential(rate, stream: RngStream, size=None):
    """Exponential draws with the given rate."""
    _check_positive("rate", rate)
    return stream.generator.standard_exponential(size) / rate


def laplace_inverse_cdf(y, mu):
    """Inverse distribution function of the central Laplace law with scale ``mu``."""
    y = np.asarray(y, dtype=float)
    centred = y - 0.5
    return -mu * np.sign(centred) * np.log1p(-2.0 * np.abs(centred))


def sample_laplace(mu, stream: RngStream, size=None):
    """Central Laplace draws with scale ``mu`` by inversion of a uniform."""
    _check_positive("mu", mu)
    y = stream.generator.random(size)
    # y == 0 maps to -inf; the next representable uniform is used instead
    y = np.where(y == 0.0, np.nextafter(0.0, 1.0), y)
    out = laplace_inverse_cdf(y, mu)
    return out[()] if size is None else out


def sample_normal(stream: RngStream, size=None):
    """Standard normal draws."""
    return stream.generator.standard_normal(size)
