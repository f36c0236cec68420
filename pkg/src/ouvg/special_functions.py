"""Real dilogarithm (Spence's function).

``dilog(z) = -int_0^z log(1 - y) / y dy`` for real ``z <= 1``.  Arguments are
mapped into ``|z| <= 1/2`` with the reflection, Landen and inversion
identities, where the power series ``sum z^k / k^2`` converges geometrically.
"""
import math

import numpy as np

from .errors import DomainError

PI2_6 = math.pi ** 2 / 6.0


def _series(z: float) -> float:
    # |z| <= 1/2: terms shrink at least like 2^-k
    total = 0.0
    power = z
    k = 1
    while True:
        term = power / (k * k)
        total += term
        if abs(term) <= 1e-17 * abs(total):
            return total
        k += 1
        power *= z


def _dilog(z: float) -> float:
    if z > 1.0:
        raise DomainError(f"real dilogarithm undefined for z = {z!r} > 1")
    if z == 1.0:
        return PI2_6
    if z == 0.0:
        return 0.0
    if z < -1.0:
        # inversion, 1/z in (-1, 0)
        return -PI2_6 - 0.5 * math.log(-z) ** 2 - _dilog(1.0 / z)
    if z < -0.5:
        # Landen, z / (z - 1) in [1/3, 1/2]
        return -_series(z / (z - 1.0)) - 0.5 * math.log1p(-z) ** 2
    if z <= 0.5:
        return _series(z)
    # reflection, 1 - z in (0, 1/2)
    return PI2_6 - math.log(z) * math.log1p(-z) - _series(1.0 - z)


def dilog(z):
    """Real dilogarithm ``Li2(z)``.

    Accepts a scalar or an array-like of reals, all ``<= 1``; returns a float
    or an ``ndarray`` of the same shape.  Raises :class:`DomainError` for any
    argument above 1 (the complex branch is not provided).
    """
    if np.ndim(z) == 0:
        return _dilog(float(z))
    arr = np.asarray(z, dtype=float)
    out = np.empty_like(arr)
    for idx, value in np.ndenumerate(arr):
        out[idx] = _dilog(float(value))
    return out
