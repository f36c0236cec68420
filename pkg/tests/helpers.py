"""Independent oracles shared by the test modules."""
import functools
import math

import numpy as np
from scipy import integrate

from ouvg.sampling import RngStream
from ouvg.vg import VGParams, simulate_vg_increment

ASYM_PARAMS = dict(k=0.2, theta=0.025, nu=0.02, sigma=0.3, x0=0.0)
SYM_PARAMS = dict(k=0.2162, theta=0.0, nu=0.256, sigma=0.201, x0=0.0)


def central_weights(order, half_width):
    """Central finite-difference weights for the ``order``-th derivative on 2m+1 points."""
    offsets = np.arange(-half_width, half_width + 1, dtype=float)
    powers = np.arange(offsets.size)
    system = offsets[None, :] ** powers[:, None]
    rhs = np.zeros(offsets.size)
    rhs[order] = math.factorial(order)
    return offsets, np.linalg.solve(system, rhs)


def derivative_at_zero(f, order, h, half_width=4):
    offsets, weights = central_weights(order, half_width)
    values = np.array([f(o * h) for o in offsets])
    return float(weights @ values) / h ** order


def gamma_ou_log_mgf_quad(u, alpha, beta, k, dt):
    """``log E[exp(u Y)] = -(alpha/k) int_a^1 log(1 - u x / beta) / x dx`` by adaptive quadrature."""
    a = math.exp(-k * dt)
    value, _ = integrate.quad(lambda x: math.log1p(-u * x / beta) / x, a, 1.0, epsabs=1e-14, epsrel=1e-13)
    return -alpha / k * value


@functools.lru_cache(maxsize=None)
def discretised_ouvg_step(k, theta, nu, sigma, dt, n_draws, substeps, seed):
    """``int_0^dt e^{-k(dt-v)} dV(v)`` with VG increments on ``substeps`` midpoint cells."""
    p = VGParams(theta, nu, sigma)
    stream = RngStream(seed, 0)
    h = dt / substeps
    acc = np.zeros(n_draws)
    for j in range(substeps):
        acc += math.exp(-k * (dt - (j + 0.5) * h)) * simulate_vg_increment(h, p, stream, size=n_draws)
    acc.setflags(write=False)
    return acc


def combined_z(a, se_a, b, se_b):
    return (a - b) / math.hypot(se_a, se_b)
