import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from ouvg.errors import DomainError
from ouvg.special_functions import dilog


def quad_dilog(z):
    value, _ = integrate.quad(lambda y: -math.log1p(-y) / y, 0.0, z, epsabs=1e-13, epsrel=1e-13, limit=200)
    return value


@pytest.mark.parametrize(
    "z, expected",
    [
        (0.0, 0.0),
        (1.0, math.pi ** 2 / 6),
        (-1.0, -math.pi ** 2 / 12),
        (0.5, math.pi ** 2 / 12 - math.log(2) ** 2 / 2),
    ],
)
def test_closed_forms(z, expected):
    assert abs(dilog(z) - expected) < 1e-12


def test_duplication_identity():
    z = np.linspace(0.0, 1.0, 100)
    lhs = dilog(z) + dilog(-z)
    assert np.max(np.abs(lhs - dilog(z * z) / 2)) < 1e-10


def test_against_quadrature():
    rng = np.random.default_rng(11)
    for z in rng.uniform(-20.0, 0.99, 100):
        assert abs(dilog(z) - quad_dilog(z)) < 1e-9


def test_against_mpmath_over_domain():
    z = np.concatenate([np.linspace(-50.0, 1.0, 2001), [-1e-8, 1e-8, 0.4999, 0.5001, -0.5001, 1 - 1e-12]])
    worst = max(abs(dilog(v) - float(mpmath.polylog(2, v))) for v in z)
    assert worst <= 1e-12


def test_monotone():
    z = np.concatenate([-np.logspace(3, -6, 500), np.linspace(0.0, 1.0, 500)])
    values = dilog(np.sort(z))
    assert np.all(np.diff(values) > 0)


@given(st.floats(-1e3, 1.0), st.floats(-1e3, 1.0))
@settings(max_examples=200, deadline=None)
def test_monotone_pairs(x, y):
    lo, hi = min(x, y), max(x, y)
    assert dilog(lo) <= dilog(hi) + 1e-15 * max(1.0, abs(dilog(hi)))


@given(st.floats(-1.0, 1.0))
def test_reflection_identity(z):
    # Li2(z) + Li2(1 - z) = pi^2/6 - log z log(1 - z) on (0, 1)
    if 0.0 < z < 1.0:
        rhs = math.pi ** 2 / 6 - math.log(z) * math.log1p(-z)
        assert abs(dilog(z) + dilog(1 - z) - rhs) < 1e-12


def test_array_input_keeps_shape():
    z = np.array([[0.0, 0.5], [-1.0, 1.0]])
    out = dilog(z)
    assert out.shape == (2, 2)
    assert out[1, 1] == dilog(1.0)


@pytest.mark.parametrize("z", [1.0 + 1e-12, 2.0, [0.5, 1.5]])
def test_domain_error(z):
    with pytest.raises(DomainError):
        dilog(z)
