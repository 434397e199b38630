import math

import numpy as np
import pytest

from hypertrace.quadrature import (QuadratureConfig, QuadratureError,
                                   integrate, integrate_panels,
                                   integrate_semi_infinite, trapezoid_periodic)


def test_polynomial_exact():
    val, err = integrate(lambda x: x ** 6, 0.0, 1.0)
    assert abs(val - 1.0 / 7.0) < 1e-14
    assert err < 1e-12


def test_gaussian_integral():
    val, _ = integrate(lambda x: np.exp(-x * x), -8.0, 8.0)
    assert abs(val - math.sqrt(math.pi)) < 1e-12


def test_oscillatory_panels():
    # int_0^10 cos(40 x) dx = sin(400)/40
    val, err = integrate_panels(lambda x: np.cos(40.0 * x), 0.0, 10.0, math.pi / 40.0)
    assert abs(val - math.sin(400.0) / 40.0) < 1e-12
    assert err < 1e-9


def test_semi_infinite_with_tail_bound():
    val, err = integrate_semi_infinite(
        lambda x: np.exp(-x), 0.0, tail_bound=lambda T: math.exp(-T))
    assert abs(val - 1.0) < 1e-11
    assert err < 1e-10


def test_nonconvergence_is_reported():
    cfg = QuadratureConfig(abs_tol=1e-14, rel_tol=1e-14, max_panels=3)
    with pytest.raises(QuadratureError):
        integrate(lambda x: np.cos(200.0 * x) / (1e-3 + x * x), 0.0, 30.0, cfg)


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(abs_tol=-1.0)
    with pytest.raises(ValueError):
        QuadratureConfig(max_panels=0)


def test_trapezoid_periodic_unit_circle():
    # mean of e^{2 i theta} over a period vanishes to spectral accuracy
    val = trapezoid_periodic(lambda t: np.exp(2j * t), 2.0 * math.pi, n=64)
    assert abs(val) < 1e-13
