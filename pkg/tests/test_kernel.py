import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import F_coeff_bruteforce, bessel_j
from hfreq.kernel import (F_coeff, OutsideKernelBox, bessel_tail, kernel_decay_fit, kernel_identity_suite, kernel_K,
                          kernel_K_series, kernel_K_table, kernel_Kd, kernel_tilde, kernel_tilde_coeffs)


@pytest.mark.parametrize("k", [-2, 0, 3])
def test_kernel_delta_cases(k):
    assert kernel_K(1.3, k, (0.0, 0.0)) == pytest.approx(float(k == 0), abs=1e-15)
    assert kernel_K(0.0, k, (0.7, -0.4)) == pytest.approx(float(k == 0), abs=1e-15)


@pytest.mark.parametrize("xdot", [0.3, 1.0, -2.5, 4.0])
@pytest.mark.parametrize("Y", [(0.5, 0.2), (-1.1, 0.9), (0.0, 1.7)])
def test_bessel_radial(xdot, Y):
    arg = 2 * math.sqrt(abs(xdot)) * math.hypot(*Y)
    assert abs(kernel_K(xdot, 0, Y) - bessel_j(0, arg)) <= 1e-10


@pytest.mark.parametrize("k", range(-5, 6))
@pytest.mark.parametrize("xdot,y", [(0.5, 0.8), (2.0, -1.3), (3.5, 1.9)])
def test_bessel_axis(k, xdot, y):
    ref = (-1) ** k * bessel_j(k, 2 * math.sqrt(xdot) * y)
    assert abs(kernel_K(xdot, k, (y, 0.0)) - ref) <= 1e-10


def test_F_coeff_examples():
    assert F_coeff(0, 0, 0) == 1
    assert F_coeff(1, 0, 1) == 1 and F_coeff(1, 0, -1) == 1
    assert F_coeff(0, 1, 1) == -1 and F_coeff(0, 1, -1) == 1
    assert F_coeff(2, 0, 0) == 2
    assert F_coeff(1, 1, 0) == 0
    with pytest.raises(ValueError):
        F_coeff(-1, 0, 0)


@given(st.integers(0, 9), st.integers(0, 9), st.integers(-20, 20))
def test_F_coeff_bruteforce(l1, l2, k):
    assert F_coeff(l1, l2, k) == F_coeff_bruteforce(l1, l2, k)


def test_Kd_product_and_errors():
    y, eta = np.array([0.4, -0.6]), np.array([0.3, 0.9])
    v = kernel_Kd((1.0, 2.0), (1, -2), (y, eta))
    ref = kernel_K(1.0, 1, (0.4, 0.3)) * kernel_K(2.0, -2, (-0.6, 0.9))
    assert abs(v - ref) <= 1e-15
    assert kernel_Kd((0.0, 0.0), (0, 0), (y, eta)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        kernel_Kd((1.0, -1.0), (0, 0), (y, eta))


def test_kernel_tilde():
    Y = (0.7, -0.3)
    assert kernel_tilde(1.5, 0.9, (0.0, 0.0)) == 1
    c = kernel_tilde_coeffs(1.5, Y, 8)
    ref = np.array([kernel_K(1.5, k, Y) for k in range(-8, 9)])
    assert np.max(np.abs(c - ref)) <= 1e-13
    z = np.linspace(-3, 3, 7)
    Y2 = (0.2, 0.5)
    prod = kernel_tilde(1.5, z, Y) * kernel_tilde(1.5, z, Y2)
    assert np.max(np.abs(prod - kernel_tilde(1.5, z, (0.9, 0.2)))) <= 1e-14


def test_identity_suite_reference_point():
    r = kernel_identity_suite(1.0, 2, (0.5, 0.3))
    assert r["symmetry_max"] <= 1e-12
    assert r["laplace"] <= 1e-6 and r["T_relation"] <= 1e-6
    assert r["convolution"] <= 1e-8 and r["convolution_tail"] <= 1e-8


@pytest.mark.parametrize("xdot", [0.5, 1.0, 2.0, 4.0])
@pytest.mark.parametrize("k", [-4, -1, 0, 3, 4])
def test_identity_suite_radial(xdot, k):
    r = kernel_identity_suite(xdot, k, (0.6, -0.4))
    assert r["radial_ode"] <= 1e-5
    assert r["symmetry_max"] <= 1e-12


@given(st.floats(-3, 3), st.integers(-6, 6), st.floats(-2, 2), st.floats(-2, 2))
def test_modulus_bounded(xdot, k, y, eta):
    assert abs(kernel_K(xdot, k, (y, eta))) <= 1 + 1e-12


@given(st.floats(-2, 2), st.integers(-5, 5), st.floats(-2, 2), st.floats(-2, 2))
def test_integral_matches_series(xdot, k, y, eta):
    s, tail = kernel_K_series(xdot, k, (y, eta))
    assert abs(kernel_K(xdot, k, (y, eta)) - s) <= 1e-8
    assert tail < 1e-8


def test_series_outside_box():
    with pytest.raises(OutsideKernelBox):
        kernel_K_series(16.0, 0, (1.0, 1.0))


def test_table_rows():
    t = kernel_K_table(1.2, 3, 0.4, -0.2)
    for k in range(-3, 4):
        assert abs(t[k + 3] - kernel_K(1.2, k, (0.4, -0.2))) <= 1e-15


def test_decay_and_tail():
    for N in (1, 3, 6):
        assert math.isfinite(kernel_decay_fit(1.0, (0.8, 0.5), N))
    x = math.hypot(0.8, 0.5)
    t = np.abs(kernel_K_table(1.0, 40, 0.8, 0.5))
    actual = t[:40 - 10].sum() + t[40 + 11:].sum()
    assert actual <= bessel_tail(x, 10)
