import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hfreq.numerics import (QuadratureRule1D, SeriesControl, composite_legendre, gaussian_ft_moment,
                            gaussian_moment, integrate_1d, lattice_sum, loglog_fit, make_rule, sum_series)


def test_make_rule_examples():
    r = make_rule("gauss_hermite", 1)
    assert r.nodes.tolist() == [0.0]
    assert r.weights[0] == pytest.approx(math.sqrt(math.pi), abs=1e-15)
    r = make_rule("periodic_trapezoid", 4)
    np.testing.assert_allclose(r.nodes, [-math.pi, -math.pi / 2, 0, math.pi / 2], atol=1e-15)
    np.testing.assert_allclose(r.weights, [math.pi / 2] * 4, rtol=1e-15)
    r = make_rule("gauss_legendre", 2, (-1, 1))
    np.testing.assert_allclose(r.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], atol=1e-15)
    np.testing.assert_allclose(r.weights, [1, 1], atol=1e-15)


@pytest.mark.parametrize("args", [("gauss_hermite", 0), ("gauss_legendre", 3), ("gauss_legendre", 3, (0, math.inf)),
                                  ("gauss_hermite", 3, (0, 1)), ("nope", 3)])
def test_make_rule_errors(args):
    with pytest.raises(ValueError):
        make_rule(*args)


def test_rule_invariants_enforced():
    with pytest.raises(ValueError):
        QuadratureRule1D(np.array([1.0, 0.0]), np.array([1.0, 1.0]), "gauss_legendre")
    with pytest.raises(ValueError):
        QuadratureRule1D(np.array([0.0, 1.0]), np.array([1.0, -1.0]), "gauss_legendre")


def test_integrate_examples():
    assert abs(integrate_1d(make_rule("gauss_hermite", 32), lambda x: np.ones_like(x)) - math.sqrt(math.pi)) < 1e-14
    assert abs(integrate_1d(make_rule("periodic_trapezoid", 64), lambda z: np.exp(1j * z))) <= 1e-14
    assert abs(integrate_1d(make_rule("gauss_legendre", 16, (0, 1)), lambda x: x * x) - 1 / 3) < 1e-14


def test_integrate_rejects_nonfinite():
    with pytest.raises(ValueError):
        integrate_1d(make_rule("gauss_legendre", 4, (0, 1)), lambda x: np.full_like(x, np.nan))


@pytest.mark.parametrize("p", range(0, 21))
def test_gauss_hermite_polynomial_exactness(p):
    r = make_rule("gauss_hermite", 32)
    exact = gaussian_moment(p, 1.0)
    got = integrate_1d(r, lambda x: x ** p).real
    assert abs(got - exact) <= 1e-12 * max(1.0, abs(exact))


def test_trapezoid_exact_on_trig_polynomials():
    N = 16
    r = make_rule("periodic_trapezoid", N)
    for m in range(-N + 1, N):
        val = integrate_1d(r, lambda z: np.exp(1j * m * z))
        assert abs(val - (2 * math.pi if m == 0 else 0)) < 1e-13


def test_gauss_hermite_reproducible():
    a = make_rule("gauss_hermite", 40)
    b = make_rule("gauss_hermite", 40)
    assert np.array_equal(a.nodes, b.nodes) and np.array_equal(a.weights, b.weights)


def test_sum_series_examples():
    ctrl = SeriesControl(100, 1e-12, 3)
    assert sum_series(lambda j: 0.0, ctrl) == (0.0, 3)
    val, used = sum_series(lambda j: 0.5 ** j, ctrl)
    assert abs(val - 2) < 1e-10 and used < 100
    with pytest.raises(ValueError):
        sum_series(lambda j: math.inf, ctrl)


def test_sum_series_stable_under_max_terms():
    a = sum_series(lambda j: 0.3 ** j, SeriesControl(200, 1e-14, 2))
    b = sum_series(lambda j: 0.3 ** j, SeriesControl(5000, 1e-14, 2))
    assert a == b


@pytest.mark.parametrize("kwargs", [dict(max_terms=0), dict(abs_tail_tol=0.0), dict(consecutive_small=0)])
def test_series_control_invariants(kwargs):
    with pytest.raises(ValueError):
        SeriesControl(**kwargs)


@given(st.integers(0, 8), st.floats(0.3, 3.0), st.floats(-4.0, 4.0))
def test_gaussian_ft_moment_against_quadrature(p, c, xi):
    r = make_rule("gauss_hermite", 60)
    # int x^p e^{-c x^2 - i xi x} dx with x = u / sqrt(c)
    got = integrate_1d(r, lambda u: (u / math.sqrt(c)) ** p * np.exp(-1j * xi * u / math.sqrt(c))) / math.sqrt(c)
    assert abs(complex(gaussian_ft_moment(p, c, xi)) - got) < 1e-11


def test_composite_legendre_and_loglog():
    r = composite_legendre([0.0, 0.5, 1.0, 3.0], 8)
    assert abs(integrate_1d(r, np.exp) - (math.e ** 3 - 1)) < 1e-12
    x = np.geomspace(1e-3, 1e-1, 7)
    slope, icpt, r2 = loglog_fit(x, 3 * x ** 0.5)
    assert abs(slope - 0.5) < 1e-12 and abs(r2 - 1) < 1e-12


@pytest.mark.parametrize("scale", [2e3, 2e4, 2e5])
def test_lattice_sum_matches_direct(scale):
    phi = lambda n: np.exp(-np.asarray(n, dtype=float) / scale) * np.cos(np.asarray(n) / scale)
    stop = int(20 * scale)
    direct = math.fsum(phi(np.arange(0, stop + 1)).tolist())
    got = lattice_sum(phi, 0, stop, scale)
    assert abs(got - direct) <= 1e-10 * abs(direct)
