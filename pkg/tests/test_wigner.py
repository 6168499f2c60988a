import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hfreq.frequency import FrequencyPoint
from hfreq.numerics import SeriesControl
from hfreq.wigner import (OutsideSeriesBox, QuadratureFlag, WignerEvalSpec, hat_delta_apply, hat_delta_limit_errors,
                          in_box, limit_operator_L, wigner_1d_ladder, wigner_1d_quadrature, wigner_1d_series,
                          wigner_series, wigner_symmetries_check, wigner_w)

LADDER = WignerEvalSpec("ladder")
QUAD = WignerEvalSpec("quadrature")
SERIES = WignerEvalSpec("series")


def random_box_points(rng, count, R0=3.0, d=1):
    pts = []
    while len(pts) < count:
        n = tuple(int(v) for v in rng.integers(0, 4, d))
        m = tuple(int(v) for v in rng.integers(0, 4, d))
        lam = float(rng.uniform(0.05, 1.0)) * (1 if rng.random() < 0.5 else -1)
        Y = (tuple(rng.uniform(-1.5, 1.5, d)), tuple(rng.uniform(-1.5, 1.5, d)))
        w = FrequencyPoint(n, m, lam)
        if in_box(w, Y, R0):
            pts.append((w, Y))
    return pts


def test_wigner_at_origin():
    for n in range(5):
        for m in range(5):
            w = FrequencyPoint(n, m, 0.7)
            specs = (LADDER, QUAD, SERIES) if in_box(w, (0.0, 0.0), SERIES.R0) else (LADDER, QUAD)
            for spec in specs:
                assert abs(wigner_w(w, (0.0, 0.0), spec) - (n == m)) < 1e-14


@pytest.mark.parametrize("lam", [0.3, 1.0, -2.0])
def test_wigner_00_closed_form(lam):
    for y, eta in [(0.5, -0.2), (1.1, 0.7), (-0.3, 1.4)]:
        ref = math.exp(-abs(lam) * (y * y + eta * eta))
        for spec in (LADDER, QUAD):
            assert abs(wigner_w(FrequencyPoint(0, 0, lam), (y, eta), spec) - ref) <= 1e-10


def test_series_against_quadrature_in_box():
    rng = np.random.default_rng(11)
    for w, Y in random_box_points(rng, 50):
        s = wigner_w(w, Y, SERIES)
        q = wigner_w(w, Y, QUAD)
        assert abs(s - q) <= 1e-8


def test_series_two_dimensional():
    rng = np.random.default_rng(4)
    for w, Y in random_box_points(rng, 6, d=2):
        assert abs(wigner_w(w, Y, SERIES) - wigner_w(w, Y, LADDER)) <= 1e-10


def test_series_tail_bound_dominates():
    rng = np.random.default_rng(12)
    ctrl = SeriesControl(800, 1e-10, 2)
    for w, Y in random_box_points(rng, 20):
        r = wigner_series(w, Y, WignerEvalSpec("series", ctrl=ctrl))
        assert abs(r.value - wigner_w(w, Y, LADDER)) <= r.tail_bound + 1e-15


def test_series_outside_box_rejected():
    with pytest.raises(OutsideSeriesBox):
        wigner_w(FrequencyPoint(5, 5, 1.0), (0.1, 0.1), SERIES)
    with pytest.raises(ValueError):
        WignerEvalSpec("bogus")


def test_quadrature_flag():
    with pytest.raises(QuadratureFlag):
        wigner_1d_quadrature(20, 3, 2.0, 1.5, 2.0, nodes=6, check=True)


@given(st.integers(0, 30), st.integers(0, 30), st.floats(0.01, 4.0), st.booleans(), st.floats(-3, 3), st.floats(-3, 3))
def test_modulus_bounded(n, m, lam, neg, y, eta):
    lam = -lam if neg else lam
    assert abs(wigner_1d_ladder(n, m, lam, y, eta)) <= 1 + 1e-12


@given(st.integers(0, 12), st.integers(0, 12), st.floats(0.05, 3.0), st.booleans(), st.floats(-2, 2), st.floats(-2, 2))
def test_ladder_against_quadrature(n, m, lam, neg, y, eta):
    lam = -lam if neg else lam
    assert abs(wigner_1d_ladder(n, m, lam, y, eta) - wigner_1d_quadrature(n, m, lam, y, eta)) <= 1e-10


def test_symmetries():
    rng = np.random.default_rng(13)
    for w, Y in random_box_points(rng, 30):
        for spec in (LADDER, QUAD):
            assert wigner_symmetries_check(w, Y, spec)["max"] <= 1e-10
    assert wigner_symmetries_check(FrequencyPoint(2, 1, 0.4), (0.0, 0.0))["max"] == 0.0


def test_hat_delta_realizes_Y_squared():
    rng = np.random.default_rng(14)
    for w, Y in random_box_points(rng, 30):
        theta = lambda p: wigner_w(p, Y, LADDER)
        r2 = sum(v * v for v in Y[0] + Y[1])
        assert abs(r2 * theta(w) + hat_delta_apply(theta, w)) <= 1e-8


def test_hat_delta_examples():
    w = FrequencyPoint(0, 0, 0.8)
    point = lambda p: 1.0 if p == w else 0.0
    assert hat_delta_apply(point, w) == pytest.approx(-1 / (2 * 0.8), abs=1e-15)
    t1 = lambda p: p.n[0] + 2.0 * p.m[0]
    t2 = lambda p: math.cos(p.lam * p.n[0])
    w = FrequencyPoint(3, 1, -0.4)
    lhs = hat_delta_apply(lambda p: 2 * t1(p) - 3 * t2(p), w)
    assert lhs == pytest.approx(2 * hat_delta_apply(t1, w) - 3 * hat_delta_apply(t2, w), abs=1e-12)


def test_limit_operator_examples():
    assert limit_operator_L(lambda x, k: x, 1.7, 0) == pytest.approx(1.0, abs=1e-8)
    assert limit_operator_L(lambda x, k: math.log(x), 1.7, 0) == pytest.approx(0.0, abs=1e-6)
    with pytest.raises(ValueError):
        limit_operator_L(lambda x, k: x, 0.0, 0)


@pytest.mark.parametrize("k", [0, 2])
def test_hat_delta_limit_rate(k):
    psi = lambda x, kk: math.exp(-x) * math.cos(x)
    _, slope, r2 = hat_delta_limit_errors(psi, 1.0, k, np.geomspace(1e-1, 1e-3, 7))
    assert slope >= 0.9 and r2 >= 0.98


def _laplacian_H_on_character(n, m, lam, y, eta, h=1e-4):
    # (X^2 + Xi^2)(e^{is lam} W) / e^{is lam} with d_s -> i lam
    W = lambda a, b: wigner_1d_ladder(n, m, lam, a, b)
    c = 2j * lam
    w0 = W(y, eta)
    wy = (W(y + h, eta) - W(y - h, eta)) / (2 * h)
    we = (W(y, eta + h) - W(y, eta - h)) / (2 * h)
    lap = (W(y + h, eta) + W(y - h, eta) + W(y, eta + h) + W(y, eta - h) - 4 * w0) / (h * h)
    return lap + 2 * c * (eta * wy - y * we) + c * c * (y * y + eta * eta) * w0, w0, wy, we


def test_sublaplacian_eigen_identity():
    rng = np.random.default_rng(15)
    for _ in range(20):
        n, m = (int(v) for v in rng.integers(0, 6, 2))
        lam = float(rng.uniform(0.2, 2.0)) * (1 if rng.random() < 0.5 else -1)
        y, eta = rng.uniform(-1, 1, 2)
        lhs, w0, _, _ = _laplacian_H_on_character(n, m, lam, y, eta)
        ref = -4 * abs(lam) * (2 * m + 1) * w0
        assert abs(lhs - ref) <= 1e-6 * max(1.0, abs(ref))


def test_T_relation():
    rng = np.random.default_rng(16)
    for _ in range(20):
        n, m = (int(v) for v in rng.integers(0, 6, 2))
        lam = float(rng.uniform(0.2, 2.0)) * (1 if rng.random() < 0.5 else -1)
        y, eta = rng.uniform(-1, 1, 2)
        _, w0, wy, we = _laplacian_H_on_character(n, m, lam, y, eta)
        lhs = abs(lam) * (n - m) * w0
        rhs = 1j * lam * (eta * wy - y * we)
        assert abs(lhs - rhs) <= 1e-6 * max(1.0, abs(lhs))


def test_series_result_metadata():
    r = wigner_1d_series(2, 1, 0.5, 0.4, -0.3, SeriesControl(800, 1e-18, 4))
    assert min(r.terms) > 0 and r.tail_bound < 1e-15
