import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hfreq.heisenberg import (GaussHermiteFunction, HeisenbergPoint, group_convolve, group_mul, random_points,
                              seminorm, sublaplacian, vector_field_apply)
from oracles import gaussian_integral_3d

coord = st.floats(-2.0, 2.0)


def _pt(v):
    return HeisenbergPoint((v[0],), (v[1],), v[2])


def test_group_law_examples():
    w = HeisenbergPoint((0.3,), (-1.1,), 0.7)
    e = HeisenbergPoint.identity(1)
    assert group_mul(w, e) == w
    p = group_mul(HeisenbergPoint((1.0,), (0.0,), 0.0), HeisenbergPoint((0.0,), (1.0,), 0.0))
    assert (p.y, p.eta, p.s) == ((1.0,), (1.0,), -2.0)
    assert group_mul(w, w.inverse()) == e
    with pytest.raises(ValueError):
        group_mul(w, HeisenbergPoint.identity(2))


@given(st.lists(coord, min_size=9, max_size=9))
def test_associativity(v):
    a, b, c = _pt(v[0:3]), _pt(v[3:6]), _pt(v[6:9])
    l, r = (a * b) * c, a * (b * c)
    assert max(abs(x - y) for x, y in zip(l.y + l.eta + (l.s,), r.y + r.eta + (r.s,))) <= 1e-12


def test_vector_field_examples():
    f = GaussHermiteFunction.gaussian(1)
    Xf = vector_field_apply("X", 1, f)
    ref = GaussHermiteFunction(1, 1.0, 1.0, {(1, 0, 0): -2.0, (0, 1, 1): -4.0})
    assert Xf == ref
    assert vector_field_apply("T", 1, f).is_zero()
    g = GaussHermiteFunction(1, 0.8, 1.2, {(1, 2, 3): 1.5, (0, 0, 1): -1j})
    assert vector_field_apply("S", 1, g) == g.diff(2)
    with pytest.raises(ValueError):
        vector_field_apply("X", 2, g)


@pytest.mark.parametrize("a,b", [(1.0, 1.0), (0.7, 1.3), (2.0, 0.5)])
def test_sublaplacian_at_origin(a, b):
    f = GaussHermiteFunction.gaussian(1, a, b)
    assert sublaplacian(f).evaluate(0.0, 0.0, 0.0) == pytest.approx(-4 * a, abs=1e-14)


def test_sublaplacian_linear():
    f = GaussHermiteFunction(1, 1.0, 1.0, {(1, 0, 0): 1.0, (0, 2, 1): 0.5})
    g = GaussHermiteFunction(1, 1.0, 1.0, {(0, 0, 0): 2.0, (0, 1, 0): -1.0})
    assert sublaplacian(f + g) == sublaplacian(f) + sublaplacian(g)


def test_right_left_identity_exact():
    f = GaussHermiteFunction(1, 0.9, 1.1, {(1, 0, 0): 1.0, (0, 2, 1): 0.5, (2, 1, 2): -0.25})
    V = lambda name, h: vector_field_apply(name, 1, h)
    lhs = (V("X", V("X", f)) - V("Xt", V("Xt", f)) + V("Xi", V("Xi", f)) - V("Xit", V("Xit", f)))
    rhs = vector_field_apply("S", 1, vector_field_apply("T", 1, f)).scale(8)
    assert (lhs - rhs).is_zero()


def test_left_invariance_by_finite_differences():
    rng = np.random.default_rng(5)
    f = GaussHermiteFunction(1, 0.8, 1.1, {(0, 0, 0): 1.0, (1, 1, 0): 0.5, (0, 1, 1): -0.3})
    sym = {"X": vector_field_apply("X", 1, f), "Xi": vector_field_apply("Xi", 1, f)}
    steps = {"X": lambda h: HeisenbergPoint((h,), (0.0,), 0.0), "Xi": lambda h: HeisenbergPoint((0.0,), (h,), 0.0)}
    h = 1e-5
    for w, v in zip(random_points(rng, 20), random_points(rng, 20)):
        for name in ("X", "Xi"):
            # (X (f o tau_w))(v) = d/dt f(w v exp(tX)) and must equal (X f)(w v)
            fd = (f(w * v * steps[name](h)) - f(w * v * steps[name](-h))) / (2 * h)
            ref = sym[name](w * v)
            assert abs(fd - ref) <= 1e-8 * max(1.0, abs(ref))


def test_convolution_orderings_agree():
    f = GaussHermiteFunction(1, 1.0, 1.0, {(0, 0, 0): 1.0, (1, 0, 0): 0.5})
    g = GaussHermiteFunction(1, 0.8, 1.2, {(0, 0, 0): 1.0, (0, 1, 1): -0.4})
    for w in random_points(np.random.default_rng(1), 5):
        a = group_convolve(f, g, w, ordering="left")
        b = group_convolve(f, g, w, ordering="right")
        assert abs(a - b) <= 1e-8


def test_convolution_at_identity_positive():
    f = GaussHermiteFunction.gaussian(1)
    val = group_convolve(f, f, HeisenbergPoint.identity(1), check=True)
    assert val.real > 0 and abs(val.imag) < 1e-14


def test_convolution_rejects_d2():
    f = GaussHermiteFunction.gaussian(2)
    with pytest.raises(ValueError):
        group_convolve(f, f, HeisenbergPoint.identity(2))


def test_young_inequality_sampled():
    f = GaussHermiteFunction(1, 1.0, 1.0, {(0, 0, 0): 1.0, (1, 0, 0): 0.5})
    g = GaussHermiteFunction.gaussian(1, 0.7, 1.3)
    sup_f = seminorm(f, 0, points=81)
    for w in random_points(np.random.default_rng(2), 6, scale=1.5):
        assert abs(group_convolve(f, g, w)) <= sup_f * g.l1_norm() * (1 + 1e-9)


def test_seminorm_examples():
    f = GaussHermiteFunction.gaussian(1)
    assert seminorm(f, 0) == pytest.approx(1.0, abs=1e-15)
    g = GaussHermiteFunction(1, 1.0, 1.0, {(1, 0, 0): 1.0, (0, 0, 2): 0.3})
    vals = [seminorm(g, N) for N in range(5)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert all(math.isfinite(seminorm(g, N, points=15)) for N in range(9))


def test_norms_closed_form():
    f = GaussHermiteFunction.gaussian(1, 0.7, 1.3)
    assert f.integral() == pytest.approx(gaussian_integral_3d(0.7, 1.3), rel=1e-14)
    assert f.l2_norm_sq() == pytest.approx(gaussian_integral_3d(1.4, 2.6), rel=1e-14)
    assert f.l1_norm() == pytest.approx(gaussian_integral_3d(0.7, 1.3), rel=1e-12)


def test_serialization_round_trip():
    f = GaussHermiteFunction(2, 0.9, 1.1, {(1, 0, 0, 2, 1): 1 - 2j, (0, 0, 0, 0, 0): 0.5})
    g = GaussHermiteFunction.from_dict(f.to_dict())
    assert g == f and g.digest() == f.digest()
    with pytest.raises(KeyError):
        GaussHermiteFunction.from_dict({"d": 1, "a": 1.0, "terms": []})
    with pytest.raises(ValueError):
        GaussHermiteFunction(1, -1.0, 1.0)
