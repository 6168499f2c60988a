import math

import numpy as np
import pytest

from hfreq.heisenberg import random_points
from hfreq.horizontal import (HorizontalFunction, convolve, gh_convolve_check, gh_decay_check, gh_inverse,
                              gh_plancherel_check, gh_table, gh_transform, gh_values)

G = HorizontalFunction.gaussian(1)
YG = HorizontalFunction.monomial((1, 0))
MIX = HorizontalFunction(1, 0.8, {(0, 0): 1.0, (1, 1): 0.4, (2, 0): -0.3j, (0, 3): 0.2})


def test_at_origin():
    assert gh_transform(G, 0.0, 0) == pytest.approx(math.pi, abs=1e-14)
    for k in (-2, 1, 3):
        assert abs(gh_transform(G, 0.0, k)) <= 1e-15


def test_closed_form_gaussian():
    xs = np.concatenate([-np.linspace(0.1, 6, 9), np.linspace(0, 6, 13)])
    vals = gh_table(G, xs, 0)[:, 0]
    assert np.max(np.abs(vals - math.pi * np.exp(-np.abs(xs)))) <= 1e-6


def test_closed_form_d2():
    g = HorizontalFunction.gaussian(2)
    v = gh_transform(g, (0.5, 1.5), (0, 0))
    assert v == pytest.approx(math.pi ** 2 * math.exp(-2.0), abs=1e-12)


@pytest.mark.parametrize("g", [G, YG, MIX])
def test_routes_agree(g):
    for xd, k in [(0.4, 0), (1.7, 2), (-2.3, -1), (3.0, 3)]:
        a = gh_transform(g, xd, k, method="fourier")
        b = gh_transform(g, xd, k, method="quadrature")
        assert abs(a - b) <= 1e-9


def test_modulus_bounded_by_l1():
    xs = np.linspace(-8, 8, 41)
    tab = gh_table(MIX, xs, 6)
    assert np.max(np.abs(tab)) <= MIX.l1_norm() * (1 + 1e-9)


def test_continuity_at_zero():
    near = [abs(gh_transform(MIX, h, 1) - gh_transform(MIX, 0.0, 1)) for h in (1e-2, 1e-4, 1e-6)]
    assert near[0] > near[1] > near[2] and near[2] < 1e-2


def test_convolution_identity():
    dev, tail = gh_convolve_check(G, YG, 1.0, 0, K_trunc=15)
    assert dev <= 1e-7
    dev, tail = gh_convolve_check(MIX, G, 1.3, 2, K_trunc=15)
    assert dev <= 1e-7


def test_convolution_fubini_at_zero():
    fg = convolve(MIX, YG.__add__(HorizontalFunction.gaussian(1, 1.0, 0.5)))
    lhs = gh_transform(fg, 0.0, 0)
    rhs = MIX.integral() * (YG.integral() + 0.5 * math.pi)
    assert abs(lhs - rhs) <= 1e-12


def test_convolution_zero():
    z = HorizontalFunction(1, 1.0, {})
    assert convolve(z, G).is_zero()
    assert abs(gh_transform(convolve(z, G), 1.0, 0)) == 0


@pytest.mark.parametrize("g", [G, YG])
def test_inversion(g):
    theta = gh_values(g)
    for w in random_points(np.random.default_rng(3), 10, 1, 0.8):
        Y = (np.array(w.y), np.array(w.eta))
        exact = complex(g.evaluate(w.y[0], w.eta[0]))
        assert abs(gh_inverse(theta, Y) - exact) <= 1e-3


def test_inversion_zero():
    theta = gh_values(HorizontalFunction(1, 1.0, {}))
    assert gh_inverse(theta, (np.array([0.3]), np.array([0.2]))) == 0


def test_plancherel():
    lhs, rhs, ratio = gh_plancherel_check(G)
    assert lhs == pytest.approx(math.pi / 2, rel=1e-14)
    assert abs(ratio - 1) <= 1e-3
    _, rhs4, _ = gh_plancherel_check(G.scale(2.0))
    assert rhs4 == pytest.approx(4 * rhs, rel=1e-12)
    assert abs(gh_plancherel_check(MIX)[2] - 1) <= 1e-3


def test_decay_transfers():
    r = gh_decay_check(MIX, 2, xdots=np.array([2.0, -0.7]), kmax=3)
    assert r["laplace_transfer"] <= 1e-6 and r["T_transfer"] <= 1e-6
    r = gh_decay_check(MIX, 2)
    assert math.isfinite(r["constant"])


def test_radial_function_has_only_k0():
    g = HorizontalFunction(1, 1.0, {(0, 0): 1.0, (2, 0): 0.5, (0, 2): 0.5})
    tab = gh_table(g, np.array([0.3, 1.0, -2.0]), 4)
    assert np.max(np.abs(np.delete(tab, 4, axis=1))) <= 1e-10
    assert np.min(np.abs(tab[:, 4])) > 1e-3


def test_dimension_errors():
    with pytest.raises(ValueError):
        gh_transform(G, (1.0, 1.0), (0, 0))
    with pytest.raises(ValueError):
        gh_transform(HorizontalFunction.gaussian(2), (1.0, -1.0), (0, 0))
    with pytest.raises(ValueError):
        gh_table(G, np.array([1.0]), 200, nz=64)
