import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hfreq.hermite import (HermiteCoefficientVector, MultiIndex, hermite_eval, hermite_eval_nd, hermite_rescaled,
                           ladder_apply, ladder_power, matrix_element, osc_apply)
from hfreq.numerics import integrate_1d, make_rule
from oracles import PI_M14, hermite_function, ladder_matrix_element

GH = make_rule("gauss_hermite", 64)


def test_multi_index():
    n = MultiIndex((2, 3))
    assert n.order == 5 and n.factorial == 12 and n.d == 2
    assert n.shift(0, -1).entries == (1, 3)
    with pytest.raises(ValueError):
        MultiIndex((0,)).shift(0, -1)
    with pytest.raises(ValueError):
        MultiIndex((-1, 2))


def test_hermite_eval_examples():
    assert hermite_eval(0, 0.0) == pytest.approx(0.751125544, abs=1e-9)
    assert hermite_eval(0, 0.0) == pytest.approx(PI_M14, abs=1e-16)
    assert hermite_eval(1, 0.0) == 0.0
    assert hermite_eval(1, 1.0) == pytest.approx(math.sqrt(2) * PI_M14 * math.exp(-0.5), abs=1e-15)
    with pytest.raises(ValueError):
        hermite_eval(-1, 0.0)


@pytest.mark.parametrize("n", range(5))
def test_hermite_eval_explicit_polynomials(n):
    for x in np.linspace(-4, 4, 41):
        assert abs(hermite_eval(n, x) - hermite_function(n, x)) <= 1e-13


def test_hermite_nd_examples():
    assert hermite_eval_nd((0, 0), (0.0, 0.0)) == pytest.approx(1 / math.sqrt(math.pi), abs=1e-16)
    assert hermite_eval_nd((1, 0), (0.0, 1.0)) == 0.0
    x = (0.37, -1.2)
    assert hermite_eval_nd((2, 3), x) == hermite_eval(2, x[0]) * hermite_eval(3, x[1])
    with pytest.raises(ValueError):
        hermite_eval_nd((1, 2), (0.1,))


def test_hermite_rescaled_examples():
    x = np.array([0.4])
    assert hermite_rescaled((0,), 1.0, x) == hermite_eval_nd((0,), x)
    assert hermite_rescaled((0,), 4.0, np.array([0.0])) == pytest.approx(math.sqrt(2) * PI_M14, abs=1e-15)
    with pytest.raises(ValueError):
        hermite_rescaled((0,), 0.0, x)


def _inner(n, m, lam=1.0):
    # (H_{n,lam} | H_{m,lam}); substitute x = u / sqrt|lam| and drop the Gaussian weight
    r = math.sqrt(abs(lam))
    f = lambda u: hermite_rescaled((n,), lam, u / r) * hermite_rescaled((m,), lam, u / r) * np.exp(u * u) / r
    return integrate_1d(GH, lambda u: np.array([f(np.array([v])) for v in u]).ravel()).real


@pytest.mark.parametrize("lam", [0.1, 1.0, 4.0])
def test_rescaled_orthonormality(lam):
    worst = max(abs(_inner(n, m, lam) - (n == m)) for n in range(9) for m in range(9))
    assert worst <= 1e-10


def test_ladder_examples():
    h0, h1 = HermiteCoefficientVector.basis(0), HermiteCoefficientVector.basis(1)
    assert ladder_apply("A", h0).is_zero()
    c = ladder_apply("C", h0).coeffs
    assert c.keys() == {1} and c[1] == pytest.approx(math.sqrt(2), abs=1e-15)
    m = ladder_apply("M", h1).coeffs
    assert m[0] == pytest.approx(math.sqrt(2) / 2, abs=1e-15)
    assert m[2] == pytest.approx(math.sqrt(4) / 2, abs=1e-15)


def _random_vector(coeffs):
    return HermiteCoefficientVector({j: Fraction(c) for j, c in enumerate(coeffs)})


@given(st.lists(st.integers(-9, 9), min_size=1, max_size=21))
def test_bracket_CA_exact(coeffs):
    v = _random_vector(coeffs)
    CA = ladder_apply("C", ladder_apply("A", v))
    AC = ladder_apply("A", ladder_apply("C", v))
    assert (CA - AC).exact_equal(v.scale(-2))


@given(st.lists(st.integers(-9, 9), min_size=1, max_size=21))
def test_oscillator_commutator_exact(coeffs):
    v = _random_vector(coeffs)
    osc = lambda u: ladder_power("M", 2, u) - ladder_power("D", 2, u)
    lhs = osc(ladder_apply("C", v)) - ladder_apply("C", osc(v))
    assert lhs.exact_equal(ladder_apply("C", v).scale(2))


@pytest.mark.parametrize("ell", range(1, 7))
def test_moment_bound(ell):
    for m in range(21):
        norm = ladder_power("M", ell, HermiteCoefficientVector.basis(m)).norm()
        assert norm <= (2 * m + 2 * ell) ** (ell / 2)


def test_matrix_element_examples():
    for n in range(6):
        for m in range(6):
            assert matrix_element(0, 0, n, m) == (1.0 if n == m else 0.0)
    assert matrix_element(1, 0, 0, 1) == pytest.approx(math.sqrt(2) / 2, abs=1e-15)
    x, w = GH.nodes, GH.weights
    for n in range(11):
        q = math.fsum((w * x * x * np.array([hermite_eval(n, v) ** 2 * math.exp(v * v) for v in x])).tolist())
        assert abs(matrix_element(2, 0, n, n) - q) <= 1e-12


@given(st.integers(0, 4), st.integers(0, 4), st.integers(0, 12), st.integers(0, 12))
def test_matrix_element_dense_oracle(l1, l2, n, m):
    ref = ladder_matrix_element(l1, l2, n, m)
    assert abs(matrix_element(l1, l2, n, m) - ref) <= 1e-12 * max(1.0, abs(ref))


def test_osc_examples():
    r = osc_apply(1.0, HermiteCoefficientVector.basis(3))
    assert r.exact and r.eigenvalues[0] == {3: 7.0}
    assert osc_apply(-2.0, HermiteCoefficientVector.basis(3)).eigenvalues[0] == {3: 14.0}
    r = osc_apply(0.5, [HermiteCoefficientVector.basis(1), HermiteCoefficientVector.basis(2)])
    assert r.exact and r.total == {(1, 2): (2 * 3 + 2) * 0.5}
    with pytest.raises(ValueError):
        osc_apply(0.0, HermiteCoefficientVector.basis(0))
