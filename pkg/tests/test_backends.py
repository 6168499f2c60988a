import os
import subprocess
import sys

import numpy as np
import pytest

from hfreq import _kernels as kr

RNG = np.random.default_rng(21)
X = RNG.uniform(-4, 4, 37)
A, B = RNG.uniform(-2, 2, 29), RNG.uniform(-2, 2, 29)


@pytest.mark.parametrize("gauss", [True, False])
def test_hermite_parity(gauss):
    np.testing.assert_allclose(kr.hermite_table_numba(30, X, gauss), kr._hermite_table_np(30, X, gauss),
                               rtol=1e-13, atol=1e-300)


@pytest.mark.parametrize("s", [1.0, -1.0])
@pytest.mark.parametrize("gauss", [True, False])
def test_wigner_parity(s, gauss):
    a = kr.wigner_table_numba(24, s, A, B, gauss)
    b = kr._wigner_table_np(24, s, A, B, gauss)
    assert np.max(np.abs(a - b)) <= 1e-12 * max(1.0, np.max(np.abs(b)))


@pytest.mark.parametrize("sgn", [1.0, -1.0])
def test_kernel_parity(sgn):
    a = kr.kernel_table_numba(1.3, sgn, 6, A, B, 128)
    b = kr._kernel_table_np(1.3, sgn, 6, A, B, 128)
    assert np.max(np.abs(a - b)) <= 1e-13


def test_disable_flag():
    env = dict(os.environ, HFREQ_DISABLE_NUMBA="1")
    code = "from hfreq import _kernels as k; print(k.USE_NUMBA, k.DISABLED)"
    r = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert r.stdout.split() == ["False", "True"]
