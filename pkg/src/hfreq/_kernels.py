"""Hot loops: Hermite tables, Laguerre-form Wigner tables, circle-integral tables.

Each kernel exists twice: an explicit-loop version compiled with numba and a
vectorized numpy version.  ``HFREQ_DISABLE_NUMBA=1`` (or a missing numba)
selects the numpy versions.  Both are importable for parity tests and
benchmarks.
"""
import math
import os

import numpy as np

DISABLED = os.environ.get("HFREQ_DISABLE_NUMBA", "").strip() not in ("", "0")

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_NUMBA = numba is not None and not DISABLED

PI_M14 = math.pi ** -0.25


def _jit(fn):
    if numba is None:  # pragma: no cover
        return fn
    return numba.njit(cache=True)(fn)


# numba loop versions


def _hermite_table_loop(nmax, x, gauss):
    P = x.shape[0]
    out = np.empty((nmax + 1, P))
    c1 = np.empty(nmax + 1)
    c0 = np.empty(nmax + 1)
    for j in range(1, nmax):
        c1[j] = 2.0 / math.sqrt(2.0 * j + 2.0)
        c0[j] = math.sqrt(j / (j + 1.0))
    for p in range(P):
        xp = x[p]
        h0 = PI_M14
        if gauss:
            h0 *= math.exp(-0.5 * xp * xp)
        out[0, p] = h0
        if nmax > 0:
            out[1, p] = math.sqrt(2.0) * xp * h0
        for j in range(1, nmax):
            out[j + 1, p] = c1[j] * xp * out[j, p] - c0[j] * out[j - 1, p]
    return out


def _wigner_table_loop(nmax, s, a, b, gauss):
    # W(n, m) at scaled points (a, b) = sqrt|lam| (y, eta); Laguerre closed form
    P = a.shape[0]
    out = np.empty((nmax + 1, nmax + 1, P), dtype=np.complex128)
    for p in range(P):
        ap = a[p]
        bp = b[p]
        rho2 = ap * ap + bp * bp
        x = 2.0 * rho2
        pref0 = math.exp(-rho2) if gauss else 1.0
        bu = complex(math.sqrt(2.0) * ap, math.sqrt(2.0) * s * bp)   # n >= m
        bl = complex(-math.sqrt(2.0) * ap, math.sqrt(2.0) * s * bp)  # m > n
        pu = complex(pref0, 0.0)
        pl = complex(pref0, 0.0)
        for k in range(nmax + 1):
            if k > 0:
                pu = pu * bu / math.sqrt(k)
                pl = pl * bl / math.sqrt(k)
            # phi_j^{(k)} = sqrt(j!/(j+k)!) L_j^{(k)}(x), carried with prefactor
            prev_u = 0j
            prev_l = 0j
            cur_u = pu
            cur_l = pl
            for j in range(nmax + 1 - k):
                out[j + k, j, p] = cur_u
                if k > 0:
                    out[j, j + k, p] = cur_l
                c1 = (2.0 * j + k + 1.0 - x)
                c0 = math.sqrt(j * (j + k))
                den = math.sqrt((j + 1.0) * (j + 1.0 + k))
                nu = (c1 * cur_u - c0 * prev_u) / den
                nl = (c1 * cur_l - c0 * prev_l) / den
                prev_u = cur_u
                prev_l = cur_l
                cur_u = nu
                cur_l = nl
    return out


def _kernel_table_loop(root, sgn, kmax, y, eta, nz):
    # (1/2pi) int exp(i(2 root (y sin z + sgn eta cos z) + k z)) dz, trapezoid;
    # e^{ikz} by recurrence in k
    P = y.shape[0]
    K = 2 * kmax + 1
    out = np.zeros((K, P), dtype=np.complex128)
    for q in range(nz):
        z = -math.pi + 2.0 * math.pi * q / nz
        sz = math.sin(z)
        cz = math.cos(z)
        step = complex(cz, sz)
        first = complex(math.cos(kmax * z), -math.sin(kmax * z))
        for p in range(P):
            ph = 2.0 * root * (y[p] * sz + sgn * eta[p] * cz)
            e = complex(math.cos(ph), math.sin(ph)) * first
            for i in range(K):
                out[i, p] += e
                e *= step
    return out / nz


# numpy versions


def _hermite_table_np(nmax, x, gauss):
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = PI_M14 * (np.exp(-0.5 * x * x) if gauss else 1.0)
    if nmax > 0:
        out[1] = math.sqrt(2.0) * x * out[0]
    for j in range(1, nmax):
        out[j + 1] = 2.0 / math.sqrt(2.0 * j + 2.0) * x * out[j] - math.sqrt(j / (j + 1.0)) * out[j - 1]
    return out


def _wigner_table_np(nmax, s, a, b, gauss):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    rho2 = a * a + b * b
    x = 2.0 * rho2
    out = np.empty((nmax + 1, nmax + 1) + a.shape, dtype=complex)
    pref0 = np.exp(-rho2) if gauss else np.ones_like(rho2)
    bu = math.sqrt(2.0) * (a + 1j * s * b)
    bl = math.sqrt(2.0) * (-a + 1j * s * b)
    pu = pref0.astype(complex)
    pl = pref0.astype(complex)
    for k in range(nmax + 1):
        if k > 0:
            pu = pu * bu / math.sqrt(k)
            pl = pl * bl / math.sqrt(k)
        prev_u = np.zeros_like(pu)
        prev_l = np.zeros_like(pl)
        cur_u, cur_l = pu, pl
        for j in range(nmax + 1 - k):
            out[j + k, j] = cur_u
            if k > 0:
                out[j, j + k] = cur_l
            c1 = 2.0 * j + k + 1.0 - x
            c0 = math.sqrt(j * (j + k))
            den = math.sqrt((j + 1.0) * (j + 1.0 + k))
            prev_u, cur_u = cur_u, (c1 * cur_u - c0 * prev_u) / den
            prev_l, cur_l = cur_l, (c1 * cur_l - c0 * prev_l) / den
    return out


def _kernel_table_np(root, sgn, kmax, y, eta, nz):
    z = -np.pi + 2.0 * np.pi * np.arange(nz) / nz
    ph = 2.0 * root * (np.outer(np.sin(z), y) + sgn * np.outer(np.cos(z), eta))
    k = np.arange(-kmax, kmax + 1)
    ek = np.exp(1j * np.outer(k, z))
    return ek @ np.exp(1j * ph) / nz


hermite_table_numba = _jit(_hermite_table_loop)
wigner_table_numba = _jit(_wigner_table_loop)
kernel_table_numba = _jit(_kernel_table_loop)


def hermite_table(nmax, x, gauss=True):
    """Rows j = 0..nmax of H_j(x) (gauss=True) or H_j(x) e^{x^2/2}."""
    x = np.ascontiguousarray(x, dtype=float)
    if USE_NUMBA:
        shape = x.shape
        return hermite_table_numba(int(nmax), x.ravel(), bool(gauss)).reshape((nmax + 1,) + shape)
    return _hermite_table_np(int(nmax), x, gauss)


def wigner_table(nmax, s, a, b, gauss=True):
    """W(n, m) for n, m <= nmax at scaled points; gauss=False drops e^{-a^2-b^2}."""
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    shape = a.shape
    if USE_NUMBA:
        out = wigner_table_numba(int(nmax), float(s), np.ascontiguousarray(a).ravel(),
                                 np.ascontiguousarray(b).ravel(), bool(gauss))
        return out.reshape((nmax + 1, nmax + 1) + shape)
    return _wigner_table_np(int(nmax), float(s), a, b, gauss)


def kernel_table(root, sgn, kmax, y, eta, nz):
    """Rows k = -kmax..kmax of the trapezoid circle integral at points (y, eta)."""
    y, eta = np.broadcast_arrays(np.asarray(y, dtype=float), np.asarray(eta, dtype=float))
    shape = y.shape
    y1 = np.ascontiguousarray(y).ravel()
    e1 = np.ascontiguousarray(eta).ravel()
    if USE_NUMBA:
        out = kernel_table_numba(float(root), float(sgn), int(kmax), y1, e1, int(nz))
    else:
        out = _kernel_table_np(float(root), float(sgn), int(kmax), y1, e1, int(nz))
    return out.reshape((2 * kmax + 1,) + shape)
