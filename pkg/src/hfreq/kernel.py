"""The boundary kernel K(xdot, k, Y), its tensor K_d, the periodized K-tilde and its identities."""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from . import _kernels
from .numerics import SeriesControl

NZ_DEFAULT = 256
SERIES_BOX = 6.0
SERIES_CTRL = SeriesControl(max_terms=120 * 120, abs_tail_tol=1e-14, consecutive_small=3)


class OutsideKernelBox(ValueError):
    pass


def _sgn(x):
    return 1.0 if x >= 0 else -1.0


def kernel_K(xdot: float, k: int, Y, method: str = "integral", nz: int = NZ_DEFAULT):
    """(1/2pi) int exp(i(2|xdot|^{1/2}(y sin z + eta sgn(xdot) cos z) + k z)) dz.

    Y = (y, eta); arrays broadcast (integral method).
    """
    y, eta = Y
    k = int(k)
    if method == "integral":
        root = math.sqrt(abs(xdot))
        out = _kernels.kernel_table(root, _sgn(xdot), abs(k), y, eta, nz)
        row = out[k + abs(k)]
        return complex(row) if np.ndim(row) == 0 else row
    if method == "series":
        return kernel_K_series(xdot, k, (float(y), float(eta)))[0]
    raise ValueError(f"unknown method {method!r}")


def kernel_K_table(xdot: float, kmax: int, y, eta, nz: int = NZ_DEFAULT):
    """Rows k = -kmax..kmax of K(xdot, k, (y, eta))."""
    return _kernels.kernel_table(math.sqrt(abs(xdot)), _sgn(xdot), int(kmax), y, eta, nz)


@lru_cache(maxsize=None)
def F_coeff(l1: int, l2: int, k: int) -> int:
    """sum over k + l1 - 2 l1' = l2 - 2 l2' of (-1)^{l2-l2'} C(l1,l1') C(l2,l2')."""
    if l1 < 0 or l2 < 0:
        raise ValueError("F_coeff needs l1, l2 >= 0")
    out = 0
    for a in range(l1 + 1):
        two_b = l2 - k - l1 + 2 * a
        if two_b % 2 or not 0 <= two_b // 2 <= l2:
            continue
        b = two_b // 2
        out += (-1) ** (l2 - b) * math.comb(l1, a) * math.comb(l2, b)
    return out


def kernel_K_series(xdot: float, k: int, Y, ctrl: SeriesControl = SERIES_CTRL, box: float = SERIES_BOX):
    """sum (i eta)^l1 y^l2 /(l1! l2!) F(l1,l2,k) sgn(xdot)^l1 |xdot|^{(l1+l2)/2}.

    Returns (value, tail_bound).  |F| <= 2^{l1+l2} bounds each term by
    (2r|eta|)^l1/l1! (2r|y|)^l2/l2!, r = |xdot|^{1/2}, which sets both orders.
    """
    y, eta = (float(v) for v in Y)
    r = math.sqrt(abs(xdot))
    if r * (abs(y) + abs(eta)) > box:
        raise OutsideKernelBox(f"|xdot|^(1/2)(|y|+|eta|) exceeds {box}")
    if r == 0 or (y == 0 and eta == 0):
        return (1.0 + 0j if k == 0 else 0j), 0.0
    s = _sgn(xdot)
    side = int(math.isqrt(ctrl.max_terms))
    L1, tail1 = _order(2 * r * abs(eta), ctrl, side)
    L2, tail2 = _order(2 * r * abs(y), ctrl, side)
    pe = [(1j * s * r * eta) ** l / math.factorial(l) for l in range(L1 + 1)]
    py = [(r * y) ** l / math.factorial(l) for l in range(L2 + 1)]
    acc = []
    for l1 in range(L1 + 1):
        for l2 in range(L2 + 1):
            # parity: F vanishes unless l1 + l2 = k mod 2
            if (l1 + l2 - k) % 2:
                continue
            f = F_coeff(l1, l2, k)
            if f:
                acc.append(pe[l1] * py[l2] * f)
    val = complex(math.fsum(z.real for z in acc), math.fsum(z.imag for z in acc))
    e1 = math.exp(2 * r * abs(eta))
    e2 = math.exp(2 * r * abs(y))
    return val, tail1 * e2 + e1 * tail2


def _order(x, ctrl, side):
    # smallest L with consecutive_small terms x^l/l! below tol; tail by the ratio bound
    small, t = 0, 1.0
    for ell in range(side):
        t = x ** ell / math.factorial(ell) if ell < 170 else 0.0
        small = small + 1 if t < ctrl.abs_tail_tol else 0
        if small >= ctrl.consecutive_small:
            break
    ell_next = ell + 1
    nxt = x ** ell_next / math.factorial(ell_next) if ell_next < 170 else 0.0
    ratio = x / (ell_next + 1)
    tail = nxt / (1 - ratio) if ratio < 1 else math.inf
    return ell, tail


def _check_orthant(xdot):
    signs = {1 if v > 0 else -1 for v in xdot if v != 0}
    if len(signs) > 1:
        raise ValueError(f"xdot components of mixed sign: {tuple(xdot)}")


def kernel_Kd(xdot, k, Y, method: str = "integral", nz: int = NZ_DEFAULT):
    """prod_j K(xdot_j, k_j, (y_j, eta_j))."""
    xdot = tuple(float(v) for v in np.atleast_1d(getattr(xdot, "xdot", xdot)))
    k = tuple(int(v) for v in np.atleast_1d(getattr(k, "entries", k)))
    _check_orthant(xdot)
    y, eta = Y
    y = np.asarray(y, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if len(xdot) == 1 and (y.ndim == 0 or y.shape[-1:] != (1,)):
        return kernel_K(xdot[0], k[0], (y, eta), method, nz)
    if y.shape[-1] != len(xdot) or len(k) != len(xdot):
        raise ValueError("dimension mismatch in kernel_Kd")
    out = 1.0
    for j in range(len(xdot)):
        out = out * kernel_K(xdot[j], k[j], (y[..., j], eta[..., j]), method, nz)
    return out


def kernel_tilde(xdot: float, z, Y):
    """exp(-2i|xdot|^{1/2}(y sin z - sgn(xdot) eta cos z)); its k-th Fourier coefficient is K(xdot, k, Y)."""
    y, eta = Y
    r = math.sqrt(abs(xdot))
    return np.exp(-2j * r * (y * np.sin(z) - _sgn(xdot) * eta * np.cos(z)))


def kernel_tilde_coeffs(xdot: float, Y, kmax: int, nz: int = NZ_DEFAULT):
    """(1/2pi) int K-tilde e^{-ikz} dz for k = -kmax..kmax by the periodic trapezoid."""
    z = -math.pi + 2.0 * math.pi * np.arange(nz) / nz
    kt = kernel_tilde(xdot, z, Y)
    ks = np.arange(-kmax, kmax + 1)
    return (np.exp(-1j * np.outer(ks, z)) @ kt) / nz


def bessel_tail(x: float, K: int) -> float:
    """Bound on sum_{|k|>K} |K(xdot,k,Y)| with x = |xdot|^{1/2}|Y|, from |J_k(2x)| <= x^k/k!."""
    tot, t = 0.0, x ** (K + 1) / math.factorial(K + 1)
    j = K + 1
    while t > 1e-300:
        tot += t
        j += 1
        t *= x / j
        if j > K + 400:
            break
    return 2.0 * tot


def _fd1(f, x, h):
    return (f(x + h) - f(x - h)) / (2 * h)


def _fd2(f, x, h):
    return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h)


def _rich(op, f, x, h):
    # one Richardson step on a second-order central difference
    return (4 * op(f, x, h / 2) - op(f, x, h)) / 3


def kernel_identity_suite(xdot: float, k: int, Y, Y2=None, K_trunc: int = 20, h: float = 1e-4,
                          nz: int = NZ_DEFAULT) -> dict:
    y, eta = (float(v) for v in Y)
    K = lambda xd, kk, yy, ee: kernel_K(xd, kk, (yy, ee), nz=nz)
    base = K(xdot, k, y, eta)
    rep = {}
    rep["sym_reflect"] = abs(K(xdot, -k, -y, -eta) - base.conjugate())
    rep["sym_parity"] = abs(K(-xdot, -k, y, eta) - (-1) ** k * base)
    rep["sym_conj"] = abs(K(-xdot, k, y, eta) - base.conjugate())
    lap = (K(xdot, k, y + h, eta) + K(xdot, k, y - h, eta) + K(xdot, k, y, eta + h)
           + K(xdot, k, y, eta - h) - 4 * base) / (h * h)
    rep["laplace"] = abs(lap + 4 * abs(xdot) * base)
    dy = (K(xdot, k, y + h, eta) - K(xdot, k, y - h, eta)) / (2 * h)
    de = (K(xdot, k, y, eta + h) - K(xdot, k, y, eta - h)) / (2 * h)
    rep["T_relation"] = abs(1j * k * base - _sgn(xdot) * (eta * dy - y * de))
    if Y2 is None:
        Y2 = (0.4 * y - 0.3, 0.5 * eta + 0.2)
    y2, e2 = (float(v) for v in Y2)
    lhs = K(xdot, k, y + y2, eta + e2)
    t1 = kernel_K_table(xdot, K_trunc + abs(k), y, eta, nz)
    t2 = kernel_K_table(xdot, K_trunc, y2, e2, nz)
    off = K_trunc + abs(k)
    conv = sum(t1[off + k - kp] * t2[K_trunc + kp] for kp in range(-K_trunc, K_trunc + 1))
    rep["convolution"] = abs(lhs - conv)
    rep["convolution_tail"] = bessel_tail(math.sqrt(abs(xdot)) * math.hypot(y2, e2), K_trunc)
    if xdot > 0:
        hx = 1e-4 * max(1.0, xdot)
        g = lambda xd: K(xd, k, y, eta)
        d1 = _rich(_fd1, g, xdot, hx)
        d2 = _rich(_fd2, g, xdot, hx)
        rep["radial_ode"] = abs((y * y + eta * eta) * base + xdot * d2 + d1 - k * k / (4 * xdot) * base)
    rep["symmetry_max"] = max(rep["sym_reflect"], rep["sym_parity"], rep["sym_conj"])
    return rep


def kernel_decay_fit(xdot: float, Y, N: int, kmax: int = 40, nz: int = NZ_DEFAULT) -> float:
    """sup_k (1+|k|)^N |K(xdot, k, Y)|, sampled on |k| <= kmax."""
    y, eta = Y
    t = np.abs(kernel_K_table(xdot, kmax, y, eta, nz))
    ks = np.abs(np.arange(-kmax, kmax + 1))
    return float(np.max((1.0 + ks) ** N * t))
