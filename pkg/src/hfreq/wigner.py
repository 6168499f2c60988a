"""The kernel W(n, m, lam, Y) and the discrete operator Delta-hat.

Per axis W depends on (n, m, sgn lam) and the scaled point a = sqrt|lam| y,
b = sqrt|lam| eta.  Three evaluation routes are provided:

* ``ladder``: closed form e^{-rho^2} (sqrt2 (a + i s b))^k sqrt(j!/(j+k)!) L_j^{(k)}(2 rho^2)
  (n = j + k >= m = j; the m > n case uses -a in place of a), run through the
  normalized Laguerre recurrence;
* ``quadrature``: Gauss-Hermite in the integration variable;
* ``series``: the double power series in (lam^{1/2} eta, lam^{1/2} y) with exact
  ladder matrix elements, summed in exact rational arithmetic.  In floating
  point the series loses about e^{|lam||Y|^2} relative accuracy to
  cancellation, so the float inputs are converted to exact dyadic rationals
  and rounded once at the end.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _kernels
from .frequency import FrequencyPoint
from .hermite import _gram
from .numerics import SeriesControl

METHODS = ("auto", "ladder", "quadrature", "series")


@dataclass(frozen=True)
class WignerEvalSpec:
    method: str = "auto"
    nodes: int | None = None          # quadrature nodes per axis (None: scaling rule)
    ctrl: SeriesControl = field(default_factory=lambda: SeriesControl(max_terms=800, abs_tail_tol=1e-18,
                                                                      consecutive_small=4))
    R0: float = 3.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not self.R0 > 0:
            raise ValueError("R0 must be positive")


class OutsideSeriesBox(ValueError):
    pass


class QuadratureFlag(RuntimeError):
    pass


def split_Y(Y, d=None):
    """Accept (y, eta) for d = 1, (y_vec, eta_vec), or a HeisenbergPoint."""
    if hasattr(Y, "eta") and hasattr(Y, "y"):
        y, eta = Y.y, Y.eta
    else:
        y, eta = Y
    y = tuple(float(v) for v in np.atleast_1d(y))
    eta = tuple(float(v) for v in np.atleast_1d(eta))
    if len(y) != len(eta) or (d is not None and len(y) != d):
        raise ValueError("phase-space point has the wrong dimension")
    return y, eta


def in_box(w: FrequencyPoint, Y, R0=3.0) -> bool:
    y, eta = split_Y(Y, w.d)
    freq = abs(w.lam) * (w.n.order + w.m.order + w.d) + sum(abs(n - m) for n, m in zip(w.n, w.m))
    return freq <= R0 and math.sqrt(sum(v * v for v in y + eta)) <= R0


# ladder closed form


def wigner_1d_ladder(n: int, m: int, lam: float, y: float, eta: float) -> complex:
    s = 1.0 if lam > 0 else -1.0
    r = math.sqrt(abs(lam))
    a, b = r * y, r * eta
    rho2 = a * a + b * b
    x = 2.0 * rho2
    if n >= m:
        k, j_end, beta = n - m, m, complex(a, s * b)
    else:
        k, j_end, beta = m - n, n, complex(-a, s * b)
    pref = complex(math.exp(-rho2), 0.0)
    fac = math.sqrt(2.0) * beta
    for i in range(1, k + 1):
        pref = pref * fac / math.sqrt(i)
    prev, cur = 0j, pref
    for j in range(j_end):
        nxt = ((2.0 * j + k + 1.0 - x) * cur - math.sqrt(j * (j + k)) * prev) / math.sqrt((j + 1.0) * (j + 1.0 + k))
        prev, cur = cur, nxt
    return cur


def wigner_table(N: int, lam: float, y, eta, gauss: bool = True):
    """All W(n, m, lam, Y) with n, m <= N (d = 1), shape (N+1, N+1) + shape(y)."""
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    r = math.sqrt(abs(lam))
    s = 1.0 if lam > 0 else -1.0
    return _kernels.wigner_table(int(N), s, r * np.asarray(y, dtype=float), r * np.asarray(eta, dtype=float), gauss)


# quadrature


def quadrature_nodes(n, m, lam, eta):
    return max(n, m) + int(math.ceil(4.0 * abs(lam * eta))) + 16


@lru_cache(maxsize=64)
def _gh(N):
    return np.polynomial.hermite.hermgauss(N)


def wigner_1d_quadrature(n: int, m: int, lam: float, y: float, eta: float, nodes: int | None = None,
                         check: bool = False, tol: float = 1e-12) -> complex:
    """W = e^{2 i lam eta y} int e^{2 i lam eta z} H_{n,lam}(2y + z) H_{m,lam}(z) dz.

    In the scaled variable the Gaussian of the two Hermite factors centres at
    t = u + a; the remaining integrand is q_n(t + a) q_m(t - a) e^{2 i s b (t - a)}
    with q_j = H_j e^{x^2/2} polynomial.
    """
    N = nodes or quadrature_nodes(n, m, lam, eta)
    val = _quad_once(n, m, lam, y, eta, N)
    if check:
        ref = _quad_once(n, m, lam, y, eta, N + 16)
        if abs(ref - val) > tol:
            raise QuadratureFlag(f"W quadrature moved by {abs(ref - val):.3e} with 16 more nodes")
    return val


def _quad_once(n, m, lam, y, eta, N):
    s = 1.0 if lam > 0 else -1.0
    r = math.sqrt(abs(lam))
    a, b = r * y, r * eta
    t, w = _gh(N)
    qn = _kernels.hermite_table(n, t + a, gauss=False)[n]
    qm = _kernels.hermite_table(m, t - a, gauss=False)[m]
    vals = w * np.exp(2j * s * b * t) * qn * qm
    tot = complex(math.fsum(vals.real.tolist()), math.fsum(vals.imag.tolist()))
    # W = e^{2isab} W~ and W~ carries e^{-a^2} e^{-2isab}
    return math.exp(-a * a) * tot


# exact series


class _Powers:
    """Integer vectors op^l Hb_n in the Hb basis, extended on demand (op: C+A or A-C)."""

    def __init__(self, n, sign):
        self.sign = sign
        self.vecs = [[0] * n + [1]]
        self.norm2 = [_gram(n)]  # (v|v) in Hb inner product

    def get(self, ell):
        while len(self.vecs) <= ell:
            v = self.vecs[-1]
            out = [0] * (len(v) + 1)
            for j, c in enumerate(v):
                if c:
                    out[j + 1] += self.sign * c
                    if j:
                        out[j - 1] += 2 * j * c
            self.vecs.append(out)
            self.norm2.append(sum(c * c * _gram(j) for j, c in enumerate(out) if c))
        return self.vecs[ell]


@lru_cache(maxsize=128)
def _powers(n, sign):
    return _Powers(n, sign)


def _log_mag(x, pw, ell, base_n):
    # log of |x|^ell ||op^ell H_n|| / ell!   (orthonormal H_n)
    if x == 0:
        return -math.inf if ell else 0.0
    pw.get(ell)
    return ell * math.log(abs(x)) + 0.5 * (math.log(pw.norm2[ell]) - math.log(_gram(base_n))) - math.lgamma(ell + 1)


def _pick_order(x, pw, base_n, ctrl):
    """Smallest L after which ctrl.consecutive_small magnitudes stay below tol."""
    logtol = math.log(ctrl.abs_tail_tol)
    small = 0
    mags = []
    for ell in range(ctrl.max_terms):
        lm = _log_mag(x, pw, ell, base_n)
        mags.append(lm)
        small = small + 1 if lm < logtol else 0
        if small >= ctrl.consecutive_small:
            return ell, mags
    return ctrl.max_terms - 1, mags


def _tail_estimate(mags):
    # geometric tail from the last ratio (the ratio decays like ell^{-1/2})
    if len(mags) < 2 or mags[-1] == -math.inf:
        return 0.0
    r = math.exp(mags[-1] - mags[-2])
    if r >= 1:
        return math.inf
    return math.exp(mags[-1]) * r / (1 - r)


@dataclass
class SeriesResult:
    value: complex
    terms: tuple          # (L1 + 1, L2 + 1)
    tail_bound: float


def wigner_1d_series(n: int, m: int, lam: float, y: float, eta: float,
                     ctrl: SeriesControl | None = None) -> SeriesResult:
    """Sum (i s b)^l1 a^l2 /(l1! l2!) <(C+A)^l1 Hb_m, (A-C)^l2 Hb_n> / sqrt(2^{n+m} n! m!) exactly.

    With (C+A) = 2M and (A-C) = 2D this is the expansion
    sum (sgn lam)^l1 |lam|^{(l1+l2)/2} (2 i eta)^l1 (2 y)^l2 /(l1! l2!) (M^l1 H_m | D^l2 H_n).
    """
    ctrl = ctrl or WignerEvalSpec().ctrl
    s = 1 if lam > 0 else -1
    r = math.sqrt(abs(lam))
    a, b = r * y, r * eta
    pu = _powers(m, 1)    # (C + A)^l Hb_m
    pv = _powers(n, -1)   # (A - C)^l Hb_n
    L1, mag1 = _pick_order(2.0 * b / 2.0, pu, m, ctrl)   # |b|^l ||(C+A)^l H_m|| / l!
    L2, mag2 = _pick_order(a, pv, n, ctrl)
    sum1 = sum(math.exp(v) for v in mag1)
    sum2 = sum(math.exp(v) for v in mag2)
    tail = (_tail_estimate(mag1) * sum2 + sum1 * _tail_estimate(mag2)) / max(1.0, 1.0)

    fa, fb = Fraction(a), Fraction(b)
    E = max(fa.denominator.bit_length() - 1, fb.denominator.bit_length() - 1)
    A = fa.numerator << (E - (fa.denominator.bit_length() - 1))
    B = fb.numerator << (E - (fb.denominator.bit_length() - 1))
    # V = sum_l2 a^l2/l2! (A-C)^l2 Hb_n, numerators over D2 = 2^{E L2} L2!
    length = max(n, m) + max(L1, L2) + 2
    Nv = [0] * length
    fact_ratio = 1       # L2!/l2!, built downward
    ratios = [1] * (L2 + 1)
    for l2 in range(L2 - 1, -1, -1):
        fact_ratio *= (l2 + 1)
        ratios[l2] = fact_ratio
    Apow = 1
    for l2 in range(L2 + 1):
        coef = Apow * ratios[l2] << (E * (L2 - l2))
        for j, c in enumerate(pv.get(l2)):
            if c:
                Nv[j] += coef * c
        Apow *= A
    gram_w = [Nv[j] * _gram(j) if Nv[j] else 0 for j in range(length)]
    ratios1 = [1] * (L1 + 1)
    fr = 1
    for l1 in range(L1 - 1, -1, -1):
        fr *= (l1 + 1)
        ratios1[l1] = fr
    re_num = 0
    im_num = 0
    Bpow = 1
    for l1 in range(L1 + 1):
        u = pu.get(l1)
        T = 0
        for j, c in enumerate(u):
            if c and j < length and gram_w[j]:
                T += c * gram_w[j]
        term = (Bpow * ratios1[l1] << (E * (L1 - l1))) * T
        ph = l1 % 4
        sl = s ** l1
        if ph == 0:
            re_num += term
        elif ph == 1:
            im_num += sl * term
        elif ph == 2:
            re_num -= term
        else:
            im_num -= sl * term
        Bpow *= B
    den = (1 << (E * (L1 + L2))) * math.factorial(L1) * math.factorial(L2)
    norm2 = Fraction(1, _gram(n) * _gram(m))
    re = _signed_sqrt_scaled(Fraction(re_num, den), norm2)
    im = _signed_sqrt_scaled(Fraction(im_num, den), norm2)
    Wt = complex(re, im)
    value = cmath.exp(2j * s * a * b) * Wt
    return SeriesResult(value, (L1 + 1, L2 + 1), tail * math.sqrt(float(norm2) * _gram(n) * _gram(m)))


def _signed_sqrt_scaled(x: Fraction, s2: Fraction) -> float:
    """x * sqrt(s2) rounded once."""
    if x == 0:
        return 0.0
    from .hermite import _sqrt_fraction
    mag = _sqrt_fraction(x * x * s2)
    return mag if x > 0 else -mag


# public evaluation


def wigner_w(w: FrequencyPoint, Y, spec: WignerEvalSpec | None = None) -> complex:
    """W(n, m, lam, Y) as the product of its per-axis factors."""
    spec = spec or WignerEvalSpec()
    y, eta = split_Y(Y, w.d)
    method = spec.method
    if method == "series" and not in_box(w, (y, eta), spec.R0):
        raise OutsideSeriesBox(f"series evaluation requested outside B({spec.R0})")
    out = 1 + 0j
    for nj, mj, yj, ej in zip(w.n, w.m, y, eta):
        if method in ("auto", "ladder"):
            out *= wigner_1d_ladder(nj, mj, w.lam, yj, ej)
        elif method == "quadrature":
            out *= wigner_1d_quadrature(nj, mj, w.lam, yj, ej, spec.nodes)
        else:
            out *= wigner_1d_series(nj, mj, w.lam, yj, ej, spec.ctrl).value
    return out


def wigner_series(w: FrequencyPoint, Y, spec: WignerEvalSpec | None = None) -> SeriesResult:
    """Series route with its term counts and tail bound (product over axes)."""
    spec = spec or WignerEvalSpec(method="series")
    y, eta = split_Y(Y, w.d)
    if not in_box(w, (y, eta), spec.R0):
        raise OutsideSeriesBox(f"series evaluation requested outside B({spec.R0})")
    val, tail, terms = 1 + 0j, 0.0, []
    for nj, mj, yj, ej in zip(w.n, w.m, y, eta):
        r = wigner_1d_series(nj, mj, w.lam, yj, ej, spec.ctrl)
        # |W_j| <= 1 for every factor, so tails add
        tail = tail + r.tail_bound
        val *= r.value
        terms.append(r.terms)
    return SeriesResult(val, tuple(terms), tail)


def wigner_symmetries_check(w: FrequencyPoint, Y, spec: WignerEvalSpec | None = None) -> dict:
    y, eta = split_Y(Y, w.d)
    mY = (tuple(-v for v in y), tuple(-v for v in eta))
    W = wigner_w(w, (y, eta), spec)
    swap = FrequencyPoint(w.m, w.n, w.lam)
    flip = FrequencyPoint(w.n, w.m, -w.lam)
    swap_flip = FrequencyPoint(w.m, w.n, -w.lam)
    sign = (-1) ** (w.n.order + w.m.order)
    dev = {
        "conjugation": abs(wigner_w(swap, mY, spec) - W.conjugate()),
        "sign": abs(W - sign * wigner_w(swap_flip, (y, eta), spec)),
        "lambda_reflection": abs(wigner_w(flip, (y, eta), spec) - W.conjugate()),
    }
    dev["max"] = max(dev.values())
    return dev


# Delta-hat and its limit


def hat_delta_apply(theta, w: FrequencyPoint) -> complex:
    """-(|n+m|+d)/(2|lam|) theta(w) + 1/(2|lam|) sum_j [sqrt((n_j+1)(m_j+1)) theta(w_j^+) + sqrt(n_j m_j) theta(w_j^-)].

    Downward neighbours with n_j = 0 or m_j = 0 carry the factor sqrt(n_j m_j) = 0
    and are not evaluated.
    """
    lam = w.lam
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    inv = 1.0 / (2.0 * abs(lam))
    out = -(w.n.order + w.m.order + w.d) * inv * theta(w)
    for j in range(w.d):
        up = FrequencyPoint(w.n.shift(j, 1), w.m.shift(j, 1), lam)
        out += inv * math.sqrt((w.n[j] + 1) * (w.m[j] + 1)) * theta(up)
        c = math.sqrt(w.n[j] * w.m[j])
        if c:
            dn = FrequencyPoint(w.n.shift(j, -1), w.m.shift(j, -1), lam)
            out += inv * c * theta(dn)
    return out


def limit_operator_L(psi, xdot: float, k: int, dpsi=None, d2psi=None, h: float = 1e-4) -> float:
    """x psi'' + psi' - k^2/(4x) psi, derivatives analytic or by central differences."""
    if not xdot > 0:
        raise ValueError("xdot must be positive")
    p0 = psi(xdot, k)
    if dpsi is None:
        d1 = (psi(xdot + h, k) - psi(xdot - h, k)) / (2 * h)
    else:
        d1 = dpsi(xdot, k)
    if d2psi is None:
        d2 = (psi(xdot + h, k) - 2 * p0 + psi(xdot - h, k)) / (h * h)
    else:
        d2 = d2psi(xdot, k)
    return xdot * d2 + d1 - k * k / (4.0 * xdot) * p0


def hat_delta_limit_errors(psi, xdot: float, k: int, lams, dpsi=None, d2psi=None):
    """|Delta-hat Theta_psi - Theta_{L psi}| along n = round(xdot/(2 lam)), m = n + k, d = 1.

    Theta_psi(n, m, lam) = psi(|lam|(n + m + 1), m - n).  Returns (errors, slope, R^2).
    """
    from .numerics import loglog_fit

    def theta(p):
        return psi(abs(p.lam) * (p.n[0] + p.m[0] + 1), p.m[0] - p.n[0])

    Lpsi = lambda x, kk: limit_operator_L(psi, x, kk, dpsi, d2psi)
    errs = []
    for lam in lams:
        n = int(round(xdot / (2.0 * lam)))
        m = n + k
        if m < 0:
            raise ValueError("k makes m negative")
        w = FrequencyPoint(n, m, lam)
        errs.append(abs(hat_delta_apply(theta, w) - Lpsi(abs(lam) * (n + m + 1), k)))
    slope, _, r2 = loglog_fit(lams, errs)
    return np.array(errs), slope, r2
