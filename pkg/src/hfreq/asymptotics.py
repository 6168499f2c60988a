"""Limits at lambda -> 0: W -> K with rate, the concentration limit and the horizontal limit.

Near lambda = 0 the relevant n run to ~ 1/|lambda|, so sums over n use
numerics.lattice_sum, and Gaussian coefficients at large n come from the
closed-form diagonal base plus local ladder windows.
"""
from __future__ import annotations

import math
import warnings

import numpy as np

from .frequency import boundary_measure, make_xdot_rule
from .hermite import HermiteCoefficientVector, ladder_power, matrix_element
from .horizontal import HorizontalFunction, gh_table
from .kernel import kernel_K
from .numerics import composite_legendre, lattice_sum, loglog_fit
from .wigner import wigner_1d_ladder

DEFAULT_EPS = tuple(0.1 * 0.5 ** j for j in range(8))


# W -> K


def w_to_k_limit(xdot: float, k: int, Y, lams, R0: float | None = None):
    """e(lam) = |W(n, n+k, lam, Y) - K(2 lam n, k, Y)| with n = round(xdot/(2 lam))."""
    if not xdot > 0:
        raise ValueError("xdot must be positive")
    y, eta = (float(v) for v in Y)
    lams = np.asarray(lams, dtype=float)
    errs = []
    for lam in lams:
        n = int(round(xdot / (2.0 * lam)))
        m = n + k
        if m < 0:
            raise ValueError("k makes m negative for this n")
        if R0 is not None and lam * (n + m) + abs(k) + lam > R0:
            raise ValueError("point leaves the admissible box")
        xl = 2.0 * lam * n
        errs.append(abs(wigner_1d_ladder(n, m, lam, y, eta) - kernel_K(xl, k, (y, eta))))
    errs = np.array(errs)
    if np.all(errs == 0):
        return errs, math.inf, 1.0
    slope, _, r2 = loglog_fit(lams, errs)
    return errs, slope, r2


def H_term(l1: int, l2: int, n: int, m: int, lam: float) -> float:
    """|lam|^{(l1+l2)/2} (M^l1 H_m | d^l2 H_n)."""
    return abs(lam) ** ((l1 + l2) / 2.0) * matrix_element(l1, l2, n, m)


def H_term_limit(l1, l2, k, xdot, lams):
    """|H_{l1,l2}(n, n+k, lam) - F(l1,l2,k)(lam n/2)^{(l1+l2)/2}| along n = round(xdot/(2 lam))."""
    from .kernel import F_coeff
    F = F_coeff(l1, l2, k)
    errs = []
    for lam in lams:
        n = int(round(xdot / (2.0 * lam)))
        errs.append(abs(H_term(l1, l2, n, n + k, lam) - F * (lam * n / 2.0) ** ((l1 + l2) / 2.0)))
    errs = np.array(errs)
    # exact along the sequence up to the final rounding: nothing to fit
    if np.all(errs <= 1e-13):
        return errs, math.inf, 1.0
    slope, _, r2 = loglog_fit(lams, errs)
    return errs, slope, r2


def ladder_bound(ell: int, n: int, lam: float, sign: int = 1) -> float:
    """||lam^{l/2}((A +- C)/2)^l H_n - (lam n/2)^{l/2} sum (+-1)^{l-l'} C(l,l') H_{n+l-2l'}||.

    The ladder vector is exact; only the final coefficients are rounded.
    """
    op = "M" if sign > 0 else "D"
    v = ladder_power(op, ell, HermiteCoefficientVector.basis(n)).coeffs
    pref = (lam * n / 2.0) ** (ell / 2.0)
    ref = {}
    for lp in range(ell + 1):
        j = n + ell - 2 * lp
        if j >= 0:
            ref[j] = ref.get(j, 0.0) + pref * sign ** (ell - lp) * math.comb(ell, lp)
    sc = lam ** (ell / 2.0)
    keys = set(v) | set(ref)
    return math.sqrt(math.fsum((sc * v.get(j, 0.0) - ref.get(j, 0.0)) ** 2 for j in keys))


def ladder_bound_fit(ell, xdot, lams, sign=1):
    errs = np.array([ladder_bound(ell, int(round(xdot / (2.0 * lam))), lam, sign) for lam in lams])
    slope, _, r2 = loglog_fit(lams, errs)
    return errs, slope, r2


# concentration limit


def indicator_profile(t):
    """(1/2) 1_{[-1,1]}."""
    return 0.5 * (np.abs(np.asarray(t, dtype=float)) <= 1.0)


def bump_profile(t):
    """Smooth compactly supported bump on [-1,1] with unit integral."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1
    out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2)) / 0.44399381616807943
    return out


def partition_of_unity(xdot, lam) -> int:
    """Number of n >= 0 with xdot in Q_{n,lam} = 2 lam n + 2 lam [0, 1) (d = 1, sign of lam)."""
    if xdot * lam < 0:
        return 0
    t = xdot / (2.0 * lam)
    return sum(1 for n in (math.floor(t) - 1, math.floor(t), math.floor(t) + 1) if n >= 0 and n <= t < n + 1)


def _positive_rule(lo, hi, panels=12, nodes=12):
    edges = lo * (hi / lo) ** (np.arange(panels + 1) / panels)
    edges[0], edges[-1] = lo, hi
    return composite_legendre(edges, nodes)


def _profile_integral(chi_hat, support):
    r = _positive_rule(1e-8, support, 14, 24)
    mass = 0.0
    for sg in (-1, 1):
        mass += float(np.sum(r.weights * chi_hat(sg * r.nodes)))
    return mass


def concentration_pairing(psi, chi_hat, eps, k_max=4, support=1.0, xdot_max=40.0, puncture=1e-6,
                          panels=12, nodes=12):
    """sum_{n,m} int eps^{-1} chi_hat(lam/eps) theta(n, m, lam) |lam| dlam, d = 1.

    theta(n, m, lam) = psi(lam (n + m), m - n); psi is vectorized over arrays of
    signed xdot at fixed integer k.  The lambda integral runs over
    puncture*eps <= |lam| <= support*eps.
    """
    r = _positive_rule(puncture * eps, support * eps, panels, nodes)
    tot = []
    for sg in (-1.0, 1.0):
        for lam, w in zip(r.nodes, r.weights):
            prof = float(chi_hat(sg * lam / eps)) / eps
            if prof == 0.0:
                continue
            inner = 0j
            for k in range(-k_max, k_max + 1):
                start = max(0, -k)
                stop = int(math.ceil(xdot_max / (2.0 * lam))) + abs(k)
                phi = (lambda n, k=k, lam=lam: psi(sg * lam * (2 * np.asarray(n) + k), k))
                inner += lattice_sum(phi, start, stop, 1.0 / lam)
            tot.append(w * lam * prof * inner)
    return complex(math.fsum(v.real for v in tot), math.fsum(v.imag for v in tot))


def concentration_limit(psi, chi_hat=indicator_profile, eps_seq=DEFAULT_EPS, k_max=4, support=1.0,
                        xdot_rule=None):
    """Per-eps |pairing(eps) - boundary_measure(psi)| and the boundary value."""
    mass = _profile_integral(chi_hat, support)
    if abs(mass - 1.0) > 1e-6:
        warnings.warn(f"profile integral {mass:.6g} != 1; normalizing")
        base = chi_hat
        chi_hat = lambda t: base(t) / mass
    limit = boundary_measure(lambda x, k: _psi_grid(psi, x, k), k_max, xdot_rule or make_xdot_rule(40.0, 8, 16))
    devs = np.array([abs(concentration_pairing(psi, chi_hat, e, k_max, support) - limit) for e in eps_seq])
    return devs, limit


def _psi_grid(psi, x, k):
    # boundary_measure layout: x (Q, 1), k (1, K)
    x = np.asarray(x, dtype=float)[:, 0]
    cols = [np.asarray(psi(x, int(kk)), dtype=complex) * np.ones_like(x) for kk in np.asarray(k)[0]]
    return np.stack(cols, axis=1)


# horizontal limit


def gaussian_profile(s):
    """chi(s) = e^{-s^2/4}: chi(0) = 1, transform 2 sqrt(pi) e^{-tau^2}."""
    return np.exp(-np.asarray(s) ** 2 / 4.0)


def gaussian_profile_hat(tau):
    return 2.0 * math.sqrt(math.pi) * np.exp(-np.asarray(tau, dtype=float) ** 2)


def band_values(g: HorizontalFunction, lam: float, n, k: int):
    """g-hat(n, n+k, lam) = int conj W(n, n+k, lam, Y) g(Y) dY for an array of n (d = 1).

    Uses the diagonal base of e^{-a|Y|^2} and local ladder windows, so large n
    cost O(deg^2) each.
    """
    if g.d != 1:
        raise ValueError("band_values is one-dimensional")
    n = np.asarray(n, dtype=np.int64)
    out = np.zeros(n.shape, dtype=complex)
    al = abs(lam)
    r = (g.a - al) / (g.a + al)
    P = g.degree
    for alpha, c in g.terms.items():
        p, q = alpha
        if p + q < abs(k) or (p + q - abs(k)) % 2:
            continue
        # window of absolute indices [o, o + L] around each n
        o = np.maximum(n - P - abs(k), 0)
        L = 2 * (P + abs(k))
        idx = o[:, None] + np.arange(L + 1)[None, :]
        ii = np.arange(L + 1)
        J = np.zeros(n.shape + (L + 1, L + 1), dtype=complex)
        J[:, ii, ii] = math.pi / (g.a + al) * np.power(r, idx.astype(float))
        off = o.astype(float)
        for _ in range(p):
            J = _window_step(J, off, lam, "y")
        for _ in range(q):
            J = _window_step(J, off, lam, "eta")
        i = n - o
        out += c * J[np.arange(n.size), i, i + k]
    return out


def _window_step(J, off, lam, kind):
    """One multiplication step on windows with absolute start indices off (same for rows and columns).

    Entries depending on indices outside the window become invalid at the
    window edges; windows are wide enough that the extracted entries never
    touch them.  Index -1 is a true zero, which the padding reproduces.
    """
    L = J.shape[-1]
    ks = off[:, None] + np.arange(L)[None, :]
    s1 = np.sqrt(ks + 1.0)
    s0 = np.sqrt(ks)
    Z = np.zeros_like(J)
    up_n = Z.copy(); up_n[:, :-1, :] = J[:, 1:, :]
    dn_n = Z.copy(); dn_n[:, 1:, :] = J[:, :-1, :]
    up_m = Z.copy(); up_m[:, :, :-1] = J[:, :, 1:]
    dn_m = Z.copy(); dn_m[:, :, 1:] = J[:, :, :-1]
    c = 1.0 / math.sqrt(8.0 * abs(lam))
    R1, R0 = s1[:, :, None], s0[:, :, None]
    C1, C0 = s1[:, None, :], s0[:, None, :]
    if kind == "y":
        return c * (R1 * up_n + R0 * dn_n - C1 * up_m - C0 * dn_m)
    sg = 1.0 if lam > 0 else -1.0
    return -1j * sg * c * (R0 * dn_n - R1 * up_n + C0 * dn_m - C1 * up_m)


def horizontal_pairing(g: HorizontalFunction, psi, eps, k_max=0, support=6.0, xdot_max=40.0,
                       puncture=1e-6, chi_hat=gaussian_profile_hat, panels=12, nodes=12):
    """sum_{n,m} int F_H(g x chi(eps .))(n, m, lam) theta(n, m, lam) |lam| dlam with
    theta(n, m, lam) = psi(lam(n+m), m-n) and F_H(g x chi(eps .)) = g-hat(n, m, lam) eps^{-1} chi^(lam/eps)."""
    r = _positive_rule(puncture * eps, support * eps, panels, nodes)
    tot = []
    for sg in (-1.0, 1.0):
        for lam, w in zip(r.nodes, r.weights):
            slam = sg * lam
            prof = float(chi_hat(slam / eps)) / eps
            inner = 0j
            for k in range(-k_max, k_max + 1):
                start = max(0, -k)
                stop = int(math.ceil(xdot_max / (2.0 * lam))) + abs(k)
                phi = (lambda n, k=k, slam=slam: band_values(g, slam, n, k)
                       * psi(slam * (2 * np.asarray(n) + k), k))
                inner += lattice_sum(phi, start, stop, 1.0 / lam)
            tot.append(w * lam * prof * inner)
    return complex(math.fsum(v.real for v in tot), math.fsum(v.imag for v in tot))


def horizontal_limit(g: HorizontalFunction, psi, eps_seq=DEFAULT_EPS, k_max=0, xdot_rule=None):
    """Per-eps |<F_H(g x chi(eps .)), theta> - 2 pi boundary_measure(G_H g theta)|, chi(s) = e^{-s^2/4}.

    The Gaussian chi has a Gaussian (not compactly supported) transform; the
    lambda integral is cut at 6 eps where it is below 1e-15.  The default
    boundary rule uses narrow panels so compactly supported bumps are resolved.
    """
    rule = xdot_rule or make_xdot_rule(40.0, 160, 16)

    def theta0(x, k):
        G = gh_table(g, x[:, 0], int(np.max(np.abs(k))))
        kk = np.asarray(k)[0]
        return G[:, kk + int(np.max(np.abs(k)))] * _psi_grid(psi, x, k)

    limit = 2.0 * math.pi * boundary_measure(theta0, k_max, rule)
    devs = np.array([abs(horizontal_pairing(g, psi, e, k_max) - limit) for e in eps_seq])
    return devs, limit


def smooth_bump(center=1.0, radius=0.5):
    """psi(xdot, k) = delta_{k0} exp(-1/(1 - t^2)), t = (xdot - center)/radius."""
    def psi(x, k):
        x = np.asarray(x, dtype=float)
        if k != 0:
            return np.zeros_like(x)
        t = (x - center) / radius
        out = np.zeros_like(x)
        inside = np.abs(t) < 1
        out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
        return out
    return psi


def exp_profile(x, k):
    """psi(xdot, k) = delta_{k0} e^{-|xdot|}."""
    x = np.asarray(x, dtype=float)
    return np.exp(-np.abs(x)) if k == 0 else np.zeros_like(x)


def is_eventually_decreasing(seq, skip=2, slack=0.0):
    s = list(seq)[skip:]
    return all(b <= a * (1 + slack) for a, b in zip(s, s[1:]))
