"""G_H for functions of the horizontal variable Y = (y, eta) alone.

G_H g(xdot, k) = int conj K_d(xdot, k, Y) g(Y) dY.  Writing conj K_d as a circle
average of plane waves turns this into a circle average of the Euclidean
Fourier transform g^(xi) at xi = 2|xdot|^{1/2}(sin z, sgn(xdot) cos z), which is
closed form for the family; the k-th coefficient comes from an FFT in z.  A
Gauss-Hermite route in Y is kept as a cross-check.
"""
from __future__ import annotations

import hashlib
import json
import math

import numpy as np

from .frequency import boundary_measure, make_xdot_rule
from .kernel import _check_orthant, kernel_Kd
from .numerics import abs_gaussian_moment, gaussian_ft_moment, gaussian_moment, make_rule

NZ_DEFAULT = 256


class HorizontalFunction:
    """sum_alpha c_alpha Y^alpha exp(-a|Y|^2); exponents ordered (y_1..y_d, eta_1..eta_d)."""

    __slots__ = ("d", "a", "terms")

    def __init__(self, d: int, a: float, terms=None):
        if d < 1:
            raise ValueError("d must be >= 1")
        if not a > 0:
            raise ValueError("Gaussian width a must be positive")
        self.d = int(d)
        self.a = float(a)
        canon = {}
        for alpha, c in (terms or {}).items():
            alpha = tuple(int(v) for v in alpha)
            if len(alpha) != 2 * d or any(v < 0 for v in alpha):
                raise ValueError(f"bad exponent {alpha} for d={d}")
            canon[alpha] = canon.get(alpha, 0j) + complex(c)
        self.terms = {k: v for k, v in sorted(canon.items()) if v != 0}

    @classmethod
    def gaussian(cls, d=1, a=1.0, c=1.0):
        return cls(d, a, {(0,) * (2 * d): c})

    @classmethod
    def monomial(cls, alpha, d=1, a=1.0, c=1.0):
        return cls(d, a, {tuple(alpha): c})

    def _like(self, terms):
        return HorizontalFunction(self.d, self.a, terms)

    def __add__(self, other):
        if (self.d, self.a) != (other.d, other.a):
            raise ValueError("functions with different dimension or width cannot be combined")
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0j) + v
        return self._like(t)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return self._like({k: c * v for k, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, HorizontalFunction) and (self.d, self.a, self.terms) == (other.d, other.a, other.terms)

    def is_zero(self):
        return not self.terms

    @property
    def degree(self):
        return max((sum(k) for k in self.terms), default=0)

    def diff(self, i):
        t = {}
        for k, v in self.terms.items():
            if k[i]:
                kk = list(k); kk[i] -= 1
                t[tuple(kk)] = t.get(tuple(kk), 0j) + k[i] * v
            kk = list(k); kk[i] += 1
            t[tuple(kk)] = t.get(tuple(kk), 0j) - 2.0 * self.a * v
        return self._like(t)

    def mul(self, i, c=1.0):
        t = {}
        for k, v in self.terms.items():
            kk = list(k); kk[i] += 1
            t[tuple(kk)] = c * v
        return self._like(t)

    def laplacian(self):
        out = self.scale(0)
        for i in range(2 * self.d):
            out = out + self.diff(i).diff(i)
        return out

    def T(self, j):
        """eta_j d_{y_j} - y_j d_{eta_j}, axis j 1-based."""
        iy, ie = j - 1, self.d + j - 1
        return self.diff(iy).mul(ie) - self.diff(ie).mul(iy)

    def evaluate(self, y, eta):
        y = np.asarray(y, dtype=float)
        eta = np.asarray(eta, dtype=float)
        if self.d == 1:
            y, eta = y[..., None], eta[..., None]
        coords = [y[..., j] for j in range(self.d)] + [eta[..., j] for j in range(self.d)]
        shape = np.broadcast(*coords).shape
        out = np.zeros(shape, dtype=complex)
        for k, v in self.terms.items():
            term = np.full(shape, v, dtype=complex)
            for x, p in zip(coords, k):
                if p:
                    term = term * x ** p
            out += term
        r2 = sum(x * x for x in coords)
        return out * np.exp(-self.a * r2)

    def __call__(self, Y):
        y, eta = Y
        return complex(self.evaluate(y, eta))

    def integral(self) -> complex:
        acc = 0j
        for k, v in self.terms.items():
            prod = v
            for p in k:
                prod *= gaussian_moment(p, self.a)
            acc += prod
        return acc

    def l2_norm_sq(self) -> float:
        acc = 0j
        items = list(self.terms.items())
        for k1, v1 in items:
            for k2, v2 in items:
                prod = 1.0
                for p, q in zip(k1, k2):
                    prod *= gaussian_moment(p + q, 2.0 * self.a)
                    if prod == 0.0:
                        break
                acc += v1 * v2.conjugate() * prod
        return float(acc.real)

    def l1_bound(self) -> float:
        tot = 0.0
        for k, v in self.terms.items():
            prod = abs(v)
            for p in k:
                prod *= abs_gaussian_moment(p, self.a)
            tot += prod
        return tot

    def l1_norm(self, nodes=None) -> float:
        if len(self.terms) <= 1:
            return self.l1_bound()
        n = 2 * self.d
        nodes = nodes or (160 if self.d == 1 else 40)
        R = math.sqrt((40.0 + self.degree * math.log(40.0 / self.a + 1.0)) / self.a)
        r = make_rule("gauss_legendre", nodes, (-R, R))
        grids = np.meshgrid(*([r.nodes] * n), indexing="ij")
        w = 1.0
        for i in range(n):
            shp = [1] * n; shp[i] = -1
            w = w * r.weights.reshape(shp)
        if self.d == 1:
            vals = self.evaluate(grids[0], grids[1])
        else:
            vals = self.evaluate(np.stack(grids[:self.d], -1), np.stack(grids[self.d:], -1))
        return float(math.fsum((w * np.abs(vals)).ravel().tolist()))

    def fourier(self, xi):
        """int e^{-i xi.Y} g(Y) dY for xi a sequence of 2d arrays (broadcast)."""
        xi = [np.asarray(v) for v in xi]
        shape = np.broadcast(*xi).shape
        cache = {}
        out = np.zeros(shape, dtype=complex)
        for k, v in self.terms.items():
            term = v
            for i, p in enumerate(k):
                key = (i, p)
                if key not in cache:
                    cache[key] = gaussian_ft_moment(p, self.a, xi[i])
                term = term * cache[key]
            out = out + term
        if not self.terms:
            for i in range(2 * self.d):
                out = out + 0 * gaussian_ft_moment(0, self.a, xi[i])
        return out

    def tensor(self, b: float = 1.0, chi_terms=None):
        """g(Y) (sum_j c_j s^j) e^{-b s^2} as a function on H^d."""
        from .heisenberg import GaussHermiteFunction
        chi_terms = chi_terms or {0: 1.0}
        t = {}
        for k, v in self.terms.items():
            for j, c in chi_terms.items():
                t[k + (int(j),)] = t.get(k + (int(j),), 0j) + v * c
        return GaussHermiteFunction(self.d, self.a, b, t)

    def to_dict(self):
        terms = [{"re": v.real, "im": v.imag, "alpha": list(k)} for k, v in self.terms.items()]
        return {"d": self.d, "a": self.a, "terms": terms}

    @classmethod
    def from_dict(cls, rec):
        for key in ("d", "a", "terms"):
            if key not in rec:
                raise KeyError(key)
        terms = {}
        for t in rec["terms"]:
            alpha = tuple(int(v) for v in t["alpha"])
            terms[alpha] = terms.get(alpha, 0j) + complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))
        return cls(int(rec["d"]), float(rec["a"]), terms)

    def digest(self):
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def __repr__(self):
        return f"HorizontalFunction(d={self.d}, a={self.a}, terms={self.terms})"


def _poly_shift(p, q, c1, c2):
    """Coefficients {(e, t): v} of (c1 Y - u)^p (c2 Y + u)^q in Y^e u^t."""
    out = {}
    for i in range(p + 1):
        ci = math.comb(p, i) * c1 ** (p - i) * (-1) ** i
        for j in range(q + 1):
            cj = math.comb(q, j) * c2 ** (q - j)
            key = (p - i + q - j, i + j)
            out[key] = out.get(key, 0.0) + ci * cj
    return out


def convolve(f: HorizontalFunction, g: HorizontalFunction) -> HorizontalFunction:
    """(f * g)(Y) = int f(Y - V) g(V) dV on R^{2d}, in closed form.

    a|Y-V|^2 + a'|V|^2 = (a+a')|V - cY|^2 + kappa|Y|^2 with c = a/(a+a'), so
    substituting V = cY + u leaves Gaussian moments in u.
    """
    if f.d != g.d:
        raise ValueError("dimension mismatch")
    A = f.a + g.a
    c = f.a / A
    kappa = f.a * g.a / A
    out = {}
    for k1, v1 in f.terms.items():
        for k2, v2 in g.terms.items():
            # per-coordinate {e: coeff}
            per = []
            for p, q in zip(k1, k2):
                red = {}
                for (e, t), val in _poly_shift(p, q, 1.0 - c, c).items():
                    mom = gaussian_moment(t, A)
                    if mom:
                        red[e] = red.get(e, 0.0) + val * mom
                per.append(red)
            combos = {(): v1 * v2}
            for red in per:
                combos = {key + (e,): cv * rv for key, cv in combos.items() for e, rv in red.items()}
            for key, val in combos.items():
                out[key] = out.get(key, 0j) + val
    return HorizontalFunction(f.d, kappa, out)


# the transform


def _z_grid(nz):
    return -math.pi + 2.0 * math.pi * np.arange(nz) / nz


def gh_table(g: HorizontalFunction, xdot, kmax: int, nz: int = NZ_DEFAULT):
    """G_H g at the points xdot (d = 1: array (Q,); d = 2: array (Q, 2)) for |k|_inf <= kmax.

    Returns shape (Q, 2kmax+1) for d = 1 and (Q, 2kmax+1, 2kmax+1) for d = 2.
    """
    if 2 * kmax + 1 > nz:
        raise ValueError("nz must exceed 2 kmax + 1")
    z = _z_grid(nz)
    ks = np.arange(-kmax, kmax + 1)
    phase = (-1.0) ** ks   # e^{-ik z_j} = (-1)^k e^{-2 pi i j k / nz}
    xdot = np.asarray(xdot, dtype=float)
    if g.d == 1:
        xdot = xdot.reshape(-1)
        r = np.sqrt(np.abs(xdot))[:, None]
        s = np.where(xdot >= 0, 1.0, -1.0)[:, None]
        vals = g.fourier((2 * r * np.sin(z)[None, :], 2 * r * s * np.cos(z)[None, :]))
        F = np.fft.fft(vals, axis=1) / nz
        return F[:, ks % nz] * phase[None, :]
    if g.d == 2:
        xdot = xdot.reshape(-1, 2)
        for row in xdot:
            _check_orthant(row)
        out = np.empty((xdot.shape[0], ks.size, ks.size), dtype=complex)
        Z1, Z2 = z[:, None], z[None, :]
        for q, (x1, x2) in enumerate(xdot):
            r1, r2 = math.sqrt(abs(x1)), math.sqrt(abs(x2))
            s = -1.0 if min(x1, x2) < 0 else 1.0
            vals = g.fourier((2 * r1 * np.sin(Z1), 2 * r2 * np.sin(Z2), 2 * r1 * s * np.cos(Z1), 2 * r2 * s * np.cos(Z2)))
            F = np.fft.fft2(vals) / (nz * nz)
            out[q] = F[np.ix_(ks % nz, ks % nz)] * np.outer(phase, phase)
        return out
    raise ValueError("d must be 1 or 2")


def gh_transform(g: HorizontalFunction, xdot, k, method: str = "fourier", nz: int = NZ_DEFAULT,
                 nodes: int | None = None) -> complex:
    xd = tuple(float(v) for v in np.atleast_1d(xdot))
    kk = tuple(int(v) for v in np.atleast_1d(k))
    if len(xd) != g.d or len(kk) != g.d:
        raise ValueError("dimension mismatch")
    _check_orthant(xd)
    if method == "fourier":
        kmax = max(abs(v) for v in kk)
        nz_ = max(nz, 2 * kmax + 2)
        if g.d == 1:
            return complex(gh_table(g, np.array(xd), kmax, nz_)[0, kk[0] + kmax])
        return complex(gh_table(g, np.array([xd]), kmax, nz_)[0, kk[0] + kmax, kk[1] + kmax])
    if method == "quadrature":
        return _gh_quadrature(g, xd, kk, nodes)
    raise ValueError(f"unknown method {method!r}")


def _gh_quadrature(g, xd, kk, nodes=None):
    # tensor Gauss-Hermite at width a; the plane-wave content of K needs ~ (r/sqrt a)^2 extra nodes
    rmax = max(math.sqrt(abs(v)) for v in xd)
    N = nodes or int(g.degree // 2 + 4 * (rmax ** 2) / g.a + 8 * rmax / math.sqrt(g.a) + 40)
    x, w = np.polynomial.hermite.hermgauss(N)
    u = x / math.sqrt(g.a)
    grids = np.meshgrid(*([u] * (2 * g.d)), indexing="ij")
    wt = 1.0
    for i in range(2 * g.d):
        shp = [1] * (2 * g.d); shp[i] = -1
        wt = wt * w.reshape(shp)
    wt = wt / g.a ** g.d
    if g.d == 1:
        Y = (grids[0], grids[1])
        poly = g.evaluate(grids[0], grids[1]) * np.exp(g.a * (grids[0] ** 2 + grids[1] ** 2))
    else:
        y = np.stack(grids[:g.d], -1)
        eta = np.stack(grids[g.d:], -1)
        Y = (y, eta)
        poly = g.evaluate(y, eta) * np.exp(g.a * np.sum(y * y + eta * eta, axis=-1))
    K = kernel_Kd(xd, kk, Y)
    vals = wt * np.conj(K) * poly
    return complex(math.fsum(vals.real.ravel().tolist()), math.fsum(vals.imag.ravel().tolist()))


def gh_values(g: HorizontalFunction, nz: int = NZ_DEFAULT):
    """Vectorized (xdot, k) -> G_H g in the layout boundary_measure hands to theta."""
    def theta(x, k):
        if g.d == 1:
            x = np.asarray(x, dtype=float)
            k = np.asarray(k)
            kmax = int(np.max(np.abs(k)))
            tab = gh_table(g, x.reshape(-1), kmax, max(nz, 2 * kmax + 2))
            return tab[:, (k.reshape(-1) + kmax)].reshape(np.broadcast(x, k).shape)
        (X1, X2), (K1, K2) = x, k
        x1, x2 = np.asarray(X1).reshape(-1), np.asarray(X2).reshape(-1)
        k1, k2 = np.asarray(K1).reshape(-1), np.asarray(K2).reshape(-1)
        kmax = int(max(np.max(np.abs(k1)), np.max(np.abs(k2))))
        pts = np.array([(a, b) for a in x1 for b in x2])
        tab = gh_table(g, pts, kmax, max(nz, 2 * kmax + 2)).reshape(x1.size, x2.size, 2 * kmax + 1, 2 * kmax + 1)
        return tab[:, :, (k1 + kmax)][:, :, :, (k2 + kmax)]
    return theta


def _kernel_values(Y, d, nz=NZ_DEFAULT):
    """Vectorized (xdot, k) -> K_d(xdot, k, Y) in the boundary_measure layout."""
    y, eta = (np.atleast_1d(np.asarray(v, dtype=float)) for v in Y)
    z = _z_grid(nz)

    def one_axis(x, k, yj, ej):
        x = np.asarray(x, dtype=float).reshape(-1)
        k = np.asarray(k).reshape(-1)
        r = np.sqrt(np.abs(x))[:, None]
        s = np.where(x >= 0, 1.0, -1.0)[:, None]
        ph = np.exp(1j * 2 * r * (yj * np.sin(z)[None, :] + s * ej * np.cos(z)[None, :]))
        return ph @ np.exp(1j * np.outer(z, k)) / nz   # (Q, K)

    def theta(x, k):
        if d == 1:
            x = np.asarray(x)
            k = np.asarray(k)
            return one_axis(x, k, y[0], eta[0]).reshape(np.broadcast(x, k).shape)
        (X1, X2), (K1, K2) = x, k
        A1 = one_axis(X1, K1, y[0], eta[0])
        A2 = one_axis(X2, K2, y[1], eta[1])
        return A1[:, None, :, None] * A2[None, :, None, :]
    return theta


def gh_inverse(gh_vals, Y, d: int = 1, k_max: int = 12, xdot_rule=None) -> complex:
    """(2/pi)^d int K_d(xdot, k, Y) G(xdot, k) dmu with k outer, xdot inner."""
    Kf = _kernel_values(Y, d)
    theta = lambda x, k: Kf(x, k) * gh_vals(x, k)
    return (2.0 / math.pi) ** d * boundary_measure(theta, k_max, xdot_rule, d)


def gh_plancherel_check(g: HorizontalFunction, k_max: int = 12, xdot_rule=None):
    G = gh_values(g)
    rhs = (2.0 / math.pi) ** g.d * boundary_measure(lambda x, k: np.abs(G(x, k)) ** 2, k_max, xdot_rule, g.d).real
    lhs = g.l2_norm_sq()
    return lhs, rhs, (rhs / lhs if lhs else (1.0 if rhs == 0 else math.inf))


def gh_convolve_check(f: HorizontalFunction, g: HorizontalFunction, xdot: float, k: int, K_trunc: int = 15,
                      p: int = 4):
    """|G_H(f*g)(xdot,k) - sum_{|k'|<=K} G_H f(xdot,k-k') G_H g(xdot,k')| and a tail bound (d = 1).

    Tail: |G_H f| <= ||f||_1 and |k'|^p |G_H g(k')| <= ||T^p g||_1.
    """
    if f.d != 1:
        raise ValueError("gh_convolve_check is one-dimensional")
    fg = convolve(f, g)
    kk = K_trunc + abs(k)
    nz = max(NZ_DEFAULT, 2 * kk + 2)
    Tf = gh_table(f, np.array([xdot]), kk, nz)[0]
    Tg = gh_table(g, np.array([xdot]), K_trunc, nz)[0]
    lhs = gh_table(fg, np.array([xdot]), abs(k), nz)[0, k + abs(k)]
    rhs = sum(Tf[kk + k - kp] * Tg[K_trunc + kp] for kp in range(-K_trunc, K_trunc + 1))
    Tp = g
    for _ in range(p):
        Tp = Tp.T(1)
    tail = f.l1_norm() * Tp.l1_norm() * 2.0 / ((p - 1) * K_trunc ** (p - 1)) if not Tp.is_zero() else 0.0
    return abs(lhs - rhs), tail


def gh_decay_check(g: HorizontalFunction, p: int, xdots=None, kmax: int = 8):
    """Sampled sup (1+|xdot|+|k|)^p |G_H g| plus the Delta_Y and T transfer deviations."""
    if p > 3 or p < 0:
        raise ValueError("p must be in 0..3")
    if xdots is None:
        xdots = np.concatenate([-np.geomspace(0.05, 30, 24), np.geomspace(0.05, 30, 24)])
    xdots = np.asarray(xdots, dtype=float)
    tab = gh_table(g, xdots, kmax)
    ks = np.arange(-kmax, kmax + 1)
    weight = (1.0 + np.abs(xdots)[:, None] + np.abs(ks)[None, :]) ** p
    const = float(np.max(weight * np.abs(tab)))
    # 4^p |xdot|^p G_H g = G_H((-Delta_Y)^p g)
    lg = g
    for _ in range(p):
        lg = lg.laplacian().scale(-1)
    tl = gh_table(lg, xdots, kmax)
    lap_dev = float(np.max(np.abs(tl - (4 * np.abs(xdots)[:, None]) ** p * tab)))
    # (i k sgn xdot)^p G_H g = G_H(T^p g)
    tg = g
    for _ in range(p):
        tg = tg.T(1)
    tt = gh_table(tg, xdots, kmax) if not tg.is_zero() else np.zeros_like(tab)
    sg = np.where(xdots >= 0, 1.0, -1.0)[:, None]
    t_dev = float(np.max(np.abs(tt - (1j * ks[None, :] * sg) ** p * tab)))
    scale = max(1.0, float(np.max(np.abs(tl))), float(np.max(np.abs(tt))))
    return {"constant": const, "laplace_transfer": lap_dev / scale, "T_transfer": t_dev / scale}
