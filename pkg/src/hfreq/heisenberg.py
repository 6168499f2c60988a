"""Group law on H^d, invariant vector fields, and the Gaussian-polynomial family."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .numerics import abs_gaussian_moment, gaussian_moment, make_rule


@dataclass(frozen=True)
class HeisenbergPoint:
    y: tuple
    eta: tuple
    s: float

    def __init__(self, y, eta, s):
        y = tuple(float(v) for v in np.atleast_1d(y))
        eta = tuple(float(v) for v in np.atleast_1d(eta))
        if len(y) != len(eta):
            raise ValueError("y and eta must have the same dimension")
        if not all(math.isfinite(v) for v in y + eta + (float(s),)):
            raise ValueError("coordinates must be finite")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "s", float(s))

    @property
    def d(self):
        return len(self.y)

    @classmethod
    def identity(cls, d=1):
        return cls((0.0,) * d, (0.0,) * d, 0.0)

    def inverse(self):
        return HeisenbergPoint(tuple(-v for v in self.y), tuple(-v for v in self.eta), -self.s)

    def __mul__(self, other):
        return group_mul(self, other)


def symplectic(y, eta, y2, eta2):
    """sigma(Y, Y') = <eta, y'> - <eta', y>, vectorized over leading axes."""
    return np.sum(np.asarray(eta) * np.asarray(y2) - np.asarray(eta2) * np.asarray(y), axis=-1)


def group_mul(w: HeisenbergPoint, w2: HeisenbergPoint) -> HeisenbergPoint:
    if w.d != w2.d:
        raise ValueError(f"dimension mismatch: {w.d} vs {w2.d}")
    sig = math.fsum(e * y2 - e2 * y for y, e, y2, e2 in zip(w.y, w.eta, w2.y, w2.eta))
    return HeisenbergPoint(tuple(a + b for a, b in zip(w.y, w2.y)),
                           tuple(a + b for a, b in zip(w.eta, w2.eta)),
                           w.s + w2.s + 2.0 * sig)


class GaussHermiteFunction:
    """sum_alpha c_alpha Y^alpha_Y s^alpha_s exp(-a|Y|^2 - b s^2).

    Exponents are ordered (y_1..y_d, eta_1..eta_d, s).
    """

    __slots__ = ("d", "a", "b", "terms")

    def __init__(self, d: int, a: float, b: float, terms=None):
        if d < 1:
            raise ValueError("d must be >= 1")
        if not (a > 0 and b > 0):
            raise ValueError("Gaussian widths a, b must be positive")
        self.d = int(d)
        self.a = float(a)
        self.b = float(b)
        canon = {}
        for alpha, c in (terms or {}).items():
            alpha = tuple(int(v) for v in alpha)
            if len(alpha) != 2 * d + 1 or any(v < 0 for v in alpha):
                raise ValueError(f"bad exponent {alpha} for d={d}")
            canon[alpha] = canon.get(alpha, 0j) + complex(c)
        self.terms = {k: v for k, v in sorted(canon.items()) if v != 0}

    # construction

    @classmethod
    def gaussian(cls, d=1, a=1.0, b=1.0, c=1.0):
        return cls(d, a, b, {(0,) * (2 * d + 1): c})

    @classmethod
    def monomial(cls, alpha, d=1, a=1.0, b=1.0, c=1.0):
        return cls(d, a, b, {tuple(alpha): c})

    def _like(self, terms):
        return GaussHermiteFunction(self.d, self.a, self.b, terms)

    def _check(self, other):
        if (self.d, self.a, self.b) != (other.d, other.a, other.b):
            raise ValueError("functions with different dimension or widths cannot be combined")

    def __add__(self, other):
        self._check(other)
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0j) + v
        return self._like(t)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return self._like({k: c * v for k, v in self.terms.items()})

    def __eq__(self, other):
        return (isinstance(other, GaussHermiteFunction) and (self.d, self.a, self.b) == (other.d, other.a, other.b)
                and self.terms == other.terms)

    def is_zero(self):
        return not self.terms

    def conj(self):
        return self._like({k: v.conjugate() for k, v in self.terms.items()})

    @property
    def degree_Y(self):
        return max((sum(k[:-1]) for k in self.terms), default=0)

    @property
    def degree_s(self):
        return max((k[-1] for k in self.terms), default=0)

    def axis_degrees(self):
        """Max exponent per coordinate."""
        n = 2 * self.d + 1
        return tuple(max((k[i] for k in self.terms), default=0) for i in range(n))

    # calculus

    def width(self, i):
        return self.b if i == 2 * self.d else self.a

    def diff(self, i):
        """d/dx_i."""
        c2 = 2.0 * self.width(i)
        t = {}
        for k, v in self.terms.items():
            if k[i]:
                kk = list(k); kk[i] -= 1
                t[tuple(kk)] = t.get(tuple(kk), 0j) + k[i] * v
            kk = list(k); kk[i] += 1
            t[tuple(kk)] = t.get(tuple(kk), 0j) - c2 * v
        return self._like(t)

    def mul(self, i, c=1.0):
        t = {}
        for k, v in self.terms.items():
            kk = list(k); kk[i] += 1
            t[tuple(kk)] = c * v
        return self._like(t)

    # evaluation

    def coord_index(self, name, j=1):
        if name == "y":
            return j - 1
        if name == "eta":
            return self.d + j - 1
        if name == "s":
            return 2 * self.d
        raise ValueError(name)

    def poly(self, y, eta, s):
        y = np.asarray(y, dtype=float)
        eta = np.asarray(eta, dtype=float)
        s = np.asarray(s, dtype=float)
        if self.d == 1:
            # d = 1 takes raw coordinate arrays; d > 1 carries a trailing axis of length d
            y = y[..., None]
            eta = eta[..., None]
        coords = [y[..., j] for j in range(self.d)] + [eta[..., j] for j in range(self.d)] + [s]
        shape = np.broadcast(*coords).shape
        out = np.zeros(shape, dtype=complex)
        for k, v in self.terms.items():
            term = np.full(shape, v, dtype=complex)
            for x, p in zip(coords, k):
                if p:
                    term = term * x ** p
            out += term
        return out

    def evaluate(self, y, eta, s):
        y = np.asarray(y, dtype=float)
        eta = np.asarray(eta, dtype=float)
        s = np.asarray(s, dtype=float)
        if self.d == 1:
            r2 = y * y + eta * eta
        else:
            r2 = np.sum(y * y + eta * eta, axis=-1)
        return self.poly(y, eta, s) * np.exp(-self.a * r2 - self.b * s * s)

    def __call__(self, w: HeisenbergPoint):
        if self.d == 1:
            return complex(self.evaluate(w.y[0], w.eta[0], w.s))
        return complex(self.evaluate(np.array(w.y), np.array(w.eta), w.s))

    # norms

    def l2_norm_sq(self) -> float:
        """Closed form via Gaussian moments."""
        acc = 0j
        n = 2 * self.d + 1
        items = list(self.terms.items())
        for k1, v1 in items:
            for k2, v2 in items:
                prod = 1.0
                for i in range(n):
                    prod *= gaussian_moment(k1[i] + k2[i], 2.0 * self.width(i))
                    if prod == 0.0:
                        break
                acc += v1 * v2.conjugate() * prod
        return float(acc.real)

    def l1_bound(self) -> float:
        """Triangle-inequality bound sum |c| int |Y^a s^b| e^{...}; equal to the L1 norm for one term."""
        tot = 0.0
        for k, v in self.terms.items():
            prod = abs(v)
            for i, p in enumerate(k):
                prod *= abs_gaussian_moment(p, self.width(i))
            tot += prod
        return tot

    def l1_norm(self, nodes=None) -> float:
        if len(self.terms) <= 1:
            return self.l1_bound()
        n = 2 * self.d + 1
        nodes = nodes or (96 if self.d == 1 else 16)
        # |poly| is only piecewise smooth: Gauss-Legendre on a box with panels
        axes = []
        for i in range(n):
            c = self.width(i)
            deg = self.axis_degrees()[i]
            R = math.sqrt((40.0 + deg * math.log(40.0 / c + 1.0)) / c)
            r = make_rule("gauss_legendre", nodes, (-R, R))
            axes.append((r.nodes, r.weights))
        grids = np.meshgrid(*[x for x, _ in axes], indexing="ij")
        w = 1.0
        for i, (_, wi) in enumerate(axes):
            shp = [1] * n; shp[i] = -1
            w = w * wi.reshape(shp)
        y = np.stack(grids[:self.d], axis=-1)
        eta = np.stack(grids[self.d:2 * self.d], axis=-1)
        vals = self.evaluate(y if self.d > 1 else y[..., 0], eta if self.d > 1 else eta[..., 0], grids[-1])
        return float(math.fsum((w * np.abs(vals)).ravel().tolist()))

    def integral(self) -> complex:
        acc = 0j
        for k, v in self.terms.items():
            prod = v
            for i, p in enumerate(k):
                prod *= gaussian_moment(p, self.width(i))
            acc += prod
        return acc

    # serialization

    def to_dict(self):
        terms = [{"re": v.real, "im": v.imag, "alpha": list(k)} for k, v in self.terms.items()]
        return {"d": self.d, "a": self.a, "b": self.b, "terms": terms}

    @classmethod
    def from_dict(cls, rec):
        for key in ("d", "a", "b", "terms"):
            if key not in rec:
                raise KeyError(key)
        terms = {}
        for t in rec["terms"]:
            alpha = tuple(int(v) for v in t["alpha"])
            terms[alpha] = terms.get(alpha, 0j) + complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))
        return cls(int(rec["d"]), float(rec["a"]), float(rec["b"]), terms)

    def digest(self):
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def __repr__(self):
        return f"GaussHermiteFunction(d={self.d}, a={self.a}, b={self.b}, terms={self.terms})"


FIELDS = ("X", "Xi", "Xt", "Xit", "S", "T")
_ALIASES = {"Ξ": "Xi", "X~": "Xt", "Ξ~": "Xit", "Xtilde": "Xt", "Xitilde": "Xit"}


def vector_field_apply(field: str, j: int, f: GaussHermiteFunction) -> GaussHermiteFunction:
    """Apply one of X_j, Xi_j (left-invariant), Xt_j, Xit_j (right-invariant), S = d_s, T_j.

    Axis j is 1-based.  X = d_y + 2 eta d_s, Xi = d_eta - 2 y d_s, right-invariant
    fields flip the sign of the d_s part; T = eta d_y - y d_eta.
    """
    field = _ALIASES.get(field, field)
    if field not in FIELDS:
        raise ValueError(f"unknown vector field {field!r}")
    if field == "S":
        return f.diff(2 * f.d)
    if not 1 <= j <= f.d:
        raise ValueError(f"axis {j} out of range 1..{f.d}")
    iy, ie, its = j - 1, f.d + j - 1, 2 * f.d
    ds = f.diff(its)
    if field == "X":
        return f.diff(iy) + ds.mul(ie, 2.0)
    if field == "Xt":
        return f.diff(iy) + ds.mul(ie, -2.0)
    if field == "Xi":
        return f.diff(ie) + ds.mul(iy, -2.0)
    if field == "Xit":
        return f.diff(ie) + ds.mul(iy, 2.0)
    return f.diff(iy).mul(ie) - f.diff(ie).mul(iy)


def sublaplacian(f: GaussHermiteFunction) -> GaussHermiteFunction:
    out = f.scale(0)
    for j in range(1, f.d + 1):
        out = out + vector_field_apply("X", j, vector_field_apply("X", j, f))
        out = out + vector_field_apply("Xi", j, vector_field_apply("Xi", j, f))
    return out


class QuadratureNonConvergence(RuntimeError):
    def __init__(self, value, refined, tol):
        super().__init__(f"quadrature moved by {abs(value - refined):.3e} on doubling (tolerance {tol:.1e})")
        self.value = value
        self.refined = refined


def _convolve_once(f, g, w, nodes, ordering):
    x, wt = np.polynomial.hermite.hermgauss(nodes)
    if ordering == "left":
        # int f(w v^{-1}) g(v) dv, Gauss-Hermite weighted by g's Gaussian
        wid, other, inner = g, f, True
    else:
        # int f(v) g(v^{-1} w) dv, weighted by f's Gaussian
        wid, other, inner = f, g, False
    ra, rb = math.sqrt(wid.a), math.sqrt(wid.b)
    vy, ve, vs = np.meshgrid(x / ra, x / ra, x / rb, indexing="ij")
    W = wt[:, None, None] * wt[None, :, None] * wt[None, None, :] / (ra * ra * rb)
    y, e, s = w.y[0], w.eta[0], w.s
    if inner:
        # w v^{-1} = (Y - V, s - t - 2 sigma(Y, V))
        sig = e * vy - ve * y
        vals = other.evaluate(y - vy, e - ve, s - vs - 2.0 * sig) * wid.poly(vy, ve, vs)
    else:
        # v^{-1} w = (Y - V, s - t + 2 sigma(V, Y)) with sigma(V, Y) = t_eta y - eta t_y
        sig = ve * y - e * vy
        vals = wid.poly(vy, ve, vs) * other.evaluate(y - vy, e - ve, s - vs - 2.0 * sig)
    tot = W * vals
    return complex(math.fsum(tot.real.ravel().tolist()), math.fsum(tot.imag.ravel().tolist()))


def group_convolve(f: GaussHermiteFunction, g: GaussHermiteFunction, w: HeisenbergPoint,
                   nodes: int = 48, ordering: str = "left", check: bool = False, tol: float = 1e-10) -> complex:
    """(f * g)(w) by tensor Gauss-Hermite in v (d = 1 only).

    ordering 'left' integrates f(w v^{-1}) g(v), 'right' integrates f(v) g(v^{-1} w).
    With check=True the node count is doubled and QuadratureNonConvergence is
    raised when the two results differ by more than 10*tol.
    """
    if f.d != 1 or g.d != 1 or w.d != 1:
        raise ValueError("direct group convolution is implemented for d = 1 only")
    if ordering not in ("left", "right"):
        raise ValueError("ordering must be 'left' or 'right'")
    val = _convolve_once(f, g, w, nodes, ordering)
    if check:
        ref = _convolve_once(f, g, w, 2 * nodes, ordering)
        if abs(ref - val) > 10 * tol * max(1.0, abs(ref)):
            raise QuadratureNonConvergence(val, ref, tol)
    return val


def _derivative_family(f, N):
    # all d^alpha f for |alpha| <= N, built breadth-first
    n = 2 * f.d + 1
    level = {(0,) * n: f}
    yield from level.values()
    for _ in range(N):
        nxt = {}
        for alpha, h in level.items():
            for i in range(n):
                a2 = list(alpha); a2[i] += 1
                a2 = tuple(a2)
                if a2 not in nxt:
                    nxt[a2] = h.diff(i)
        level = nxt
        yield from level.values()


def seminorm(f: GaussHermiteFunction, N: int, points: int | None = None) -> float:
    """sup_{|alpha|<=N} sup (1+|Y|^2+s^2)^{N/2} |d^alpha f| by dense sampling.

    The sampling box extends to where the Gaussian has decayed by e^{-40} times
    the polynomial weight; the grid contains the origin.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    n = 2 * f.d + 1
    points = points or (41 if f.d == 1 else 9)
    deg = max(f.degree_Y, f.degree_s) + N
    axes = []
    for i in range(n):
        c = f.width(i)
        R = math.sqrt((deg + 1.0) / (2.0 * c)) * 3.0 + 1.0
        axes.append(np.linspace(-R, R, points))
    grids = np.meshgrid(*axes, indexing="ij")
    r2 = sum(gg * gg for gg in grids)
    weight = (1.0 + r2) ** (N / 2.0)
    if f.d == 1:
        y, eta = grids[0], grids[1]
    else:
        y = np.stack(grids[:f.d], axis=-1)
        eta = np.stack(grids[f.d:2 * f.d], axis=-1)
    best = 0.0
    for h in _derivative_family(f, N):
        if h.is_zero():
            continue
        best = max(best, float(np.max(weight * np.abs(h.evaluate(y, eta, grids[-1])))))
    return best


def random_points(rng, count, d=1, scale=1.0):
    pts = []
    for _ in range(count):
        y = rng.uniform(-scale, scale, d)
        e = rng.uniform(-scale, scale, d)
        s = rng.uniform(-scale, scale)
        pts.append(HeisenbergPoint(y, e, s))
    return pts
