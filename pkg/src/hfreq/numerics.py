"""Quadrature rules, controlled series summation and small numeric helpers."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

KINDS = ("gauss_hermite", "gauss_legendre", "periodic_trapezoid")


@dataclass(frozen=True, eq=False)
class QuadratureRule1D:
    nodes: np.ndarray
    weights: np.ndarray
    kind: str

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if self.kind not in KINDS:
            raise ValueError(f"unknown rule kind {self.kind!r}")
        if nodes.ndim != 1 or nodes.shape != weights.shape or nodes.size == 0:
            raise ValueError("nodes and weights must be non-empty 1-D arrays of equal length")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
            raise ValueError("weights must be positive and finite")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.nodes.size

    @property
    def interval(self):
        if self.kind == "periodic_trapezoid":
            return (-math.pi, math.pi)
        if self.kind == "gauss_hermite":
            return (-math.inf, math.inf)
        return getattr(self, "_interval", (float(self.nodes[0]), float(self.nodes[-1])))


def _legendre(N, lo, hi):
    x, w = np.polynomial.legendre.leggauss(N)
    half = 0.5 * (hi - lo)
    rule = QuadratureRule1D(lo + half * (x + 1.0), half * w, "gauss_legendre")
    object.__setattr__(rule, "_interval", (lo, hi))
    return rule


def make_rule(kind: str, N: int, interval=None) -> QuadratureRule1D:
    if int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N!r}")
    N = int(N)
    if kind == "gauss_legendre":
        if interval is None:
            raise ValueError("gauss_legendre requires an interval")
        lo, hi = (float(v) for v in interval)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError("interval endpoints must be finite")
        if not lo < hi:
            raise ValueError("interval must satisfy lo < hi")
        return _legendre(N, lo, hi)
    if interval is not None:
        raise ValueError(f"{kind} takes no interval")
    if kind == "gauss_hermite":
        # numpy: companion-matrix eigenvalues polished by one Newton step
        x, w = np.polynomial.hermite.hermgauss(N)
        if N % 2 == 1:
            x[N // 2] = 0.0
        return QuadratureRule1D(x, w, kind)
    if kind == "periodic_trapezoid":
        z = -math.pi + 2.0 * math.pi * np.arange(N) / N
        return QuadratureRule1D(z, np.full(N, 2.0 * math.pi / N), kind)
    raise ValueError(f"unknown rule kind {kind!r}")


def composite_legendre(edges, nodes_per_panel: int) -> QuadratureRule1D:
    """Gauss-Legendre panels on consecutive edges (strictly increasing)."""
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError("edges must be strictly increasing with at least two entries")
    x, w = np.polynomial.legendre.leggauss(int(nodes_per_panel))
    nodes, weights = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        nodes.append(lo + half * (x + 1.0))
        weights.append(half * w)
    rule = QuadratureRule1D(np.concatenate(nodes), np.concatenate(weights), "gauss_legendre")
    object.__setattr__(rule, "_interval", (float(edges[0]), float(edges[-1])))
    return rule


def _fsum_complex(vals):
    vals = np.asarray(vals)
    if np.iscomplexobj(vals):
        return complex(math.fsum(vals.real.tolist()), math.fsum(vals.imag.tolist()))
    return complex(math.fsum(vals.tolist()), 0.0)


def integrate_1d(rule: QuadratureRule1D, f: Callable) -> complex:
    try:
        vals = np.asarray(f(rule.nodes))
        if vals.shape != rule.nodes.shape:
            raise ValueError
    except (TypeError, ValueError):
        vals = np.array([f(float(x)) for x in rule.nodes])
    if not np.all(np.isfinite(vals)):
        bad = int(np.flatnonzero(~np.isfinite(vals))[0])
        raise ValueError(f"non-finite integrand at node {rule.nodes[bad]!r}")
    return _fsum_complex(rule.weights * vals)


@dataclass(frozen=True)
class SeriesControl:
    max_terms: int = 1000
    abs_tail_tol: float = 1e-16
    consecutive_small: int = 3

    def __post_init__(self):
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise ValueError("max_terms must be an integer >= 1")
        if not self.abs_tail_tol > 0:
            raise ValueError("abs_tail_tol must be positive")
        if int(self.consecutive_small) != self.consecutive_small or self.consecutive_small < 1:
            raise ValueError("consecutive_small must be an integer >= 1")


def _finite(t):
    try:
        return cmath.isfinite(t)
    except TypeError:  # Fraction and friends
        return True


def sum_series(terms, ctrl: SeriesControl):
    """Partial sum with the consecutive-small stopping rule.

    terms is a callable index -> number or an iterable.  Returns (value, terms_used).
    Floats are accumulated with fsum in index order; exact types are summed exactly.
    """
    if callable(terms):
        it: Iterable = (terms(j) for j in range(ctrl.max_terms))
    else:
        it = iter(terms)
    seen = []
    small = 0
    used = 0
    for t in it:
        if used >= ctrl.max_terms:
            break
        if not _finite(t):
            raise ValueError(f"non-finite term at index {used}")
        seen.append(t)
        used += 1
        small = small + 1 if abs(t) < ctrl.abs_tail_tol else 0
        if small >= ctrl.consecutive_small:
            break
    if seen and all(isinstance(t, (int, float, complex, np.number)) for t in seen):
        val = _fsum_complex(np.array(seen, dtype=complex))
        if all(not isinstance(t, complex) and not np.iscomplexobj(t) for t in seen):
            val = val.real
        return val, used
    return sum(seen, start=0), used


# Gaussian moments and their Fourier transforms


def double_factorial_odd(j):
    """(j-1)!! for even j >= 0, i.e. 1*3*...*(j-1)."""
    out = 1
    for i in range(1, j, 2):
        out *= i
    return out


def gaussian_moment(p: int, c: float) -> float:
    """int x^p e^{-c x^2} dx."""
    if p % 2:
        return 0.0
    return math.gamma((p + 1) / 2.0) / c ** ((p + 1) / 2.0)


def abs_gaussian_moment(p: int, c: float) -> float:
    """int |x|^p e^{-c x^2} dx."""
    return math.gamma((p + 1) / 2.0) / c ** ((p + 1) / 2.0)


def gaussian_ft_moment(p: int, c: float, xi):
    """int x^p e^{-c x^2 - i xi x} dx, vectorized over (possibly complex) xi."""
    xi = np.asarray(xi)
    mu = -1j * xi / (2.0 * c)
    base = math.sqrt(math.pi / c) * np.exp(-xi * xi / (4.0 * c))
    acc = np.zeros(np.broadcast(xi).shape, dtype=complex)
    for j in range(0, p + 1, 2):
        acc = acc + math.comb(p, j) * mu ** (p - j) * (double_factorial_odd(j) * (2.0 * c) ** (-j / 2.0))
    return base * acc


def loglog_fit(x, y):
    """Least-squares slope, intercept and R^2 of log y against log x."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    A = np.vstack([lx, np.ones_like(lx)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - (slope * lx + icpt)
    ss = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss if ss > 0 else 1.0
    return float(slope), float(icpt), r2


# sums of slowly varying lattice functions

_BERN = (1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0)


def _endpoint_derivs(vals, H):
    # derivatives 1, 3, 5 at t = 0 of the degree-7 interpolant through t = 0..7
    t = np.arange(vals.shape[0], dtype=float)
    V = np.vander(t, vals.shape[0], increasing=True)
    coef = np.linalg.solve(V, vals)
    out = []
    for r in (1, 3, 5):
        out.append(math.factorial(r) * coef[r] / H ** r)
    return out


def lattice_sum(phi: Callable, start: int, stop: int, scale: float, direct_max: int = 4096):
    """sum_{n=start}^{stop} phi(n) for phi smooth on the length scale `scale`.

    Short ranges are summed directly.  Long ranges use a coarse trapezoid of
    step H ~ scale/50 plus Euler-Maclaurin endpoint corrections, with the
    endpoint derivatives taken from integer samples.  phi is vectorized over
    integer arrays.
    """
    start, stop = int(start), int(stop)
    if stop < start:
        return 0.0
    count = stop - start + 1
    H = int(scale / 50.0)
    if count <= direct_max or H < 2 or count < 16 * H:
        n = np.arange(start, stop + 1)
        return _fsum_complex(phi(n))
    J = (count - 1) // H
    B = start + J * H
    grid = start + H * np.arange(J + 1)
    f = np.asarray(phi(grid))
    trap = H * (_fsum_complex(f) - 0.5 * (f[0] + f[-1]))
    total = trap + 0.5 * (f[0] + f[-1])
    dA = _endpoint_derivs(f[:8], H)
    dB = _endpoint_derivs(f[::-1][:8], -H)
    for p, b2p in enumerate(_BERN, start=1):
        total += b2p * (1.0 - H ** (2 * p)) / math.factorial(2 * p) * (dB[p - 1] - dA[p - 1])
    if B < stop:
        total += _fsum_complex(phi(np.arange(B + 1, stop + 1)))
    return complex(total)
