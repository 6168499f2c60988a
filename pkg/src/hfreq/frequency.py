"""Frequency points, the distance d-hat on the completed frequency set, grids and measures."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .hermite import MultiIndex, as_index
from .numerics import QuadratureRule1D, composite_legendre


@dataclass(frozen=True)
class FrequencyPoint:
    n: MultiIndex
    m: MultiIndex
    lam: float

    def __init__(self, n, m, lam):
        n, m = as_index(n), as_index(m)
        if n.d != m.d:
            raise ValueError("n and m must have the same dimension")
        lam = float(lam)
        if lam == 0 or not math.isfinite(lam):
            raise ValueError("lambda must be finite and nonzero")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "lam", lam)

    @property
    def d(self):
        return self.n.d

    @property
    def sign(self):
        return 1 if self.lam > 0 else -1


@dataclass(frozen=True)
class BoundaryPoint:
    xdot: tuple
    k: tuple

    def __init__(self, xdot, k):
        xdot = tuple(float(v) for v in np.atleast_1d(xdot))
        k = tuple(int(v) for v in np.atleast_1d(k))
        if len(xdot) != len(k):
            raise ValueError("xdot and k must have the same dimension")
        if not all(math.isfinite(v) for v in xdot):
            raise ValueError("xdot must be finite")
        if any(v > 0 for v in xdot) and any(v < 0 for v in xdot):
            raise ValueError(f"xdot components must share one sign, got {xdot}")
        object.__setattr__(self, "xdot", xdot)
        object.__setattr__(self, "k", k)

    @property
    def d(self):
        return len(self.xdot)

    @property
    def sign(self):
        """+1, -1, or None when xdot = 0."""
        if any(v > 0 for v in self.xdot):
            return 1
        if any(v < 0 for v in self.xdot):
            return -1
        return None


CompletedFrequencyPoint = Union[FrequencyPoint, BoundaryPoint]


def is_boundary(p) -> bool:
    return isinstance(p, BoundaryPoint)


def distance(p, q) -> float:
    if p.d != q.d:
        raise ValueError(f"dimension mismatch: {p.d} vs {q.d}")
    if isinstance(p, BoundaryPoint) and isinstance(q, FrequencyPoint):
        p, q = q, p
    if isinstance(p, FrequencyPoint) and isinstance(q, FrequencyPoint):
        a = math.fsum(abs(p.lam * (n + m) - q.lam * (n2 + m2)) for n, m, n2, m2 in zip(p.n, p.m, q.n, q.m))
        b = sum(abs((m - n) - (m2 - n2)) for n, m, n2, m2 in zip(p.n, p.m, q.n, q.m))
        return a + b + abs(p.lam - q.lam)
    if isinstance(p, FrequencyPoint):
        a = math.fsum(abs(p.lam * (n + m) - x) for n, m, x in zip(p.n, p.m, q.xdot))
        b = sum(abs(m - n - k) for n, m, k in zip(p.n, p.m, q.k))
        return a + b + abs(p.lam)
    a = math.fsum(abs(x - x2) for x, x2 in zip(p.xdot, q.xdot))
    b = sum(abs(k - k2) for k, k2 in zip(p.k, q.k))
    return a + b


@dataclass(frozen=True)
class NonCauchy:
    i: int
    j: int
    distance: float


def classify_limit(seq, tol: float, tail: int | None = None):
    """Identify the limit of a supplied prefix of a frequency sequence.

    The last `tail` entries (default: the second half) must be pairwise within
    tol of each other in consecutive steps; otherwise the first violating
    consecutive pair is reported.  The limit is interior when lambda stays away
    from 0 (entries then constant in n, m), and a boundary point when lambda
    tends to 0; xdot is then extrapolated linearly in lambda from the tail.
    """
    seq = list(seq)
    if not seq:
        raise ValueError("empty sequence")
    tail = tail or max(2, len(seq) // 2)
    tail = min(tail, len(seq))
    start = len(seq) - tail
    for i in range(start, len(seq) - 1):
        dij = distance(seq[i], seq[i + 1])
        if dij > tol:
            return NonCauchy(i, i + 1, dij)
    last = seq[-1]
    ks = {tuple(m - n for n, m in zip(p.n, p.m)) for p in seq[start:]}
    if len(ks) != 1:
        # distance <= tol < 1 already forces a constant k for tol < 1
        return NonCauchy(start, len(seq) - 1, distance(seq[start], last))
    k = ks.pop()
    lam_tail = np.array([p.lam for p in seq[start:]])
    if abs(last.lam) > tol:
        return FrequencyPoint(last.n, last.m, last.lam)
    X = np.array([[p.lam * (n + m) for n, m in zip(p.n, p.m)] for p in seq[start:]])
    if tail >= 3 and np.ptp(lam_tail) > 0:
        A = np.vstack([np.ones_like(lam_tail), lam_tail]).T
        coef, *_ = np.linalg.lstsq(A, X, rcond=None)
        xdot = coef[0]
    else:
        xdot = X[-1]
    xdot = np.where(np.abs(xdot) < tol, 0.0, xdot)
    return BoundaryPoint(tuple(float(v) for v in xdot), k)


# grids


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    d: int
    N_max: int
    lambda_min: float
    lambda_max: float
    panels: int
    nodes_per_panel: int
    lam_rule: QuadratureRule1D = field(repr=False)

    @classmethod
    def build(cls, d=1, N_max=24, lambda_min=1e-3, lambda_max=8.0, panels=8, nodes_per_panel=12):
        if d not in (1, 2):
            raise ValueError("d must be 1 or 2")
        if int(N_max) != N_max or N_max < 0:
            raise ValueError("N_max must be a non-negative integer")
        if not (0 < lambda_min < lambda_max) or not math.isfinite(lambda_max):
            raise ValueError("need 0 < lambda_min < lambda_max < inf")
        if panels < 1 or nodes_per_panel < 1:
            raise ValueError("panels and nodes_per_panel must be >= 1")
        # geometric panel edges: the |lam|^d measure varies on the scale of lam itself
        edges = lambda_min * (lambda_max / lambda_min) ** (np.arange(panels + 1) / panels)
        edges[0], edges[-1] = lambda_min, lambda_max
        pos = composite_legendre(edges, nodes_per_panel)
        nodes = np.concatenate([-pos.nodes[::-1], pos.nodes])
        weights = np.concatenate([pos.weights[::-1], pos.weights])
        rule = QuadratureRule1D(nodes, weights, "gauss_legendre")
        return cls(int(d), int(N_max), float(lambda_min), float(lambda_max), int(panels),
                   int(nodes_per_panel), rule)

    @classmethod
    def from_spec(cls, spec):
        return cls.build(**spec)

    def to_spec(self):
        return {"d": self.d, "N_max": self.N_max, "lambda_min": self.lambda_min,
                "lambda_max": self.lambda_max, "panels": self.panels, "nodes_per_panel": self.nodes_per_panel}

    def same_as(self, other):
        return self.to_spec() == other.to_spec()

    @property
    def lam(self):
        return self.lam_rule.nodes

    @property
    def weights(self):
        return self.lam_rule.weights

    @property
    def measure_weights(self):
        """w_i |lam_i|^d."""
        return self.lam_rule.weights * np.abs(self.lam_rule.nodes) ** self.d

    @property
    def shape(self):
        return (self.N_max + 1,) * (2 * self.d) + (self.lam.size,)

    def refined(self):
        """Double N_max + 1 and the node count per panel."""
        return FrequencyGrid.build(self.d, 2 * self.N_max + 1, self.lambda_min, self.lambda_max,
                                   self.panels, 2 * self.nodes_per_panel)

    def index_arrays(self):
        """Broadcastable integer arrays (n_1..n_d, m_1..m_d) and lambda over the field shape."""
        D = 2 * self.d
        idx = []
        for ax in range(D):
            shp = [1] * (D + 1)
            shp[ax] = self.N_max + 1
            idx.append(np.arange(self.N_max + 1).reshape(shp))
        shp = [1] * D + [-1]
        return tuple(idx[:self.d]), tuple(idx[self.d:]), self.lam.reshape(shp)


def default_grid(d=1):
    return FrequencyGrid.build(d=d, N_max=24 if d == 1 else 8)


def lambda_max_for(b: float, tail_tol: float = 1e-8) -> float:
    """Cutoff with exp(-lam^2/(4b)) <= tail_tol on the s-Gaussian transform."""
    return math.sqrt(4.0 * b * math.log(1.0 / tail_tol))


def grid_for(f, d=None, N_max=24, tail_tol=1e-8, **kw):
    return FrequencyGrid.build(d=d or f.d, N_max=N_max, lambda_max=lambda_max_for(f.b, tail_tol), **kw)


def _reduce(vals, weights):
    tot = np.tensordot(vals, weights, axes=([-1], [0]))
    tot = np.asarray(tot)
    return complex(math.fsum(np.real(tot).ravel().tolist()), math.fsum(np.imag(tot).ravel().tolist()))


def integrate_frequency(grid: FrequencyGrid, theta) -> complex:
    """sum_{n,m <= N_max} sum_i w_i |lam_i|^d theta(n, m, lam_i).

    theta is an array of the grid's field shape, or a callable
    theta(n, m, lam) receiving tuples of broadcastable integer arrays and a
    lambda array (see FrequencyGrid.index_arrays).
    """
    if callable(theta):
        n, m, lam = grid.index_arrays()
        vals = np.broadcast_to(np.asarray(theta(n, m, lam)), grid.shape)
    else:
        vals = np.asarray(theta)
        if vals.shape != grid.shape:
            raise ValueError(f"theta shape {vals.shape} does not match grid shape {grid.shape}")
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-finite theta value on the grid")
    return _reduce(vals, grid.measure_weights)


def make_xdot_rule(xdot_max=30.0, panels=6, nodes_per_panel=16) -> QuadratureRule1D:
    """Gauss-Legendre panels on one orthant [0, xdot_max] (per axis)."""
    edges = np.linspace(0.0, xdot_max, panels + 1)
    return composite_legendre(edges, nodes_per_panel)


BOUNDARY_NORMALIZATION = "2^{-d-1}"


def boundary_weight(d: int) -> float:
    """Normalization of the boundary measure per orthant pair.

    Each half-line carries half of the unit mass of an even mollifier, which
    gives 2^{-d-1}; this is the constant consistent with the G_H inversion and
    Plancherel formulas and with the concentration limit.
    """
    return 2.0 ** (-d - 1)


def boundary_measure(theta: Callable, k_max: int, xdot_rule: QuadratureRule1D | None = None, d: int = 1) -> complex:
    """2^{-d-1} sum_{|k|_inf <= k_max} (int_{R_-^d} + int_{R_+^d}) theta(xdot, k) dxdot.

    theta(xdot, k) is vectorized: for d = 1 it receives a float array of
    shape (Q, 1) (signed xdot) and an int array of shape (1, K); for d = 2 it
    receives tuples of per-axis arrays broadcastable to shape (Q, Q, K, K).
    """
    rule = xdot_rule or make_xdot_rule()
    x, w = rule.nodes, rule.weights
    ks = np.arange(-k_max, k_max + 1)
    tot = 0j
    for sgn in (-1.0, 1.0):
        if d == 1:
            vals = np.asarray(theta((sgn * x)[:, None], ks[None, :]))
            vals = np.broadcast_to(vals, (x.size, ks.size))
            if not np.all(np.isfinite(vals)):
                raise ValueError("non-finite theta value")
            tot += _reduce(vals.T, w)
        elif d == 2:
            X1 = (sgn * x)[:, None, None, None]
            X2 = (sgn * x)[None, :, None, None]
            K1 = ks[None, None, :, None]
            K2 = ks[None, None, None, :]
            vals = np.asarray(theta((X1, X2), (K1, K2)))
            vals = np.broadcast_to(vals, (x.size, x.size, ks.size, ks.size))
            if not np.all(np.isfinite(vals)):
                raise ValueError("non-finite theta value")
            inner = np.tensordot(vals, w, axes=([1], [0]))
            tot += _reduce(np.moveaxis(inner, 0, -1), w)
        else:
            raise ValueError("d must be 1 or 2")
    return boundary_weight(d) * tot


def cells_within(grid: FrequencyGrid, R: float):
    """Per lambda-node count of grid cells with d-hat(cell, 0-hat) <= R (always finite)."""
    n, m, lam = grid.index_arrays()
    dist = 0
    for nj, mj in zip(n, m):
        dist = dist + np.abs(lam * (nj + mj)) + np.abs(mj - nj)
    dist = dist + np.abs(lam)
    inside = np.broadcast_to(dist <= R, grid.shape)
    return inside.reshape(-1, grid.lam.size).sum(axis=0)
