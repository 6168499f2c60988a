"""F_H on the Gaussian-polynomial family: forward, inverse, Plancherel, convolution, Delta_H.

The s-integral is closed form.  Per axis the Y-integral
I[p, q](n, m) = int y^p eta^q conj W(n, m, lam, Y) e^{-a|Y|^2} dY
is computed by one of two routes:

* ``gh``: W e^{|lam||Y|^2} is a polynomial of degree n + m, so tensor
  Gauss-Hermite at width a + |lam| is exact once the node count exceeds
  (2N + p + q)/2;
* ``ladder``: start from the diagonal Gaussian base
  I[0, 0](n, n) = pi (a - |lam|)^n / (a + |lam|)^{n+1} and apply the
  three-term relations for y W and eta W.  Cheap for large N; rounding grows
  like (N/|lam|)^{(p+q)/2}, so it is the default only for large N or p = q = 0.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _kernels
from .frequency import FrequencyGrid, integrate_frequency, lambda_max_for
from .heisenberg import GaussHermiteFunction, HeisenbergPoint, seminorm, sublaplacian, vector_field_apply
from .numerics import gaussian_ft_moment, gaussian_moment

METHODS = ("auto", "gh", "ladder")
LADDER_THRESHOLD = 64


def plancherel_constant(d):
    """||F_H f||^2 = (pi^{d+1} / 2^{d-1}) ||f||^2."""
    return math.pi ** (d + 1) / 2.0 ** (d - 1)


def inversion_constant(d):
    return 2.0 ** (d - 1) / math.pi ** (d + 1)


@dataclass
class SpectralField:
    grid: FrequencyGrid
    values: np.ndarray
    meta: dict = field(default_factory=dict)
    mask: np.ndarray | None = None   # True where a cell failed

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != self.grid.shape:
            raise ValueError(f"values shape {self.values.shape} does not match grid {self.grid.shape}")
        bad = ~np.isfinite(self.values)
        if bad.any():
            self.mask = bad if self.mask is None else (self.mask | bad)
            self.values = np.where(bad, 0.0, self.values)

    @property
    def d(self):
        return self.grid.d

    def matrix(self, i):
        """(N+1)^d x (N+1)^d matrix at lambda node i, rows n, columns m."""
        D = (self.grid.N_max + 1) ** self.d
        return self.values[..., i].reshape(D, D)

    def row_norms_sq(self):
        """sum_m |F(n, m, lam)|^2 per (n, lam) and the column analogue."""
        D = (self.grid.N_max + 1) ** self.d
        v = np.abs(self.values.reshape(D, D, -1)) ** 2
        return v.sum(axis=1), v.sum(axis=0)

    # CSV with columns n..., m..., lam, re, im

    def to_csv(self, path=None):
        buf = io.StringIO()
        buf.write("# grid " + json.dumps(self.grid.to_spec(), sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        d = self.d
        w.writerow([f"n{j + 1}" for j in range(d)] + [f"m{j + 1}" for j in range(d)] + ["lam", "re", "im"])
        lam = self.grid.lam
        for idx in np.ndindex(*self.values.shape):
            v = self.values[idx]
            w.writerow([*idx[:-1], "%.17g" % lam[idx[-1]], "%.17g" % v.real, "%.17g" % v.imag])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, source):
        text = source if "\n" in str(source) else open(source).read()
        lines = text.splitlines()
        if not lines or not lines[0].startswith("# grid "):
            raise ValueError("missing grid header line")
        grid = FrequencyGrid.from_spec(json.loads(lines[0][len("# grid "):]))
        rows = list(csv.reader(lines[1:]))
        header, body = rows[0], rows[1:]
        d = grid.d
        if len(header) != 2 * d + 3:
            raise ValueError("CSV header does not match the grid dimension")
        vals = np.zeros(grid.shape, dtype=complex)
        lam = grid.lam
        lam_index = {float(v): i for i, v in enumerate(lam)}
        seen = 0
        for r in body:
            idx = tuple(int(v) for v in r[:2 * d])
            li = lam_index.get(float(r[2 * d]))
            if li is None:
                raise ValueError(f"lambda value {r[2 * d]} is not a grid node")
            vals[idx + (li,)] = complex(float(r[2 * d + 1]), float(r[2 * d + 2]))
            seen += 1
        if seen != vals.size:
            raise ValueError("CSV does not cover the grid")
        return cls(grid, vals)


# per-s-exponent Fourier factors and per-axis exponent sets


def _structure(f: GaussHermiteFunction):
    d = f.d
    pqs = [set() for _ in range(d)]
    for alpha in f.terms:
        for j in range(d):
            pqs[j].add((alpha[j], alpha[d + j]))
    return [sorted(s) for s in pqs]


def _s_factors(f, lam):
    return {q: complex(gaussian_ft_moment(q, f.b, lam)) for q in {al[-1] for al in f.terms}}


@lru_cache(maxsize=32)
def _hermgauss(n):
    return np.polynomial.hermite.hermgauss(n)


def gh_axis_tables(a, lam, N, pqs, nodes=None):
    """{(p,q): I[p,q]} of shape (N+1, N+1) by Gauss-Hermite at width a + |lam|."""
    c = a + abs(lam)
    P = max((p + q for p, q in pqs), default=0)
    NY = nodes or (N + P // 2 + 2)
    u, w = _hermgauss(NY)
    x = u / math.sqrt(c)
    Wt = _kernels.wigner_table(N, 1.0 if lam > 0 else -1.0, math.sqrt(abs(lam)) * x[:, None],
                               math.sqrt(abs(lam)) * x[None, :], gauss=False)
    Wc = np.conj(Wt).reshape((N + 1) ** 2, NY, NY)
    out = {}
    for p, q in pqs:
        wy = w * x ** p / math.sqrt(c)
        we = w * x ** q / math.sqrt(c)
        out[(p, q)] = np.einsum("kij,i,j->k", Wc, wy, we).reshape(N + 1, N + 1)
    return out


def gaussian_base(a, lam, M):
    """pi (a - |lam|)^n / (a + |lam|)^{n+1}, n = 0..M."""
    al = abs(lam)
    r = (a - al) / (a + al)
    return math.pi / (a + al) * r ** np.arange(M + 1, dtype=float)


def _y_step(J, lam):
    # y conj W(n,m) = (8|lam|)^{-1/2} [sqrt(n+1) W(n+1,m) + sqrt(n) W(n-1,m) - sqrt(m+1) W(n,m+1) - sqrt(m) W(n,m-1)]
    L = J.shape[0] - 1
    k = np.arange(L)
    s1, s0 = np.sqrt(k + 1.0), np.sqrt(k.astype(float))
    up_n = J[1:, :L]
    dn_n = np.vstack([np.zeros((1, L), dtype=J.dtype), J[:L - 1, :L]])
    up_m = J[:L, 1:]
    dn_m = np.hstack([np.zeros((L, 1), dtype=J.dtype), J[:L, :L - 1]])
    return (s1[:, None] * up_n + s0[:, None] * dn_n - s1[None, :] * up_m - s0[None, :] * dn_m) / math.sqrt(8 * abs(lam))


def _eta_step(J, lam):
    # eta conj W(n,m) = -i sgn(lam) (8|lam|)^{-1/2} [sqrt(n) W(n-1,m) - sqrt(n+1) W(n+1,m) + sqrt(m) W(n,m-1) - sqrt(m+1) W(n,m+1)]
    L = J.shape[0] - 1
    k = np.arange(L)
    s1, s0 = np.sqrt(k + 1.0), np.sqrt(k.astype(float))
    up_n = J[1:, :L]
    dn_n = np.vstack([np.zeros((1, L), dtype=J.dtype), J[:L - 1, :L]])
    up_m = J[:L, 1:]
    dn_m = np.hstack([np.zeros((L, 1), dtype=J.dtype), J[:L, :L - 1]])
    sg = 1.0 if lam > 0 else -1.0
    return -1j * sg * (s0[:, None] * dn_n - s1[:, None] * up_n + s0[None, :] * dn_m - s1[None, :] * up_m) / math.sqrt(8 * abs(lam))


def ladder_axis_tables(a, lam, N, pqs):
    P = max((p + q for p, q in pqs), default=0)
    M = N + P
    base = np.diag(gaussian_base(a, lam, M)).astype(complex)
    ys = [base]
    pmax = max((p for p, _ in pqs), default=0)
    for _ in range(pmax):
        ys.append(_y_step(ys[-1], lam))
    out = {}
    for p, q in pqs:
        J = ys[p]
        for _ in range(q):
            J = _eta_step(J, lam)
        out[(p, q)] = J[:N + 1, :N + 1]
    return out


def _choose(method, N, f):
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        return "ladder" if (N > LADDER_THRESHOLD or f.degree_Y == 0) else "gh"
    return method


def _cell_values(f, lam, N, method, nodes=None):
    """Array of shape (N+1,)^{2d} of f-hat at one lambda."""
    d = f.d
    pqs = _structure(f)
    if method == "gh":
        tabs = [gh_axis_tables(f.a, lam, N, pq, nodes) for pq in pqs]
    else:
        tabs = [ladder_axis_tables(f.a, lam, N, pq) for pq in pqs]
    sf = _s_factors(f, lam)
    out = np.zeros((N + 1,) * (2 * d), dtype=complex)
    for alpha, c in f.terms.items():
        coef = c * sf[alpha[-1]]
        if d == 1:
            out += coef * tabs[0][(alpha[0], alpha[1])]
        else:
            T1 = tabs[0][(alpha[0], alpha[2])]
            T2 = tabs[1][(alpha[1], alpha[3])]
            out += coef * np.einsum("ac,bd->abcd", T1, T2)
    return out


def forward_point(f: GaussHermiteFunction, w, method: str = "gh", nodes=None) -> complex:
    """int conj(e^{is lam} W(w, Y)) f(Y, s) dY ds."""
    from .frequency import FrequencyPoint
    if not isinstance(w, FrequencyPoint):
        w = FrequencyPoint(*w)
    if w.d != f.d:
        raise ValueError("dimension mismatch")
    N = max(max(w.n), max(w.m))
    vals = _cell_values(f, w.lam, N, _choose(method, N, f) if method == "auto" else method, nodes)
    return complex(vals[tuple(w.n) + tuple(w.m)])


def forward_at_zero(f: GaussHermiteFunction) -> complex:
    """Value at the limit point (xdot, k) = (0, 0): the integral of f."""
    return f.integral()


def forward_field(f: GaussHermiteFunction, grid: FrequencyGrid, method: str = "auto", nodes=None) -> SpectralField:
    if f.d != grid.d:
        raise ValueError("dimension mismatch between function and grid")
    if f.d > 2:
        raise ValueError("fields are limited to d <= 2")
    N = grid.N_max
    meth = _choose(method, N, f)
    vals = np.empty(grid.shape, dtype=complex)
    for i, lam in enumerate(grid.lam):
        vals[..., i] = _cell_values(f, float(lam), N, meth, nodes)
    meta = {"digest": f.digest(), "method": meth, "l1": f.l1_norm()}
    return SpectralField(grid, vals, meta)


def inverse_point(F: SpectralField, w: HeisenbergPoint) -> complex:
    """(2^{d-1}/pi^{d+1}) integrate_frequency(e^{is lam} W(., Y) F)."""
    grid = F.grid
    d = grid.d
    N = grid.N_max
    if w.d != d:
        raise ValueError("dimension mismatch")
    tot = np.zeros(grid.lam.size, dtype=complex)
    for i, lam in enumerate(grid.lam):
        tabs = [_kernels.wigner_table(N, 1.0 if lam > 0 else -1.0, math.sqrt(abs(lam)) * w.y[j],
                                      math.sqrt(abs(lam)) * w.eta[j]) for j in range(d)]
        if d == 1:
            Wv = tabs[0]
        else:
            Wv = np.einsum("ac,bd->abcd", tabs[0], tabs[1])
        tot[i] = np.exp(1j * w.s * lam) * np.sum(Wv * F.values[..., i])
    wts = grid.measure_weights
    val = tot * wts
    return inversion_constant(d) * complex(math.fsum(val.real.tolist()), math.fsum(val.imag.tolist()))


def plancherel(F: SpectralField) -> float:
    return integrate_frequency(F.grid, np.abs(F.values) ** 2).real


def plancherel_grid(f_or_d=1, N_max=None, tail_tol=1e-12):
    """Grid used by plancherel_check.

    Truncating n, m <= N loses the cells with |lam| N below the function's
    width, so the default pushes N to 300 (d = 1) with the ladder route.
    """
    d = f_or_d if isinstance(f_or_d, int) else f_or_d.d
    b = 1.0 if isinstance(f_or_d, int) else f_or_d.b
    if N_max is None:
        N_max = 300 if d == 1 else 24
    return FrequencyGrid.build(d=d, N_max=N_max, lambda_min=1e-4, lambda_max=lambda_max_for(b, tail_tol),
                               panels=12, nodes_per_panel=16)


def plancherel_stream(f: GaussHermiteFunction, grid: FrequencyGrid, method: str = "auto") -> float:
    """||f-hat||^2 on the grid without storing the field."""
    meth = _choose(method, grid.N_max, f)
    acc = []
    for lam, w in zip(grid.lam, grid.measure_weights):
        v = _cell_values(f, float(lam), grid.N_max, meth)
        acc.append(w * float(np.sum(np.abs(v) ** 2)))
    return math.fsum(acc)


def plancherel_check(f: GaussHermiteFunction, grid: FrequencyGrid | None = None, method: str = "auto"):
    grid = grid or plancherel_grid(f)
    lhs = plancherel_stream(f, grid, method)
    rhs = plancherel_constant(f.d) * f.l2_norm_sq()
    if rhs == 0:
        return lhs, rhs, (1.0 if lhs == 0 else math.inf)
    return lhs, rhs, lhs / rhs


def plancherel_refinement(f: GaussHermiteFunction, N_values=(75, 150, 300)):
    return [plancherel_check(f, plancherel_grid(f, N_max=N))[2] for N in N_values]


# convolution


def _truncation_residual(F, G, i):
    l1f = F.meta.get("l1")
    l1g = G.meta.get("l1")
    if l1f is None or l1g is None:
        return math.inf
    A, B = F.matrix(i), G.matrix(i)
    rf = np.sqrt(np.maximum(l1f ** 2 - np.sum(np.abs(A) ** 2, axis=1), 0.0))
    rg = np.sqrt(np.maximum(l1g ** 2 - np.sum(np.abs(B) ** 2, axis=0), 0.0))
    return float(np.max(rf) * np.max(rg))


def spectral_convolve(F: SpectralField, G: SpectralField) -> SpectralField:
    """(F G)(n, m, lam) = sum_l F(n, l, lam) G(l, m, lam) with a Cauchy-Schwarz truncation residual."""
    if not F.grid.same_as(G.grid):
        raise ValueError("spectral_convolve needs identical grids")
    out = np.empty_like(F.values)
    res = 0.0
    for i in range(F.grid.lam.size):
        out[..., i] = (F.matrix(i) @ G.matrix(i)).reshape(F.values.shape[:-1])
        res = max(res, _truncation_residual(F, G, i))
    return SpectralField(F.grid, out, {"residual": res})


def _lambda_slice_poly(f, lam):
    """{alpha_Y: coeff} of int e^{-is lam} f(Y, s) ds divided by e^{-a|Y|^2}."""
    sf = _s_factors(f, lam)
    out = {}
    for alpha, c in f.terms.items():
        out[alpha[:-1]] = out.get(alpha[:-1], 0j) + c * sf[alpha[-1]]
    return out


def _eval_poly(poly, coords):
    acc = 0
    for alpha, c in poly.items():
        t = c
        for x, p in zip(coords, alpha):
            if p:
                t = t * x ** p
        acc = acc + t
    return acc


def twisted_slice(f, g, lam, y, eta):
    """R(Y) with (f * g)^lam(Y) = R(Y) e^{-kappa |Y|^2}, d = 1.

    (f * g)^lam(Y) = int f^lam(Y - V) g^lam(V) e^{-2 i lam sigma(Y, V)} dV.  Completing
    the square moves V to the complex centre c = (a Y - i lam J Y)/(a + a'),
    J(y, eta) = (eta, -y), leaving a real Gaussian in u = V - c.
    """
    a, a2 = f.a, g.a
    A = a + a2
    pf, pg = _lambda_slice_poly(f, lam), _lambda_slice_poly(g, lam)
    deg = max((sum(k) for k in pf), default=0) + max((sum(k) for k in pg), default=0)
    nu = deg // 2 + 1
    u, w = _hermgauss(nu)
    u = u / math.sqrt(A)
    w = w / math.sqrt(A)
    y = np.asarray(y, dtype=float)[..., None, None]
    eta = np.asarray(eta, dtype=float)[..., None, None]
    cy = (a * y - 1j * lam * eta) / A
    ce = (a * eta + 1j * lam * y) / A
    uy, ue = u[:, None], u[None, :]
    vals = _eval_poly(pf, (y - cy - uy, eta - ce - ue)) * _eval_poly(pg, (cy + uy, ce + ue))
    return np.sum(vals * (w[:, None] * w[None, :]), axis=(-2, -1))


def twisted_kappa(f, g, lam):
    return (f.a * g.a + lam * lam) / (f.a + g.a)


def convolution_transform(f: GaussHermiteFunction, g: GaussHermiteFunction, grid: FrequencyGrid,
                          nodes=None) -> SpectralField:
    """F_H(f * g) on the grid from the lambda slices of the group convolution (d = 1)."""
    if f.d != 1 or g.d != 1 or grid.d != 1:
        raise ValueError("convolution_transform is implemented for d = 1")
    N = grid.N_max
    deg = f.degree_Y + g.degree_Y
    vals = np.empty(grid.shape, dtype=complex)
    for i, lam in enumerate(grid.lam):
        lam = float(lam)
        kap = twisted_kappa(f, g, lam)
        c = kap + abs(lam)
        NY = nodes or (N + deg // 2 + 2)
        uu, ww = _hermgauss(NY)
        x = uu / math.sqrt(c)
        Wt = _kernels.wigner_table(N, 1.0 if lam > 0 else -1.0, math.sqrt(abs(lam)) * x[:, None],
                                   math.sqrt(abs(lam)) * x[None, :], gauss=False)
        R = twisted_slice(f, g, lam, x[:, None], x[None, :])
        wts = (ww[:, None] * ww[None, :]) / c
        vals[..., i] = np.einsum("nmij,ij->nm", np.conj(Wt), wts * R)
    return SpectralField(grid, vals, {"method": "twisted-slice"})


def convolution_check(f, g, grid: FrequencyGrid, floor: float = 1e-6):
    """Max relative deviation between the spectral product and F_H(f * g) on entries above floor.

    Both fields are banded with bandwidth equal to the Y-degree, so the
    product is formed on a grid padded by that amount and then cropped.
    """
    pad = max(f.degree_Y, g.degree_Y)
    big = FrequencyGrid.build(grid.d, grid.N_max + pad, grid.lambda_min, grid.lambda_max, grid.panels,
                              grid.nodes_per_panel)
    Fp = forward_field(f, big)
    Gp = forward_field(g, big)
    P = spectral_convolve(Fp, Gp)
    sl = (slice(0, grid.N_max + 1),) * (2 * grid.d)
    prod = P.values[sl]
    ref = convolution_transform(f, g, grid).values
    mask = np.abs(ref) > floor
    rel = np.abs(prod - ref)[mask] / np.abs(ref)[mask]
    return {"max_rel": float(rel.max()) if rel.size else 0.0, "entries": int(mask.sum()),
            "residual": P.meta["residual"]}


# diagonalization and decay


def diag_check(f: GaussHermiteFunction, grid: FrequencyGrid, power: int = 1, method: str = "auto") -> float:
    """max |F_H(Delta_H^p f) - (-4|lam|(2|m|+d))^p f-hat| / (1 + |f-hat|)."""
    g = f
    for _ in range(power):
        g = sublaplacian(g)
    Ff = forward_field(f, grid, method).values
    Fg = forward_field(g, grid, method).values
    _, m, lam = grid.index_arrays()
    eig = -4.0 * np.abs(lam) * (2 * sum(m) + grid.d)
    dev = np.abs(Fg - eig ** power * Ff) / (1.0 + np.abs(Ff))
    return float(dev.max())


def hermiticity_check(f: GaussHermiteFunction, grid: FrequencyGrid) -> float:
    """For real f: f-hat(n, m, -lam) = conj f-hat(n, m, lam)."""
    F = forward_field(f, grid).values
    half = grid.lam.size // 2
    neg = F[..., :half][..., ::-1]
    pos = F[..., half:]
    return float(np.max(np.abs(neg - np.conj(pos))))


def row_bound_check(F: SpectralField):
    """max over rows/columns of sum |F|^2 / ||f||_1^2 (bounded by 1)."""
    l1 = F.meta["l1"]
    r, c = F.row_norms_sq()
    return float(max(r.max(), c.max()) / l1 ** 2) if l1 else 0.0


def decay_constants(f: GaussHermiteFunction, grid: FrequencyGrid, ps=(1, 2, 3), N_seminorm=None, F=None):
    """Fitted C_p = max (1 + |lam|(|n|+|m|+d) + |n-m|)^p |f-hat| / seminorm(f, N_p), N_p = 2p."""
    F = F or forward_field(f, grid)
    n, m, lam = grid.index_arrays()
    dist = np.abs(lam) * (sum(n) + sum(m) + grid.d) + sum(np.abs(a - b) for a, b in zip(n, m))
    out = {}
    for p in ps:
        Np = N_seminorm if N_seminorm is not None else 2 * p
        sn = seminorm(f, Np)
        out[p] = float(np.max((1.0 + dist) ** p * np.abs(F.values)) / sn)
    return out


def _T_power(f, alpha):
    g = f
    for j, a in enumerate(alpha, start=1):
        for _ in range(a):
            g = vector_field_apply("T", j, g)
    return g


def offdiag_decay_check(f: GaussHermiteFunction, grid: FrequencyGrid, p: int, F=None):
    """max |n-m|^p |f-hat| against sup_{|alpha|=p} ||T^alpha f||_1 (returns lhs, bound)."""
    F = F or forward_field(f, grid)
    n, m, _ = grid.index_arrays()
    d = grid.d
    if d == 1:
        alphas = [(p,)]
        wt = np.abs(n[0] - m[0]) ** p
    else:
        alphas = [(i, p - i) for i in range(p + 1)]
        # (sum_j |n_j - m_j|)^p expands into multinomials summing to d^p
        wt = sum(np.abs(a - b) for a, b in zip(n, m)) ** p
    lhs = float(np.max(wt * np.abs(F.values)))
    bound = max(_T_power(f, al).l1_norm() for al in alphas)
    if d == 2:
        bound *= 2 ** p
    return lhs, bound
