"""Hermite functions, rescalings, and exact ladder algebra.

Coefficient vectors are stored exactly.  With Hb_j = C^j H_0 = sqrt(2^j j!) H_j
the ladder operators act with integer coefficients (C Hb_j = Hb_{j+1},
A Hb_j = 2j Hb_{j-1}), so a vector is kept as rationals q_j in that basis plus
an exact squared scale s2; the orthonormal coefficient is
c_j = q_j sqrt(2^j j! s2), one square root per coefficient.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from . import _kernels


@dataclass(frozen=True)
class MultiIndex:
    entries: tuple

    def __init__(self, entries):
        if isinstance(entries, MultiIndex):
            entries = entries.entries
        if isinstance(entries, (int, np.integer)):
            entries = (entries,)
        ent = tuple(int(e) for e in entries)
        if any(int(e) != e for e in entries):
            raise ValueError("multi-index entries must be integers")
        if any(e < 0 for e in ent):
            raise ValueError(f"multi-index entries must be >= 0, got {ent}")
        object.__setattr__(self, "entries", ent)

    @property
    def d(self):
        return len(self.entries)

    @property
    def order(self):
        return sum(self.entries)

    @property
    def factorial(self):
        out = 1
        for e in self.entries:
            out *= math.factorial(e)
        return out

    def shift(self, j, step):
        ent = list(self.entries)
        ent[j] += step
        if ent[j] < 0:
            raise ValueError(f"index {self.entries} shifted by {step} on axis {j} is negative")
        return MultiIndex(ent)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, j):
        return self.entries[j]

    def __len__(self):
        return len(self.entries)


def as_index(n) -> MultiIndex:
    return n if isinstance(n, MultiIndex) else MultiIndex(n)


@lru_cache(maxsize=None)
def _gram(j):
    """(Hb_j | Hb_j) = 2^j j!."""
    return (1 << j) * math.factorial(j)


def _sqrt_fraction(q: Fraction) -> float:
    # sqrt of a possibly huge rational without overflowing floats
    if q == 0:
        return 0.0
    num, den = q.numerator, q.denominator
    shift = (num.bit_length() - den.bit_length()) // 2
    if shift > 0:
        return math.sqrt(float(Fraction(num, den << (2 * shift)))) * 2.0 ** shift
    if shift < 0:
        return math.sqrt(float(Fraction(num << (-2 * shift), den))) * 2.0 ** shift
    return math.sqrt(float(q))


class HermiteCoefficientVector:
    """Finitely supported sum_j c_j H_j (1-D), held exactly."""

    __slots__ = ("q", "s2")

    def __init__(self, q: Mapping[int, Fraction] | None = None, s2: Fraction = Fraction(1)):
        canon = {}
        for j, v in (q or {}).items():
            j = int(j)
            if j < 0:
                raise ValueError("negative Hermite index")
            v = Fraction(v)
            if v != 0:
                canon[j] = v
        self.q = dict(sorted(canon.items()))
        self.s2 = Fraction(s2)
        if self.s2 <= 0:
            raise ValueError("scale must be positive")

    @classmethod
    def basis(cls, n: int):
        if n < 0:
            raise ValueError("negative Hermite index")
        return cls({n: 1}, Fraction(1, _gram(n)))

    @classmethod
    def from_coeffs(cls, c: Mapping[int, float]):
        """Float coefficients; exact thereafter up to the float inputs' own rounding."""
        q = {}
        for j, v in c.items():
            q[int(j)] = Fraction(float(v)) / Fraction(math.sqrt(_gram(int(j))))
        return cls(q, Fraction(1))

    @property
    def coeffs(self):
        out = {}
        for j, v in self.q.items():
            mag = _sqrt_fraction(v * v * _gram(j) * self.s2)
            out[j] = mag if v > 0 else -mag
        return out

    def coeff(self, j):
        return self.coeffs.get(j, 0.0)

    @property
    def support(self):
        return tuple(self.q)

    def is_zero(self):
        return not self.q

    def _map(self, up, down):
        out = {}
        for j, v in self.q.items():
            if up:
                out[j + 1] = out.get(j + 1, 0) + up * v
            if down and j > 0:
                out[j - 1] = out.get(j - 1, 0) + down * 2 * j * v
        return HermiteCoefficientVector(out, self.s2)

    def scale(self, r):
        r = Fraction(r)
        return HermiteCoefficientVector({j: r * v for j, v in self.q.items()}, self.s2)

    def _common(self, other):
        if self.s2 == other.s2:
            return other.q
        ratio = other.s2 / self.s2
        rn, rd = math.isqrt(ratio.numerator), math.isqrt(ratio.denominator)
        if rn * rn == ratio.numerator and rd * rd == ratio.denominator:
            r = Fraction(rn, rd)
            return {j: r * v for j, v in other.q.items()}
        raise ValueError("vectors with incommensurable scales cannot be combined exactly")

    def __add__(self, other):
        oq = self._common(other)
        out = dict(self.q)
        for j, v in oq.items():
            out[j] = out.get(j, 0) + v
        return HermiteCoefficientVector(out, self.s2)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def exact_equal(self, other):
        try:
            oq = self._common(other)
        except ValueError:
            return False
        return self.q == {j: v for j, v in oq.items() if v != 0}

    def inner_exact(self, other):
        """Exact (self|other) squared-scale factorization: returns (R, S2) with value R*sqrt(S2)."""
        R = Fraction(0)
        for j, v in self.q.items():
            w = other.q.get(j)
            if w is not None:
                R += v * w * _gram(j)
        return R, self.s2 * other.s2

    def inner(self, other):
        R, S2 = self.inner_exact(other)
        mag = _sqrt_fraction(R * R * S2)
        return mag if R >= 0 else -mag

    def norm_sq_exact(self):
        R, S2 = self.inner_exact(self)
        return R * self.s2  # R*sqrt(s2^2) = R*s2

    def norm(self):
        return _sqrt_fraction(self.norm_sq_exact())

    def __repr__(self):
        return f"HermiteCoefficientVector({self.coeffs})"


def ladder_apply(op: str, v: HermiteCoefficientVector) -> HermiteCoefficientVector:
    """A, C, M = (C+A)/2 or D = (A-C)/2 applied exactly."""
    if op == "A":
        return v._map(0, 1)
    if op == "C":
        return v._map(1, 0)
    if op == "M":
        return v._map(Fraction(1, 2), Fraction(1, 2))
    if op == "D":
        return v._map(Fraction(-1, 2), Fraction(1, 2))
    raise ValueError(f"unknown ladder operator {op!r}")


def ladder_power(op, ell, v):
    for _ in range(ell):
        v = ladder_apply(op, v)
    return v


@lru_cache(maxsize=4096)
def matrix_element_exact(l1: int, l2: int, n: int, m: int):
    """(M^l1 H_m | D^l2 H_n) as (R, S2) meaning R*sqrt(S2)."""
    u = ladder_power("M", l1, HermiteCoefficientVector.basis(m))
    w = ladder_power("D", l2, HermiteCoefficientVector.basis(n))
    return u.inner_exact(w)


def matrix_element(l1: int, l2: int, n: int, m: int) -> float:
    if min(l1, l2, n, m) < 0:
        raise ValueError("matrix_element arguments must be >= 0")
    R, S2 = matrix_element_exact(l1, l2, n, m)
    mag = _sqrt_fraction(R * R * S2)
    return mag if R >= 0 else -mag


def hermite_eval(n: int, x):
    if int(n) != n or n < 0:
        raise ValueError(f"Hermite index must be a non-negative integer, got {n!r}")
    scalar = np.ndim(x) == 0
    tab = _kernels.hermite_table(int(n), np.atleast_1d(np.asarray(x, dtype=float)))
    out = tab[int(n)]
    return float(out[0]) if scalar else out


def hermite_table(nmax: int, x):
    return _kernels.hermite_table(int(nmax), np.asarray(x, dtype=float))


def hermite_eval_nd(n, x):
    n = as_index(n)
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x[None]
    if x.shape[-1] != n.d:
        raise ValueError(f"dimension mismatch: index has d={n.d}, point has shape {x.shape}")
    out = 1.0
    for j, nj in enumerate(n):
        out = out * hermite_eval(nj, x[..., j])
    return out


def hermite_rescaled(n, lam: float, x):
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    n = as_index(n)
    r = abs(lam) ** 0.5
    return abs(lam) ** (n.d / 4.0) * hermite_eval_nd(n, r * np.asarray(x, dtype=float))


@dataclass
class OscResult:
    vectors: list            # per-axis (-d^2 + M^2) applied, orthonormal basis, times |lam|
    eigenvalues: list        # per-axis {j: (2j+1)|lam|}
    total: dict              # for basis inputs: -Delta_osc eigenvalue (2|n|+d)|lam|
    exact: bool              # every axis result equals eigenvalue times input, exactly


def osc_apply(lam: float, v: Sequence[HermiteCoefficientVector] | HermiteCoefficientVector) -> OscResult:
    """-d_j^2 + lam^2 x_j^2 on the rescaled basis, i.e. |lam| (M^2 - D^2) per axis."""
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    if isinstance(v, HermiteCoefficientVector):
        v = [v]
    alam = abs(lam)
    vecs, eigs, exact = [], [], True
    for vec in v:
        res = ladder_power("M", 2, vec) - ladder_power("D", 2, vec)
        table = {j: (2 * j + 1) * alam for j in vec.support}
        # compare against sum_j (2j+1) q_j Hb_j exactly
        target = HermiteCoefficientVector({j: (2 * j + 1) * q for j, q in vec.q.items()}, vec.s2)
        exact = exact and res.exact_equal(target)
        vecs.append((res, alam))
        eigs.append(table)
    total = {}
    if all(len(t) == 1 for t in eigs):
        n = tuple(next(iter(t)) for t in eigs)
        total[n] = (2 * sum(n) + len(n)) * alam
    return OscResult(vecs, eigs, total, exact)
