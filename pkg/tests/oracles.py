"""Independent reference values: power series, explicit polynomials and closed forms.

Nothing here calls into hfreq.
"""
import math
from fractions import Fraction

SQRT_PI = math.sqrt(math.pi)
PI_M14 = math.pi ** -0.25


def bessel_j(k: int, x: float, terms: int = 80) -> float:
    """J_k(x) = sum_j (-1)^j (x/2)^{2j+k} / (j! (j+k)!), with J_{-k} = (-1)^k J_k."""
    if k < 0:
        return (-1) ** k * bessel_j(-k, x, terms)
    half = x / 2.0
    acc = []
    t = half ** k / math.factorial(k)
    for j in range(terms):
        acc.append(t)
        t *= -half * half / ((j + 1) * (j + 1 + k))
        if abs(t) < 1e-300:
            break
    return math.fsum(acc)


# explicit Hermite functions for n <= 4
_HERMITE_POLY = {
    0: lambda x: 1.0,
    1: lambda x: 2 * x,
    2: lambda x: 4 * x * x - 2,
    3: lambda x: 8 * x ** 3 - 12 * x,
    4: lambda x: 16 * x ** 4 - 48 * x * x + 12,
}


def hermite_function(n: int, x: float) -> float:
    return _HERMITE_POLY[n](x) * math.exp(-x * x / 2) / math.sqrt(2.0 ** n * math.factorial(n) * SQRT_PI)


def gaussian_integral_3d(a: float, b: float) -> float:
    """int e^{-a(y^2+eta^2) - b s^2} over R^3."""
    return (math.pi / a) * math.sqrt(math.pi / b)


def forward_gaussian_00(lam: float) -> float:
    """F_H(e^{-|Y|^2-s^2})(0, 0, lam) = sqrt(pi) e^{-lam^2/4} pi/(1+|lam|)."""
    return SQRT_PI * math.exp(-lam * lam / 4) * math.pi / (1 + abs(lam))


def ladder_matrix_element(l1, l2, n, m):
    """(M^l1 H_m | D^l2 H_n) by dense rational matrices in the basis H_0..H_K (exact up to sqrt)."""
    K = max(n, m) + l1 + l2 + 2
    # squared entries with signs: M H_j = sqrt(j/2) H_{j-1} + sqrt((j+1)/2) H_{j+1}
    import numpy as np
    M = np.zeros((K + 1, K + 1))
    D = np.zeros((K + 1, K + 1))
    for j in range(K + 1):
        if j > 0:
            M[j - 1, j] = math.sqrt(j / 2)
            D[j - 1, j] = math.sqrt(j / 2)
        if j < K:
            M[j + 1, j] = math.sqrt((j + 1) / 2)
            D[j + 1, j] = -math.sqrt((j + 1) / 2)
    u = np.zeros(K + 1); u[m] = 1.0
    v = np.zeros(K + 1); v[n] = 1.0
    for _ in range(l1):
        u = M @ u
    for _ in range(l2):
        v = D @ v
    return float(u @ v)


def F_coeff_bruteforce(l1, l2, k):
    """Coefficient of u^{-k} in (u + 1/u)^l1 (u - 1/u)^l2, expanded as a Laurent polynomial."""
    poly = {0: Fraction(1)}
    for _ in range(l1):
        nxt = {}
        for e, c in poly.items():
            nxt[e + 1] = nxt.get(e + 1, 0) + c
            nxt[e - 1] = nxt.get(e - 1, 0) + c
        poly = nxt
    for _ in range(l2):
        nxt = {}
        for e, c in poly.items():
            nxt[e + 1] = nxt.get(e + 1, 0) + c
            nxt[e - 1] = nxt.get(e - 1, 0) - c
        poly = nxt
    return poly.get(-k, 0)
