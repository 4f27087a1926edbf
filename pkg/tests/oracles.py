"""Independent reference implementations used only by the tests.

None of these call into the package's numerical kernels: eigenvalues come
from LAPACK or from characteristic-polynomial roots, partitions from a
block-of-the-first-element recursion, special functions from mpmath.
"""

import math
from fractions import Fraction
from itertools import combinations

import mpmath
import numpy as np


# --- linear algebra -------------------------------------------------------------

def charpoly_eigenvalues(a):
    """Eigenvalues of a small Hermitian matrix as roots of its characteristic polynomial.

    Coefficients by the Faddeev-LeVerrier recursion, roots by numpy's
    companion-matrix solver.  Accurate to ~1e-10 for well-separated
    spectra of dimension <= 6.
    """
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    coeffs = [1.0 + 0j]
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ m + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(a @ m) / k)
    roots = np.roots(coeffs)
    return np.sort(roots.real)[::-1]


def entropy_bits(rho):
    lam = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    lam = lam[lam > 1e-300]
    return float(-np.sum(lam * np.log2(lam)))


# --- set partitions -------------------------------------------------------------

def set_partitions(items):
    """All set partitions of ``items``; the block holding the first item is chosen first."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for r in range(len(rest) + 1):
        for mates in combinations(rest, r):
            block = (first,) + mates
            remaining = [x for x in rest if x not in mates]
            for tail in set_partitions(remaining):
                yield [block] + tail


def bell(n):
    """Bell numbers from the Bell triangle."""
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def brute_force_info_min(weights, densities, delta_h, tol=1e-9):
    """Minimal outcome entropy over all groupings with H - Hbar >= delta_h - tol.

    Returns ``(info_min, partition)`` or ``(None, None)`` when infeasible.
    """
    weights = np.asarray(weights, dtype=float)
    densities = np.asarray(densities, dtype=complex)
    n = weights.size
    H = entropy_bits(np.einsum("k,kij->ij", weights, densities))
    cache = {}

    def block(b):
        if b not in cache:
            p = float(sum(weights[i] for i in b))
            rho = sum(weights[i] * densities[i] for i in b) / p
            cache[b] = (p, p * entropy_bits(rho))
        return cache[b]

    best, arg = None, None
    for part in set_partitions(range(n)):
        stats = [block(b) for b in part]
        hbar = sum(s[1] for s in stats)
        if H - hbar < delta_h - tol:
            continue
        info = -sum(p * math.log2(p) for p, _ in stats if p > 0)
        if best is None or info < best:
            best, arg = info, part
    return best, arg


# --- special functions ----------------------------------------------------------

def mp_hyp2f1(a, b, c, z, dps=50):
    with mpmath.workdps(dps):
        return float(mpmath.hyp2f1(a, b, c, z))


def cap_eigenvalue_mp(j2, p, theta, dps=40):
    """Cap spectrum entry for m = p - j by direct integration over the cap.

    lambda = 1/(1 - cos Theta) int_{cos Theta}^1 C(2j, p) ((1+u)/2)^p ((1-u)/2)^(2j-p) du
    """
    with mpmath.workdps(dps):
        lo = mpmath.cos(theta)
        f = lambda u: mpmath.binomial(j2, p) * ((1 + u) / 2) ** p * ((1 - u) / 2) ** (j2 - p)
        return float(mpmath.quad(f, [lo, 1]) / (1 - lo))


def binom_cdf_half_exact(y, n):
    total, c = 0, 1
    for x in range(y + 1):
        total += c
        c = c * (n - x) // (x + 1)
    return Fraction(total, 2 ** n)


def finite_difference_slope(f, g, x, h=1e-5):
    """d f / d g along a curve parameterized by x, by central differences."""
    return (f(x + h) - f(x - h)) / (g(x + h) - g(x - h))
