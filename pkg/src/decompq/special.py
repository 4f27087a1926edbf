"""Terminating hypergeometric sums, binomial tails and the cap integral.

The coherent-state cap spectrum is built from three equivalent ingredients:
the terminating Gauss function F(-p, b; c; z), the binomial distribution
function at p = 1/2, and the trigonometric integral

    Lambda(p, q; Theta) = int_0^{Theta/2} cos^(2p+1) t sin^(2q+1) t dt,

whose adaptive Gauss-Legendre evaluation is the reference the closed forms
are checked against.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import QuadratureError, ValidationError

EXACT_BINOMIAL_MAX_N = 4096


def log_comb(n: int, k: int) -> float:
    """Natural log of C(n, k), exact-integer based below 4096, log-gamma above."""
    if not 0 <= k <= n:
        raise ValidationError(f"invalid binomial arguments ({n}, {k})")
    if n <= EXACT_BINOMIAL_MAX_N:
        return math.log(math.comb(n, k))
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _log_poch(x: float, k: int) -> float:
    """log of the rising factorial (x)_k for x > 0."""
    return math.lgamma(x + k) - math.lgamma(x)


def _check_p(p):
    if int(p) != p or p < 0:
        raise ValidationError(f"terminating parameter must be a non-negative integer, got {p}")
    return int(p)


def hyp2f1_series(p: int, b: float, c: float, z: float) -> float:
    """Forward sum of F(-p, b; c; z) term by term, compensated with ``math.fsum``."""
    p = _check_p(p)
    if c <= 0 and float(c).is_integer():
        raise ValidationError(f"c must not be a non-positive integer, got {c}")
    terms = [1.0]
    t = 1.0
    for k in range(p):
        t *= (k - p) * (b + k) / ((c + k) * (k + 1)) * z
        terms.append(t)
    return math.fsum(terms)


def _hyp2f1_pfaff(p: int, b: float, c: float, z: float) -> float:
    # F(-p,b;c;z) = (1-z)^p F(-p, c-b; c; z/(z-1)); for 0 < b < c, 0 < z <= 1
    # every term C(p,k) (c-b)_k/(c)_k z^k (1-z)^(p-k) is non-negative.
    lz = math.log(z)
    l1z = math.log1p(-z) if z < 1.0 else -math.inf
    terms = []
    for k in range(p + 1):
        if p - k > 0 and l1z == -math.inf:
            continue
        lt = log_comb(p, k) + _log_poch(c - b, k) - _log_poch(c, k) + k * lz
        if p - k > 0:
            lt += (p - k) * l1z
        terms.append(math.exp(lt))
    return math.fsum(terms)


def hyp2f1_terminating(p: int, b: float, c: float, z: float) -> float:
    """Gauss function F(-p, b; c; z) for a non-negative integer ``p``.

    For 0 < z <= 1 and 0 < b < c the sum is taken after a Pfaff
    transformation, in which all terms share one sign; this avoids the
    cancellation of the alternating series when p is large and z is close to
    one.  Otherwise the series is summed directly (its terms have a single
    sign for z <= 0 with b, c > 0).
    """
    p = _check_p(p)
    if c <= 0 and float(c).is_integer():
        raise ValidationError(f"c must not be a non-positive integer, got {c}")
    if p == 0:
        return 1.0
    if 0.0 < z <= 1.0 and 0.0 < b < c:
        return _hyp2f1_pfaff(p, b, c, z)
    return hyp2f1_series(p, b, c, z)


def hyp_at_minus_one(a: int, b: int) -> float:
    """F(a, b; b+1; -1) for integers a > b >= 1, from its binomial closed form.

    F = b! (a-b-1)! / (a-1)! * [1 - 2^(1-a) sum_{x<b} C(a-1, x)], evaluated
    as an exact rational, so the bracket (a binomial upper tail) loses
    nothing to cancellation.
    """
    if int(a) != a or int(b) != b or not a > b >= 1:
        raise ValidationError(f"need integers a > b >= 1, got a={a}, b={b}")
    a, b = int(a), int(b)
    head = sum(math.comb(a - 1, x) for x in range(b))
    tail = (1 << (a - 1)) - head
    return float(Fraction(tail, (1 << (a - 1)) * math.comb(a - 1, b)))


def hyp_at_minus_one_b1(a: int) -> float:
    """F(a, 1; 2; -1) = (1 - 2^(1-a)) / (a - 1)."""
    if a == 1:
        return math.log(2.0)
    return (1.0 - 2.0 ** (1 - a)) / (a - 1)


def gauss_alpha(a: int, b: int) -> float:
    return b / (a - b)


def gauss_beta(a: int, b: int) -> float:
    return -(2.0 ** (1 - a)) * gauss_alpha(a, b)


def binom_cdf_half(y: int, n: int) -> float:
    """P(X <= y) for X ~ Binomial(n, 1/2)."""
    if int(y) != y or int(n) != n or n < 0 or not 0 <= y <= n:
        raise ValidationError(f"need integers 0 <= y <= n, got y={y}, n={n}")
    y, n = int(y), int(n)
    if y == n:
        return 1.0
    if n <= EXACT_BINOMIAL_MAX_N:
        return float(Fraction(sum(math.comb(n, x) for x in range(y + 1)), 1 << n))
    ln2n = n * math.log(2.0)
    terms = [math.exp(log_comb(n, x) - ln2n) for x in range(y + 1)]
    return min(math.fsum(terms), 1.0)


# --- quadrature reference ------------------------------------------------------

@lru_cache(maxsize=None)
def _gl_rule(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _gl_panel(f, lo, hi, order):
    x, w = _gl_rule(order)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    return half * float(np.dot(w, f(mid + half * x)))


def adaptive_gauss_legendre(f, lo: float, hi: float, abs_tol: float = 1e-13,
                            rel_tol: float = 1e-13, order: int = 64,
                            max_depth: int = 40) -> float:
    """Integrate a smooth vectorized ``f`` by recursive bisection of GL panels.

    A panel is accepted when its value and the sum over its two halves agree
    to within both ``abs_tol`` and ``rel_tol`` (relative to the refined
    value).
    """

    def rec(a, b, whole, depth):
        m = 0.5 * (a + b)
        left = _gl_panel(f, a, m, order)
        right = _gl_panel(f, m, b, order)
        refined = left + right
        diff = abs(refined - whole)
        if diff <= abs_tol and diff <= rel_tol * abs(refined) or diff == 0.0:
            return refined
        if depth >= max_depth:
            raise QuadratureError(
                f"quadrature did not converge on [{a}, {b}] (difference {diff:.3e})")
        return rec(a, m, left, depth + 1) + rec(m, b, right, depth + 1)

    return rec(lo, hi, _gl_panel(f, lo, hi, order), 0)


def lambda_quadrature(p: int, q: int, theta: float, abs_tol: float = 1e-13) -> float:
    """Lambda(p, q; Theta) = int_0^{Theta/2} cos^(2p+1) t sin^(2q+1) t dt by quadrature."""
    p, q = _check_p(p), _check_p(q)
    if not 0.0 < theta <= math.pi:
        raise ValidationError(f"Theta must lie in (0, pi], got {theta}")
    return adaptive_gauss_legendre(
        lambda t: np.cos(t) ** (2 * p + 1) * np.sin(t) ** (2 * q + 1),
        0.0, 0.5 * theta, abs_tol=abs_tol)


def lambda_full(p: int, q: int) -> float:
    """Lambda(p, q; pi) = p! q! / (2 (p+q+1)!)."""
    return float(Fraction(math.factorial(p) * math.factorial(q), 2 * math.factorial(p + q + 1)))


def lambda_closed(p: int, q: int, theta: float) -> float:
    """Lambda(p, q; Theta) = sin^(2q+2)(Theta/2) / (2(q+1)) F(-p, q+1; q+2; sin^2(Theta/2))."""
    z = math.sin(0.5 * theta) ** 2
    return z ** (q + 1) / (2 * (q + 1)) * hyp2f1_terminating(p, q + 1, q + 2, z)
