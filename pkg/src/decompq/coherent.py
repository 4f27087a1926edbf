"""Spin-j coherent states grouped into spherical caps.

A uniform mixture of coherent states |theta, phi> over a cap of half-angle
Theta around the north pole is diagonal in the J_z basis.  Its eigenvalues
(the cap spectrum) give the average entropy of a decomposition into equal
caps, and the cap area gives the information needed to name a cap.

Magnetic quantum numbers are handled through ``p = j + m`` in ``0 .. 2j``;
arrays indexed by m are in ascending order m = -j, ..., j.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import qcore
from .ensembles import TradeoffPoint
from .errors import NumericalError, ValidationError
from .special import binom_cdf_half, hyp2f1_series, hyp2f1_terminating, log_comb

NORM_TOL = 1e-10


def two_j(j) -> int:
    """Return 2j as an int, rejecting spins that are not non-negative half-integers."""
    if isinstance(j, float):
        tj = round(2 * j)
        if abs(2 * j - tj) > 1e-12:
            raise ValidationError(f"spin must be an integer or half-integer, got {j}")
    else:
        tj = 2 * Fraction(j)
        if tj.denominator != 1:
            raise ValidationError(f"spin must be an integer or half-integer, got {j}")
    if tj < 0:
        raise ValidationError(f"spin must be non-negative, got {j}")
    return int(tj)


def m_values(j) -> np.ndarray:
    tj = two_j(j)
    return np.arange(tj + 1) - tj / 2


@dataclass(frozen=True)
class CapSpectrum:
    """Eigenvalues of the cap mixture, ``lambdas[p]`` belonging to m = p - j."""

    j: float
    theta: float
    lambdas: np.ndarray

    @property
    def ms(self) -> np.ndarray:
        return m_values(self.j)

    def entropy(self) -> float:
        return qcore.shannon_entropy(self.lambdas)


def coherent_state(j, theta: float, phi: float) -> np.ndarray:
    """Amplitudes of |theta, phi> on |j; m>, m ascending.

    <j;m|theta,phi> = C(2j, j+m)^(1/2) cos^(j+m)(theta/2) sin^(j-m)(theta/2) e^(-i m phi)
    """
    tj = two_j(j)
    c = math.cos(0.5 * theta)
    s = math.sin(0.5 * theta)
    amps = np.empty(tj + 1, dtype=complex)
    for p in range(tj + 1):
        q = tj - p
        m = p - tj / 2
        if c == 0.0 or s == 0.0:
            mag = math.sqrt(math.comb(tj, p)) * c ** p * s ** q
        else:
            mag = math.exp(0.5 * log_comb(tj, p) + p * math.log(abs(c)) + q * math.log(abs(s)))
            mag *= math.copysign(1.0, c) ** p * math.copysign(1.0, s) ** q
        amps[p] = mag * cmath.exp(-1j * m * phi)
    return amps


def _check_theta(theta):
    if not 0.0 < theta <= math.pi:
        raise ValidationError(f"cap half-angle must lie in (0, pi], got {theta}")


def cap_eigenvalues(j, theta: float, method: str = "pfaff") -> CapSpectrum:
    """Spectrum of the uniform coherent-state mixture over a cap of half-angle ``theta``.

    lambda_m = (2j)! sin^(2(j-m))(Theta/2) / ((j+m)! (j-m+1)!) * F(-j-m, j-m+1; j-m+2; sin^2(Theta/2))

    The factorial prefactor is C(2j+1, j+m) / (2j+1) and is combined with the
    power of the sine in log space.  ``method="pfaff"`` evaluates F through
    the sign-definite transformed sum; ``method="series"`` sums the original
    alternating series and is only well conditioned for small spins.
    """
    tj = two_j(j)
    _check_theta(theta)
    if method not in ("pfaff", "series"):
        raise ValidationError(f"unknown method {method!r}")
    hyp = hyp2f1_terminating if method == "pfaff" else hyp2f1_series
    z = math.sin(0.5 * theta) ** 2
    lz = math.log(z)
    lams = np.empty(tj + 1)
    for p in range(tj + 1):
        q = tj - p
        f = hyp(p, q + 1, q + 2, z)
        if f <= 0.0:
            lams[p] = 0.0 if f == 0.0 else f
            continue
        lams[p] = math.exp(log_comb(tj + 1, p) - math.log(tj + 1) + q * lz + math.log(f))
    if not np.all(np.isfinite(lams)):
        raise NumericalError(f"cap spectrum overflowed for j={j}, Theta={theta}")
    total = math.fsum(lams)
    if abs(total - 1.0) > NORM_TOL:
        raise NumericalError(f"cap spectrum sums to {total!r} for j={j}, Theta={theta}")
    return CapSpectrum(tj / 2, float(theta), lams)


def hemisphere_eigenvalues(j) -> CapSpectrum:
    """Cap spectrum at Theta = pi/2: lambda_m = 2/(2j+1) P(X <= j+m), X ~ Bin(2j+1, 1/2)."""
    tj = two_j(j)
    n = tj + 1
    lams = np.array([2.0 * binom_cdf_half(p, n) / n for p in range(n)])
    return CapSpectrum(tj / 2, math.pi / 2, lams)


def cap_entropy(j, theta: float) -> float:
    """Average entropy (bits) of a decomposition into caps of half-angle ``theta``."""
    _check_theta(theta)
    if theta == math.pi:
        return math.log2(two_j(j) + 1)
    if theta == math.pi / 2:
        return hemisphere_eigenvalues(j).entropy()
    return cap_eigenvalues(j, theta).entropy()


def cap_information(theta: float) -> float:
    """Bits needed to name a cap: log2 of sphere area over cap area, 2 / (1 - cos Theta)."""
    _check_theta(theta)
    if theta <= 1.0:
        return -2.0 * math.log2(math.sin(0.5 * theta))
    # 1 - log2(1 - cos) keeps the hemisphere value at exactly one bit
    return 1.0 - math.log1p(-math.cos(theta)) / math.log(2.0) + 0.0


def tradeoff_curve_coherent(j, thetas) -> list:
    """Points (Theta, entropy reduction, information) for half-angles sorted descending."""
    thetas = [float(t) for t in thetas]
    if any(b >= a for a, b in zip(thetas, thetas[1:])):
        raise ValidationError("cap half-angles must be strictly descending")
    H = math.log2(two_j(j) + 1)
    return [TradeoffPoint(t, H - cap_entropy(j, t), cap_information(t)) for t in thetas]


def hemisphere_ratio(j) -> float:
    """Information over entropy reduction for the two-hemisphere grouping."""
    dh = math.log2(two_j(j) + 1) - cap_entropy(j, math.pi / 2)
    return 1.0 / dh


def ratio_convergence(js) -> list:
    js = list(js)
    if any(two_j(b) <= two_j(a) for a, b in zip(js, js[1:])):
        raise ValidationError("spins must be strictly increasing")
    return [(two_j(j) / 2, hemisphere_ratio(j)) for j in js]


@dataclass(frozen=True)
class BoundCheck:
    m: float
    value: float
    lower: float
    upper: float

    @property
    def satisfied(self) -> bool:
        return self.lower <= self.value <= self.upper


@dataclass(frozen=True)
class ChernoffReport:
    """Tail bounds on the hemisphere spectrum, checked index by index.

    For m < -1 - j^(2/3):  0 <= lambda_m <= exp(-j^(1/3)/3) / j.
    For m >  1 + j^(2/3):  2/(2j+1) (1 - exp(-j^(1/3)/3) - 4^(-j)) <= lambda_m <= 1/j.
    """

    j: float
    checks: tuple

    @property
    def violations(self) -> list:
        return [c for c in self.checks if not c.satisfied]

    @property
    def vacuous(self) -> bool:
        return not self.checks

    @property
    def ok(self) -> bool:
        return not self.violations


def chernoff_bounds_check(j) -> ChernoffReport:
    tj = two_j(j)
    jf = tj / 2
    if jf < 2:
        raise ValidationError(f"bounds are stated for j >= 2, got {jf}")
    hemi = hemisphere_eigenvalues(jf)
    decay = math.exp(-(jf ** (1.0 / 3.0)) / 3.0)
    low_upper = decay / jf
    high_lower = 2.0 / (tj + 1) * (1.0 - decay - 4.0 ** (-jf))
    checks = []
    j_sq = Fraction(tj, 2) ** 2

    def beyond(x):
        # x > j^(2/3), decided exactly
        return x > 0 and x ** 3 > j_sq

    for p, lam in enumerate(hemi.lambdas):
        m = Fraction(2 * p - tj, 2)
        if beyond(-1 - m):
            checks.append(BoundCheck(float(m), float(lam), 0.0, low_upper))
        elif beyond(m - 1):
            checks.append(BoundCheck(float(m), float(lam), high_lower, 1.0 / jf))
    return ChernoffReport(jf, tuple(checks))


def cap_mixture_matrix(j, theta: float, npts: int = 64) -> np.ndarray:
    """Cap mixture assembled from coherent-state projectors by product quadrature.

    Gauss-Legendre in the polar angle and the trapezoid rule in azimuth;
    used to check that the mixture is diagonal with the cap spectrum.
    """
    _check_theta(theta)
    x, w = np.polynomial.legendre.leggauss(npts)
    # integrate over u = cos(theta') in [cos Theta, 1]
    lo = math.cos(theta)
    u = 0.5 * (1.0 - lo) * x + 0.5 * (1.0 + lo)
    wu = 0.5 * (1.0 - lo) * w
    nphi = 2 * two_j(j) + 2
    dim = two_j(j) + 1
    rho = np.zeros((dim, dim), dtype=complex)
    for ui, wi in zip(u, wu):
        th = math.acos(ui)
        for k in range(nphi):
            v = coherent_state(j, th, 2 * math.pi * k / nphi)
            rho += wi / nphi * np.outer(v, v.conj())
    return rho / (1.0 - lo)
