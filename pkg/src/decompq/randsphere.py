"""Sphere-packing model for randomly distributed states in Hilbert space.

Random pure states in dimension ``D`` are grouped into Fubini-Study balls
("caps") of radius ``phi``.  The average entropy of the decomposition is the
entropy of a uniform mixture over one cap; the information needed to name a
cap is the log of the number of caps that fit in projective Hilbert space.
Both are closed forms in ``phi``; the Monte-Carlo samplers here exist to
check them.
"""

from __future__ import annotations

import math

import numpy as np

from . import qcore
from .ensembles import TradeoffPoint
from .errors import ValidationError

HALF_PI = math.pi / 2


def _check(D, phi):
    if int(D) != D or D < 2:
        raise ValidationError(f"dimension must be an integer >= 2, got {D}")
    if not 0.0 < phi <= HALF_PI:
        raise ValidationError(f"cap radius must lie in (0, pi/2], got {phi}")


def cap_spectrum(D: int, phi: float) -> np.ndarray:
    """Eigenvalues of the uniform cap mixture: the centre value, then D-1 equal ones."""
    _check(D, phi)
    s2 = math.sin(phi) ** 2
    rest = s2 / D
    return np.array([1.0 - (D - 1) * rest] + [rest] * (D - 1))


def sphere_entropy(D: int, phi: float) -> float:
    """Entropy (bits) of the uniform mixture of states within radius ``phi``."""
    _check(D, phi)
    if phi == HALF_PI:
        return math.log2(D)
    s2 = math.sin(phi) ** 2
    a = (D - 1) / D * s2
    return -(1.0 - a) * math.log2(1.0 - a) - a * math.log2(s2 / D)


def sphere_information(D: int, phi: float) -> float:
    """Bits needed to name one of the (sin phi)^(-2(D-1)) caps of radius ``phi``."""
    _check(D, phi)
    return -(D - 1) * math.log2(math.sin(phi) ** 2) + 0.0


def entropy_reduction(D: int, phi: float) -> float:
    return math.log2(D) - sphere_entropy(D, phi)


def tradeoff_derivative(D: int, phi: float) -> float:
    """Slope d(information)/d(entropy reduction) along the cap-radius curve.

    At ``phi == pi/2`` the slope diverges; ``math.inf`` is returned rather
    than raising, since the curve endpoint itself is well defined.
    """
    _check(D, phi)
    if phi == HALF_PI:
        return math.inf
    cot2 = (math.cos(phi) / math.sin(phi)) ** 2
    denom = math.sin(phi) ** 2 * math.log1p(D * cot2)
    if denom == 0.0:
        return math.inf
    return D / denom


def small_cap_derivative(D: int, eps: float) -> float:
    """Approximate slope D / ln(1 + D eps^2) for radius pi/2 - eps."""
    return D / math.log1p(D * eps * eps)


def small_cap_information(D: int, eps: float) -> float:
    return (D - 1) * eps * eps / math.log(2)


def ball_mixture_density(center, phi: float) -> np.ndarray:
    """Uniform mixture of the states within radius ``phi`` of ``center``."""
    c = qcore.as_ket(center)
    D = c.size
    lam = cap_spectrum(D, phi)
    proj = np.outer(c, c.conj())
    return lam[0] * proj + lam[1] * (np.eye(D) - proj)


def tradeoff_curve(D: int, phis) -> list:
    """Points (phi, entropy reduction, information) for radii sorted descending."""
    phis = [float(p) for p in phis]
    if any(b >= a for a, b in zip(phis, phis[1:])):
        raise ValidationError("radii must be strictly descending")
    return [TradeoffPoint(p, entropy_reduction(D, p), sphere_information(D, p)) for p in phis]


# --- sampling ------------------------------------------------------------------

def make_rng(seed) -> np.random.Generator:
    """Counter-based (Philox) generator; a Generator passes through unchanged."""
    if isinstance(seed, np.random.Generator):
        return seed
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


def _gaussian_kets(rng, n, D):
    return rng.standard_normal((n, D)) + 1j * rng.standard_normal((n, D))


def sample_haar_batch(D: int, n: int, seed) -> np.ndarray:
    """``n`` unitarily invariant random states, one per row."""
    if D < 2:
        raise ValidationError("dimension must be >= 2")
    z = _gaussian_kets(make_rng(seed), n, D)
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def sample_haar(D: int, seed) -> np.ndarray:
    return sample_haar_batch(D, 1, seed)[0]


def sample_cap_batch(center, phi: float, n: int, seed) -> np.ndarray:
    """``n`` states uniform (Fubini-Study volume) within radius ``phi`` of ``center``.

    The angle to the centre is drawn by inverting its distribution function
    (sin theta / sin phi)^(2(D-1)); the direction is a Haar-random unit vector
    orthogonal to the centre.
    """
    c = qcore.as_ket(center)
    D = c.size
    _check(D, phi)
    rng = make_rng(seed)
    u = rng.random(n)
    theta = np.arcsin(np.clip(math.sin(phi) * u ** (1.0 / (2 * (D - 1))), 0.0, 1.0))
    z = _gaussian_kets(rng, n, D)
    z -= np.outer(z @ c.conj(), c)
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return np.cos(theta)[:, None] * c[None, :] + np.sin(theta)[:, None] * z


def sample_cap(center, phi: float, seed) -> np.ndarray:
    return sample_cap_batch(center, phi, 1, seed)[0]


def empirical_cap_mixture(center, phi: float, n: int, seed, chunk: int = 8192) -> np.ndarray:
    """Average projector over ``n`` cap samples.

    Samples are drawn in fixed-size chunks, each from its own child stream of
    ``seed``, and summed in chunk order; the result depends only on
    (seed, n, chunk).
    """
    c = qcore.as_ket(center)
    D = c.size
    nchunks = -(-n // chunk)
    children = np.random.SeedSequence(seed).spawn(nchunks)
    acc = np.zeros((D, D), dtype=complex)
    left = n
    for child in children:
        m = min(chunk, left)
        kets = sample_cap_batch(c, phi, m, make_rng(child))
        acc += kets.T @ kets.conj()
        left -= m
    rho = acc / n
    return 0.5 * (rho + rho.conj().T)
