"""Hermitian linear algebra, state validation and entropy primitives.

States are plain numpy arrays: a pure state is a 1-D complex vector, a
density operator a square complex matrix.  Validation helpers convert and
check them; all entropies are in bits.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NotAStateError, ValidationError

STRUCT_TOL = 1e-12
SPECTRAL_TOL = 1e-10
NEG_EIG_TOL = 1e-10

JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100


def as_ket(psi, tol: float = STRUCT_TOL) -> np.ndarray:
    """Return ``psi`` as a complex vector, checking that it is normalized."""
    v = np.asarray(psi, dtype=complex)
    if v.ndim != 1 or v.size == 0:
        raise ValidationError(f"pure state must be a non-empty vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValidationError("pure state has non-finite amplitudes")
    norm2 = float(np.vdot(v, v).real)
    if abs(norm2 - 1.0) > tol:
        raise ValidationError(f"pure state is not normalized (|psi|^2 = {norm2!r})")
    return v


def normalize(psi) -> np.ndarray:
    v = np.asarray(psi, dtype=complex)
    norm = np.linalg.norm(v)
    if norm == 0 or not np.isfinite(norm):
        raise ValidationError("cannot normalize a zero or non-finite vector")
    return v / norm


def _as_square(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValidationError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    return a


def check_hermitian(m, tol: float = STRUCT_TOL) -> np.ndarray:
    """Validate Hermiticity entrywise and return the exactly symmetrized matrix."""
    a = _as_square(m)
    dev = float(np.max(np.abs(a - a.conj().T)))
    if dev > tol * max(1.0, float(np.max(np.abs(a)))):
        raise ValidationError(f"matrix is not Hermitian (max |A - A^H| = {dev:.3e})")
    return 0.5 * (a + a.conj().T)


def as_density(rho, tol: float = STRUCT_TOL) -> np.ndarray:
    """Validate a density operator: Hermitian, unit trace, PSD to -1e-10."""
    a = check_hermitian(rho, tol)
    tr = float(np.trace(a).real)
    if abs(tr - 1.0) > tol:
        raise NotAStateError(f"density operator has trace {tr!r}, expected 1")
    lam = hermitian_eigenvalues(a)
    if lam[-1] < -NEG_EIG_TOL:
        raise NotAStateError(f"density operator has negative eigenvalue {lam[-1]:.3e}")
    return a


def pure_density(psi) -> np.ndarray:
    """Rank-one projector |psi><psi| of a normalized state."""
    v = as_ket(psi)
    return np.outer(v, v.conj())


def jacobi_eigh(m, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Eigen-decomposition of a complex Hermitian matrix by cyclic Jacobi sweeps.

    Each rotation first removes the phase of the pivot ``a[p, q]`` with a
    diagonal unitary and then applies the classical real Jacobi rotation, so
    the matrix stays Hermitian throughout.  Iteration stops once the
    off-diagonal Frobenius norm drops below ``tol`` times the full norm.

    Returns
    -------
    w : ndarray
        Eigenvalues in descending order.
    v : ndarray
        Unitary matrix whose columns are the matching eigenvectors.
    """
    a = check_hermitian(m).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = float(np.linalg.norm(a))
    if scale == 0.0 or n == 1:
        w = a.diagonal().real.copy()
        return w, v
    skip = 1e-3 * tol * scale / n
    for _ in range(max_sweeps):
        off = float(np.sqrt(np.sum(np.abs(a - np.diag(a.diagonal())) ** 2)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[p, q]
                ag = abs(g)
                if ag <= skip:
                    continue
                ph = g / ag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * ag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                cph = ph.conjugate()
                # columns: A <- A U with U = [[c, s], [-s e^{-ia}, c e^{-ia}]]
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * cph * col_q
                a[:, q] = s * col_p + c * cph * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * ph * row_q
                a[q, :] = s * row_p + c * ph * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * cph * vq
                v[:, q] = s * vp + c * cph * vq
    else:
        raise ValidationError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    w = a.diagonal().real.copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def hermitian_eigenvalues(m, solver: str = "jacobi") -> np.ndarray:
    """Real spectrum of a Hermitian matrix, sorted descending.

    ``solver="lapack"`` delegates to ``numpy.linalg.eigvalsh``; it is used
    where many small spectra are needed and speed matters more than
    self-containment.
    """
    if solver == "jacobi":
        return jacobi_eigh(m)[0]
    if solver == "lapack":
        return np.linalg.eigvalsh(check_hermitian(m))[::-1]
    raise ValidationError(f"unknown eigensolver {solver!r}")


def shannon_entropy(probs) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    p = np.asarray(probs, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p))) + 0.0


def von_neumann_entropy(rho, solver: str = "jacobi") -> float:
    """Von Neumann entropy -tr(rho log2 rho) in bits.

    Eigenvalues in [-1e-10, 0) are treated as round-off and clamped to zero;
    anything more negative raises :class:`NotAStateError`.
    """
    a = check_hermitian(rho)
    tr = float(np.trace(a).real)
    if abs(tr - 1.0) > STRUCT_TOL:
        raise NotAStateError(f"density operator has trace {tr!r}, expected 1")
    lam = hermitian_eigenvalues(a, solver)
    if lam[-1] < -NEG_EIG_TOL:
        raise NotAStateError(f"density operator has negative eigenvalue {lam[-1]:.3e}")
    return shannon_entropy(np.clip(lam, 0.0, None))


def fubini_study_angle(a, b) -> float:
    """Fubini-Study distance arccos|<a|b>| between two rays, in [0, pi/2]."""
    u = as_ket(a)
    w = as_ket(b)
    if u.shape != w.shape:
        raise ValidationError(f"dimension mismatch: {u.size} vs {w.size}")
    overlap = min(abs(np.vdot(u, w)), 1.0)
    return math.acos(overlap)


def partial_trace_env(joint, d_sys: int, d_env: int) -> np.ndarray:
    """Reduced system state tr_E(joint) for a joint state on system (x) environment.

    The joint index is ``i_sys * d_env + k_env``.
    """
    a = _as_square(joint)
    if d_sys < 1 or d_env < 1 or a.shape[0] != d_sys * d_env:
        raise ValidationError(
            f"joint dimension {a.shape[0]} does not factor as {d_sys} x {d_env}")
    a = as_density(a)
    red = np.einsum("ikjk->ij", a.reshape(d_sys, d_env, d_sys, d_env))
    return 0.5 * (red + red.conj().T)


def is_identity(m, tol: float = SPECTRAL_TOL) -> bool:
    a = np.asarray(m)
    return bool(np.max(np.abs(a - np.eye(a.shape[0]))) <= tol)
