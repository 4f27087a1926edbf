"""Environment measurements, joint states and the ensembles they induce.

Environment labels and partition indices are 0-based throughout the
library; the command line prints them 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import qcore
from .errors import ValidationError

DENSE_MAX_DIM = 256


@dataclass(frozen=True)
class Partition:
    """Disjoint grouping of the labels ``0 .. n-1``.

    Groups are stored in canonical form: each group sorted, groups ordered by
    their smallest element.  Two partitions compare equal iff they group the
    labels identically, and tuple ordering of ``groups`` is the lexicographic
    order used for tie-breaking.
    """

    n: int
    groups: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("partition needs at least one label")
        groups = [tuple(sorted(int(i) for i in g)) for g in self.groups]
        if any(len(g) == 0 for g in groups):
            raise ValidationError("partition contains an empty group")
        seen = [i for g in groups for i in g]
        if len(seen) != len(set(seen)):
            raise ValidationError("partition groups overlap")
        if sorted(seen) != list(range(self.n)):
            raise ValidationError(f"partition groups do not cover 0..{self.n - 1}")
        groups.sort(key=lambda g: g[0])
        object.__setattr__(self, "groups", tuple(groups))

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(n, tuple((i,) for i in range(n)))

    @classmethod
    def trivial(cls, n: int) -> "Partition":
        return cls(n, (tuple(range(n)),))

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Partition":
        """Build from a block label per element (e.g. a restricted growth string)."""
        blocks: dict = {}
        for i, b in enumerate(labels):
            blocks.setdefault(b, []).append(i)
        return cls(len(labels), tuple(blocks.values()))

    def __len__(self):
        return len(self.groups)

    def masks(self) -> list:
        return [sum(1 << i for i in g) for g in self.groups]

    def one_based(self) -> list:
        return [[i + 1 for i in g] for g in self.groups]

    def __str__(self):
        return "{" + ", ".join("{" + ",".join(str(i) for i in g) + "}" for g in self.one_based()) + "}"


@dataclass(frozen=True)
class Povm:
    """Environment POVM: positive operators summing to the identity."""

    elements: tuple

    def __post_init__(self):
        elems = tuple(qcore.check_hermitian(e) for e in self.elements)
        if not elems:
            raise ValidationError("POVM needs at least one element")
        d = elems[0].shape[0]
        if any(e.shape != (d, d) for e in elems):
            raise ValidationError("POVM elements have inconsistent dimensions")
        for r, e in enumerate(elems):
            if qcore.hermitian_eigenvalues(e)[-1] < -qcore.SPECTRAL_TOL:
                raise ValidationError(f"POVM element {r} is not positive semidefinite")
        if not qcore.is_identity(sum(elems)):
            raise ValidationError("POVM elements do not sum to the identity")
        object.__setattr__(self, "elements", elems)

    @property
    def d_env(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self):
        return len(self.elements)


def grouping_povm(partition: Partition) -> Povm:
    """Projective POVM E_r = sum of the environment projectors P_k, k in group r."""
    elems = []
    for g in partition.groups:
        e = np.zeros((partition.n, partition.n), dtype=complex)
        e[list(g), list(g)] = 1.0
        elems.append(e)
    return Povm(tuple(elems))


@dataclass(frozen=True)
class ClassicalJointState:
    """Joint state sum_k w_k rho_k (x) P_k with orthogonal environment projectors P_k.

    ``densities`` has shape ``(n, d, d)``.  ``kets`` is kept when every
    branch was given as a pure state; the geometric optimizer needs it.
    """

    weights: np.ndarray
    densities: np.ndarray
    kets: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValidationError("joint state needs at least one branch")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValidationError("branch weights must be finite and non-negative")
        if abs(w.sum() - 1.0) > qcore.STRUCT_TOL:
            raise ValidationError(f"branch weights sum to {w.sum()!r}, expected 1")
        rho = np.asarray(self.densities, dtype=complex)
        if rho.ndim != 3 or rho.shape[0] != w.size or rho.shape[1] != rho.shape[2]:
            raise ValidationError(f"densities must have shape (n, d, d), got {rho.shape}")
        w.setflags(write=False)
        rho.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "densities", rho)
        if self.kets is not None:
            k = np.asarray(self.kets, dtype=complex)
            k.setflags(write=False)
            object.__setattr__(self, "kets", k)

    @classmethod
    def from_kets(cls, weights, kets) -> "ClassicalJointState":
        kets = [qcore.as_ket(k) for k in kets]
        dens = np.array([np.outer(k, k.conj()) for k in kets])
        return cls(np.asarray(weights, dtype=float), dens, np.array(kets))

    @classmethod
    def from_branches(cls, branches: Iterable) -> "ClassicalJointState":
        """Build from ``(weight, state)`` pairs; states may be kets or density matrices."""
        weights, dens, kets = [], [], []
        for w, state in branches:
            s = np.asarray(state, dtype=complex)
            weights.append(float(w))
            if s.ndim == 1:
                k = qcore.as_ket(s)
                kets.append(k)
                dens.append(np.outer(k, k.conj()))
            else:
                dens.append(qcore.as_density(s))
                kets.append(None)
        if not weights:
            raise ValidationError("joint state needs at least one branch")
        dims = {d.shape[0] for d in dens}
        if len(dims) != 1:
            raise ValidationError(f"branches have inconsistent system dimensions {sorted(dims)}")
        all_pure = all(k is not None for k in kets)
        return cls(np.array(weights), np.array(dens), np.array(kets) if all_pure else None)

    @classmethod
    def uniform(cls, kets) -> "ClassicalJointState":
        kets = list(kets)
        return cls.from_kets(np.full(len(kets), 1.0 / len(kets)), kets)

    @property
    def d_sys(self) -> int:
        return self.densities.shape[1]

    @property
    def n_env(self) -> int:
        return self.weights.size

    @property
    def is_pure(self) -> bool:
        return self.kets is not None

    def reduced_state(self) -> np.ndarray:
        return np.einsum("k,kij->ij", self.weights, self.densities)

    def to_dense(self) -> np.ndarray:
        """Joint density matrix on system (x) environment, index ``i * n + k``."""
        d, n = self.d_sys, self.n_env
        if d * n > DENSE_MAX_DIM:
            raise ValidationError(f"dense joint dimension {d * n} exceeds {DENSE_MAX_DIM}")
        joint = np.zeros((d, n, d, n), dtype=complex)
        for k in range(n):
            joint[:, k, :, k] = self.weights[k] * self.densities[k]
        return joint.reshape(d * n, d * n)


@dataclass(frozen=True)
class Ensemble:
    """Decomposition {p_r, rho_r} of a density operator."""

    probs: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        s = np.asarray(self.states, dtype=complex)
        if p.ndim != 1 or p.size == 0:
            raise ValidationError("ensemble needs at least one member")
        if np.any(p < 0) or abs(p.sum() - 1.0) > qcore.STRUCT_TOL:
            raise ValidationError("ensemble probabilities must be non-negative and sum to 1")
        if s.ndim != 3 or s.shape[0] != p.size or s.shape[1] != s.shape[2]:
            raise ValidationError(f"ensemble states must have shape (n, d, d), got {s.shape}")
        for rho in s:
            qcore.check_hermitian(rho)
            if abs(np.trace(rho).real - 1.0) > qcore.STRUCT_TOL:
                raise ValidationError("ensemble member does not have unit trace")
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "states", s)

    def __len__(self):
        return self.probs.size

    def mixture(self) -> np.ndarray:
        return np.einsum("r,rij->ij", self.probs, self.states)


@dataclass(frozen=True)
class EnsembleReport:
    """Entropy bookkeeping of an ensemble, all values in bits.

    ``H`` is the entropy of the average state, ``H_r`` the member entropies,
    ``Hbar`` their average, ``deltaHbar = H - Hbar`` and ``Ibar`` the Shannon
    entropy of the outcome distribution (average preparation information).
    """

    H: float
    H_r: tuple
    Hbar: float
    deltaHbar: float
    Ibar: float


def induced_ensemble(joint: ClassicalJointState, partition: Partition) -> Ensemble:
    """Ensemble induced on the system by the grouping measurement of ``partition``.

    Outcomes of zero probability are dropped.
    """
    if partition.n != joint.n_env:
        raise ValidationError(
            f"partition covers {partition.n} labels, joint state has {joint.n_env}")
    probs, states = [], []
    for g in partition.groups:
        idx = list(g)
        p = float(joint.weights[idx].sum())
        if p <= 0.0:
            continue
        rho = np.einsum("k,kij->ij", joint.weights[idx], joint.densities[idx]) / p
        probs.append(p)
        states.append(0.5 * (rho + rho.conj().T))
    probs = np.array(probs)
    return Ensemble(probs / probs.sum(), np.array(states))


def induced_ensemble_dense(joint, d_sys: int, povm: Povm) -> Ensemble:
    """Ensemble induced by an arbitrary POVM on a dense joint density matrix.

    p_r = tr(joint (1 (x) E_r)) and rho_r = tr_E(joint (1 (x) E_r)) / p_r.
    """
    d_env = povm.d_env
    a = np.asarray(joint, dtype=complex)
    if a.ndim != 2 or a.shape != (d_sys * d_env, d_sys * d_env):
        raise ValidationError(
            f"joint shape {a.shape} does not match {d_sys} x {d_env} system/environment")
    if d_sys * d_env > DENSE_MAX_DIM:
        raise ValidationError(f"dense joint dimension {d_sys * d_env} exceeds {DENSE_MAX_DIM}")
    a = qcore.as_density(a).reshape(d_sys, d_env, d_sys, d_env)
    probs, states = [], []
    for e in povm.elements:
        unnorm = np.einsum("ikjl,lk->ij", a, e)
        unnorm = 0.5 * (unnorm + unnorm.conj().T)
        p = float(np.trace(unnorm).real)
        if p <= qcore.STRUCT_TOL:
            continue
        probs.append(p)
        states.append(unnorm / p)
    probs = np.array(probs)
    return Ensemble(probs / probs.sum(), np.array(states))


def analyze(ensemble: Ensemble) -> EnsembleReport:
    H = qcore.von_neumann_entropy(ensemble.mixture())
    H_r = tuple(qcore.von_neumann_entropy(rho) for rho in ensemble.states)
    Hbar = float(np.dot(ensemble.probs, H_r))
    return EnsembleReport(
        H=H,
        H_r=H_r,
        Hbar=Hbar,
        deltaHbar=H - Hbar,
        Ibar=qcore.shannon_entropy(ensemble.probs),
    )


@dataclass(frozen=True)
class TradeoffPoint:
    """One sample of an information/entropy-reduction curve (bits)."""

    param: float
    deltaHbar: float
    info: float


def qubit_fixture() -> ClassicalJointState:
    """Four equally weighted qubit states |0>, |1>, |+>, |-> on orthogonal environment labels."""
    s = 1.0 / np.sqrt(2.0)
    kets = [[1.0, 0.0], [0.0, 1.0], [s, s], [s, -s]]
    return ClassicalJointState.uniform(kets)
