"""Search for decompositions with minimal average preparation information.

The search space is the class of grouping measurements: every partition of
the environment labels defines one projective measurement.  For up to 13
labels the search is exhaustive (branch and bound over set partitions);
beyond that a geometric clustering heuristic is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from . import qcore
from .ensembles import (ClassicalJointState, EnsembleReport, Partition, TradeoffPoint,
                        analyze, induced_ensemble)
from .errors import InfeasibleError, ValidationError

MAX_EXHAUSTIVE = 13
FEAS_TOL = 1e-9
DEFAULT_EPSILON = 1e-6
# label exchanges and split-and-repolish kicks cost O(n^2) evaluations per pass
REFINE_MAX_LABELS = 24

EXHAUSTIVE_OPTIMAL = "exhaustive-optimal"
EPSILON_OPTIMAL = "epsilon-optimal"
HEURISTIC = "heuristic"


@dataclass(frozen=True)
class OptimizationResult:
    """Chosen partition, its entropy report and how optimality was established.

    ``info_min`` is the smallest average preparation information found over
    the feasible set; for exhaustive searches it is the exact minimum.  The
    chosen partition may exceed it by at most the tie threshold epsilon when
    the tie-break preferred a coarser partition, in which case
    ``optimal == "epsilon-optimal"``.
    """

    partition: Partition
    report: EnsembleReport
    optimal: str
    info_min: float


def enumerate_partitions(n: int) -> Iterator[Partition]:
    """Yield every set partition of ``0 .. n-1`` once, in restricted-growth order."""
    if not 1 <= n <= MAX_EXHAUSTIVE:
        raise ValidationError(f"n must be in [1, {MAX_EXHAUSTIVE}], got {n}")
    labels = [0] * n

    def rec(i, used):
        # used = number of blocks opened by labels[:i]; label `used` opens a new one
        if i == n:
            yield Partition.from_labels(labels)
            return
        for b in range(used + 1):
            labels[i] = b
            yield from rec(i + 1, max(used, b + 1))

    yield from rec(1, 1)


def _xlog(p: float) -> float:
    return -p * math.log2(p) if p > 0.0 else 0.0


class _SubsetTable:
    """Lazily cached probability and weighted entropy of every label subset."""

    def __init__(self, joint: ClassicalJointState, solver: str = "jacobi"):
        self.joint = joint
        self.solver = solver
        self.n = joint.n_env
        self._cache: dict = {}
        self._total = math.fsum(joint.weights)
        self.H = qcore.von_neumann_entropy(joint.reduced_state(), solver)

    def get(self, mask: int):
        hit = self._cache.get(mask)
        if hit is None:
            idx = [i for i in range(self.n) if mask >> i & 1]
            w = self.joint.weights[idx]
            p = math.fsum(w) / self._total
            if p > 0.0:
                rho = np.einsum("k,kij->ij", w, self.joint.densities[idx]) / p
                ent = p * qcore.von_neumann_entropy(0.5 * (rho + rho.conj().T), self.solver)
            else:
                ent = 0.0
            hit = (p, ent, _xlog(p))
            self._cache[mask] = hit
        return hit

    def evaluate(self, masks: Sequence[int]):
        """(info, hbar) of a partition given as block masks in canonical order."""
        info = 0.0
        hbar = 0.0
        for m in masks:
            _, ent, xl = self.get(m)
            info += xl
            hbar += ent
        return info, hbar


def _masks_to_partition(n: int, masks) -> Partition:
    return Partition(n, tuple(tuple(i for i in range(n) if m >> i & 1) for m in masks))


def _report(joint, partition):
    return analyze(induced_ensemble(joint, partition))


def _singleton_delta(table: _SubsetTable) -> float:
    return table.H - sum(table.get(1 << i)[1] for i in range(table.n))


def optimal_exhaustive(joint: ClassicalJointState, delta_h: float,
                       epsilon: float = DEFAULT_EPSILON,
                       max_groups: int | None = None) -> OptimizationResult:
    """Minimal-information grouping with entropy reduction at least ``delta_h``.

    Branch and bound over all set partitions of the environment labels.  A
    partial assignment is pruned when a lower bound on the final average
    entropy already violates the constraint (merging never lowers average
    entropy) or when a lower bound on the final information exceeds the best
    feasible value found plus ``epsilon`` (the outcome entropy is concave, so
    the remaining mass is best placed in a single block).

    Among partitions within ``epsilon`` of the minimum, the one with fewest
    groups wins, then the lexicographically smallest canonical form.
    ``max_groups`` restricts the search to partitions with at most that many
    groups.
    """
    n = joint.n_env
    if n > MAX_EXHAUSTIVE:
        raise ValidationError(f"exhaustive search supports at most {MAX_EXHAUSTIVE} labels, got {n}")
    if epsilon < 0:
        raise ValidationError("epsilon must be non-negative")
    limit = n if max_groups is None else max(1, min(int(max_groups), n))
    table = _SubsetTable(joint)
    H = table.H
    budget = H - delta_h + FEAS_TOL  # feasible iff hbar <= budget

    single_mask = [1 << i for i in range(n)]
    single_ent = [table.get(m)[1] for m in single_mask]
    weights = [float(w) for w in joint.weights]
    suffix_ent = [0.0] * (n + 1)
    suffix_w = [0.0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix_ent[i] = suffix_ent[i + 1] + single_ent[i]
        suffix_w[i] = suffix_w[i + 1] + weights[i]

    best = [math.inf]
    candidates = []
    masks: list = []
    probs: list = []
    ents: list = []

    def info_lower_bound(r):
        base = sum(_xlog(p) for p in probs)
        if r <= 0.0:
            return base
        lb = base + _xlog(r) if len(masks) < limit else math.inf
        for p in probs:
            lb = min(lb, base - _xlog(p) + _xlog(p + r))
        return lb

    def rec(i):
        if sum(ents) + suffix_ent[i] > budget:
            return
        if info_lower_bound(suffix_w[i]) > best[0] + epsilon + 1e-12:
            return
        if i == n:
            info, hbar = table.evaluate(masks)
            if hbar > budget:
                return
            if info < best[0]:
                best[0] = info
                candidates[:] = [c for c in candidates if c[0] <= info + epsilon]
            if info <= best[0] + epsilon:
                candidates.append((info, len(masks), _masks_to_partition(n, masks).groups, list(masks)))
            return
        bit = 1 << i
        for b in range(len(masks)):
            old = masks[b]
            masks[b] = old | bit
            p, ent, _ = table.get(masks[b])
            op, oe = probs[b], ents[b]
            probs[b], ents[b] = p, ent
            rec(i + 1)
            masks[b], probs[b], ents[b] = old, op, oe
        if len(masks) < limit:
            p, ent, _ = table.get(bit)
            masks.append(bit)
            probs.append(p)
            ents.append(ent)
            rec(i + 1)
            masks.pop()
            probs.pop()
            ents.pop()

    rec(0)
    if not candidates:
        raise InfeasibleError(delta_h, _max_delta(table, limit))
    info_min = best[0]
    pool = [c for c in candidates if c[0] <= info_min + epsilon]
    info, _, _, chosen = min(pool, key=lambda c: (c[1], c[2]))
    partition = _masks_to_partition(n, chosen)
    flag = EXHAUSTIVE_OPTIMAL if info <= info_min else EPSILON_OPTIMAL
    return OptimizationResult(partition, _report(joint, partition), flag, info_min)


def _max_delta(table: _SubsetTable, limit: int) -> float:
    """Largest entropy reduction reachable with at most ``limit`` groups."""
    n = table.n
    if limit >= n:
        return _singleton_delta(table)
    best = [math.inf]
    masks: list = []

    def rec(i, hbar):
        if hbar >= best[0]:
            return
        if i == n:
            best[0] = hbar
            return
        bit = 1 << i
        for b in range(len(masks)):
            old = masks[b]
            masks[b] = old | bit
            rec(i + 1, hbar - table.get(old)[1] + table.get(masks[b])[1])
            masks[b] = old
        if len(masks) < limit:
            masks.append(bit)
            rec(i + 1, hbar + table.get(bit)[1])
            masks.pop()

    rec(0, 0.0)
    return table.H - best[0]


# --- geometric heuristic -------------------------------------------------------

def _fs_angles(kets: np.ndarray, center: np.ndarray) -> np.ndarray:
    return np.arccos(np.clip(np.abs(kets @ center.conj()), 0.0, 1.0))


def _principal_ket(table: _SubsetTable, idx) -> np.ndarray:
    w = table.joint.weights[idx]
    rho = np.einsum("k,kij->ij", w, table.joint.densities[idx])
    if w.sum() > 0:
        rho = rho / w.sum()
    return qcore.jacobi_eigh(rho)[1][:, 0]


def _lloyd(table: _SubsetTable, g: int, first: int, iters: int = 30) -> list:
    kets = table.joint.kets
    n = kets.shape[0]
    seeds = [first]
    dmin = _fs_angles(kets, kets[first])
    while len(seeds) < g:
        nxt = int(np.argmax(dmin))
        if dmin[nxt] <= 0.0:
            break
        seeds.append(nxt)
        dmin = np.minimum(dmin, _fs_angles(kets, kets[nxt]))
    centers = [kets[s] for s in seeds]
    labels = None
    for _ in range(iters):
        dist = np.stack([_fs_angles(kets, c) for c in centers])
        new = np.argmin(dist, axis=0)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        centers = [_principal_ket(table, np.flatnonzero(labels == b))
                   for b in range(len(centers)) if np.any(labels == b)]
        labels = np.unique(labels, return_inverse=True)[1]
    return _canonical_masks(labels, n)


def _canonical_masks(labels, n) -> list:
    blocks: dict = {}
    for i in range(n):
        blocks[int(labels[i])] = blocks.get(int(labels[i]), 0) | (1 << i)
    return sorted(blocks.values(), key=lambda m: (m & -m))


def _better(a, b) -> bool:
    """Strict improvement of (info, deltaHbar) pairs: less info, or same info and more reduction."""
    if a[0] < b[0] - 1e-12:
        return True
    return abs(a[0] - b[0]) <= 1e-12 and a[1] > b[1] + 1e-9


def _local_search(table: _SubsetTable, masks: list, budget: float) -> list:
    n = table.n
    masks = sorted(masks, key=lambda m: m & -m)

    def score(ms):
        info, hbar = table.evaluate(ms)
        return info, table.H - hbar, hbar <= budget

    cur = score(masks)
    improved = True
    while improved:
        improved = False
        # merges
        for a in range(len(masks)):
            for b in range(a + 1, len(masks)):
                trial = [m for k, m in enumerate(masks) if k not in (a, b)] + [masks[a] | masks[b]]
                s = score(trial)
                if s[2] and _better(s, cur):
                    masks, cur, improved = sorted(trial, key=lambda m: m & -m), s, True
                    break
            if improved:
                break
        if improved:
            continue
        # single-label relocations
        for i in range(n):
            bit = 1 << i
            src = next(k for k, m in enumerate(masks) if m & bit)
            for dst in range(len(masks)):
                if dst == src:
                    continue
                trial = list(masks)
                trial[src] &= ~bit
                trial[dst] |= bit
                trial = sorted((m for m in trial if m), key=lambda m: m & -m)
                s = score(trial)
                if s[2] and _better(s, cur):
                    masks, cur, improved = trial, s, True
                    break
            if improved:
                break
        if improved or n > REFINE_MAX_LABELS:
            continue
        # exchanges of two labels between groups
        for i in range(n):
            for k in range(i + 1, n):
                bi, bk = 1 << i, 1 << k
                gi = next(g for g, m in enumerate(masks) if m & bi)
                gk = next(g for g, m in enumerate(masks) if m & bk)
                if gi == gk:
                    continue
                trial = list(masks)
                trial[gi] = (trial[gi] & ~bi) | bk
                trial[gk] = (trial[gk] & ~bk) | bi
                trial = sorted(trial, key=lambda m: m & -m)
                s = score(trial)
                if s[2] and _better(s, cur):
                    masks, cur, improved = trial, s, True
                    break
            if improved:
                break
    return masks


def _kick(table: _SubsetTable, masks: list, budget: float) -> list:
    """Iterated local search: split off one label, re-polish, keep improvements."""
    n = table.n

    def score(ms):
        info, hbar = table.evaluate(ms)
        return info, table.H - hbar

    cur = score(masks)
    improved = True
    while improved:
        improved = False
        for i in range(n):
            bit = 1 << i
            if bit in masks:
                continue
            trial = [m & ~bit for m in masks] + [bit]
            trial = _local_search(table, trial, budget)
            s = score(trial)
            if _better(s, cur):
                masks, cur, improved = trial, s, True
                break
    return masks


def _agglomerate(table: _SubsetTable, budget: float) -> list:
    """Merge groups pairwise from the singletons, always taking the feasible
    merge with the least information (ties: most entropy reduction)."""
    masks = [1 << i for i in range(table.n)]
    while len(masks) > 1:
        best = None
        for a in range(len(masks)):
            for b in range(a + 1, len(masks)):
                trial = [m for k, m in enumerate(masks) if k not in (a, b)] + [masks[a] | masks[b]]
                info, hbar = table.evaluate(trial)
                if hbar > budget:
                    continue
                key = (info, hbar)
                if best is None or key < best[0]:
                    best = (key, trial)
        if best is None:
            break
        masks = sorted(best[1], key=lambda m: m & -m)
    return masks


def optimal_greedy(joint: ClassicalJointState, delta_h: float, target_groups: int = 2,
                   seed: int = 0, restarts: int = 3) -> OptimizationResult:
    """Heuristic minimal-information grouping for pure-state branches.

    Starting from ``target_groups`` clusters (raised one at a time up to the
    number of labels until the constraint can be met), labels are seeded by
    farthest-point selection in the Fubini-Study metric, refined by Lloyd
    iterations around the principal eigenvector of each group, and polished
    by group merges and single-label relocations that lower the information
    while keeping the entropy reduction at least ``delta_h``.  Besides the
    deterministic start at the heaviest branch, ``restarts`` additional
    first seeds are drawn from ``seed``.
    """
    if not joint.is_pure:
        raise ValidationError("greedy search needs pure-state branches")
    if target_groups < 1:
        raise ValidationError("target_groups must be at least 1")
    table = _SubsetTable(joint, solver="lapack")
    n = table.n
    budget = table.H - delta_h + FEAS_TOL
    full = (1 << n) - 1
    if table.get(full)[1] <= budget:
        part = Partition.trivial(n)
        return OptimizationResult(part, _report(joint, part), HEURISTIC, 0.0)
    singles = [1 << i for i in range(n)]
    if table.evaluate(singles)[1] > budget:
        raise InfeasibleError(delta_h, _singleton_delta(table))

    rng = np.random.default_rng(seed)
    firsts = [int(np.argmax(joint.weights))]
    firsts += [int(x) for x in rng.integers(0, n, size=restarts)]
    found = []
    first_ok = None
    for g in range(min(target_groups, n), n + 1):
        for first in dict.fromkeys(firsts):
            masks = _lloyd(table, g, first)
            if table.evaluate(masks)[1] > budget:
                continue
            masks = _local_search(table, masks, budget)
            info, hbar = table.evaluate(masks)
            found.append((info, len(masks), _masks_to_partition(n, masks).groups, masks))
        if found and first_ok is None:
            first_ok = g
        # a few more groups can still lower the information when weights are uneven
        if first_ok is not None and g >= first_ok + 2:
            break
    masks = _local_search(table, _agglomerate(table, budget), budget)
    info, _ = table.evaluate(masks)
    found.append((info, len(masks), _masks_to_partition(n, masks).groups, masks))
    _, _, _, masks = min(found, key=lambda c: (c[0], c[1], c[2]))
    if n <= REFINE_MAX_LABELS:
        masks = _kick(table, masks, budget)
    info, _ = table.evaluate(masks)
    part = _masks_to_partition(n, masks)
    return OptimizationResult(part, _report(joint, part), HEURISTIC, info)


def optimize(joint: ClassicalJointState, delta_h: float, epsilon: float = DEFAULT_EPSILON,
             seed: int = 0, target_groups: int = 2) -> OptimizationResult:
    """Exhaustive search when the label count allows it, greedy otherwise."""
    if joint.n_env <= MAX_EXHAUSTIVE:
        return optimal_exhaustive(joint, delta_h, epsilon)
    return optimal_greedy(joint, delta_h, target_groups, seed)


def empirical_tradeoff(joint: ClassicalJointState, grid, epsilon: float = DEFAULT_EPSILON,
                       seed: int = 0) -> list:
    """Minimal information for each requested reduction in ``grid``.

    Points report the achieved reduction, not the requested one.  Requests
    no grouping can meet are left out of the returned curve.
    """
    points = []
    for dh in grid:
        try:
            res = optimize(joint, float(dh), epsilon, seed)
        except InfeasibleError:
            continue
        points.append(TradeoffPoint(float(dh), res.report.deltaHbar, res.report.Ibar))
    return points
