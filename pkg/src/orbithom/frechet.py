"""Empirical Fréchet functions, mean partitions, medoids and instability.

Every mean partition is the average of sample representations that sit in
optimal position with it.  The solver alternates between aligning the
sample to the current mean and averaging the aligned representations; both
half-steps are exact minimizations so the Fréchet value never increases.
``exact_mean_set`` enumerates all alignment tuples and is the ground truth
for tiny samples.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .partitions import (
    Partition,
    PermutationMap,
    apply_permutation,
    delta,
    from_labels,
    frobenius_distance,
    optimal_alignment,
)
from .sample import (
    EnsembleSample,
    check_compatible,
    check_sample,
    delta_squared_to,
    pairwise_delta_squared,
)

logger = logging.getLogger(__name__)

DISTANCES = ("delta", "delta_squared", "indicator")
DEDUP_TOL = 1e-9
VALUE_TIE_TOL = 1e-10
DESCENT_SLACK = 1e-12


class GuardExceeded(OverflowError):
    """Raised when an exhaustive computation would exceed its size guard."""


@dataclass(frozen=True)
class MeanResult:
    mean: Partition
    value: float
    iterations: int
    converged: bool
    alignments: tuple[PermutationMap, ...]
    history: tuple[float, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "iterations": self.iterations,
            "converged": self.converged,
            "alignments": [list(P.image) for P in self.alignments],
            "history": list(self.history),
            "mean": self.mean.matrix.tolist(),
        }


@dataclass(frozen=True)
class MeanSet:
    minimizers: tuple[Partition, ...]
    value: float

    def __len__(self) -> int:
        return len(self.minimizers)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "minimizers": [M.matrix.tolist() for M in self.minimizers],
        }


def frechet_value(sample, Z: Partition) -> float:
    """Average squared intrinsic distance from ``Z`` to the sample."""
    sample = check_sample(sample)
    return float(np.mean(delta_squared_to(sample, Z)))


def _align_all(sample: EnsembleSample, M: np.ndarray):
    maps, aligned, d2 = [], [], []
    for X in sample:
        P, d = optimal_alignment(M, X)
        maps.append(P)
        aligned.append(apply_permutation(X, P))
        d2.append(d * d)
    return tuple(maps), np.stack(aligned), float(np.mean(d2))


def _solve_from(sample: EnsembleSample, M0: Partition, tol: float, max_iter: int) -> MeanResult:
    M = M0.matrix
    history = []
    prev_maps = None
    converged = False
    for iteration in range(1, max_iter + 1):
        maps, aligned, value = _align_all(sample, M)
        if history and value > history[-1] + DESCENT_SLACK * max(1.0, history[-1]):
            raise AssertionError(
                f"Fréchet value increased from {history[-1]!r} to {value!r} at iteration {iteration}"
            )
        history.append(value)
        scored, scored_maps = M, maps
        if maps == prev_maps or (len(history) > 1 and history[-2] - value < tol):
            converged = True
            break
        M = aligned.mean(axis=0)
        prev_maps = maps
    return MeanResult(Partition(scored), history[-1], iteration, converged, scored_maps, tuple(history))


def mean_partition(sample, init="medoid", tol: float = 1e-10, max_iter: int = 100) -> MeanResult:
    """Local minimizer of the Fréchet function by alternating align/average steps.

    ``init`` is a Partition, ``"medoid"`` (medoid under squared distance), or
    ``"all"`` to restart from every sample member and keep the best result
    (earliest start on ties).
    """
    sample = check_sample(sample)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    if isinstance(init, Partition):
        check_compatible(sample, init)
        starts = [init]
    elif init == "medoid":
        starts = [sample[medoid(sample, "delta_squared")[0]]]
    elif init == "all":
        starts = list(sample)
    else:
        raise ValueError(f"unknown init {init!r}")
    best = None
    for M0 in starts:
        result = _solve_from(sample, M0, tol, max_iter)
        if best is None or result.value < best.value:
            best = result
    if not best.converged:
        logger.warning("mean_partition: max_iter=%d exhausted, value %.6g", max_iter, best.value)
    return best


def _orbit_stacks(sample: EnsembleSample) -> list[np.ndarray]:
    perms = list(itertools.permutations(range(sample.n_clusters)))
    return [X.matrix[np.array(perms)] for X in sample]


def _dedup(candidates, tol: float) -> list[Partition]:
    kept: list[Partition] = []
    for C in candidates:
        if all(delta(C, K) > tol for K in kept):
            kept.append(C)
    return kept


def exact_mean_set(sample, max_tuples: int = 10**6) -> MeanSet:
    """All mean partitions of a tiny sample, found by enumerating alignments.

    For a fixed choice of representations the Fréchet objective is a convex
    quadratic minimized by their average, so the global minimum is the best
    such average over all ``l!^n`` tuples.  The first member is pinned to its
    identity representation since relabelling the whole tuple yields the
    same orbit.
    """
    sample = check_sample(sample)
    n = len(sample)
    l = sample.n_clusters
    n_tuples = math.factorial(l) ** n
    if n_tuples > max_tuples:
        raise GuardExceeded(f"{l}!^{n} = {n_tuples} alignment tuples exceeds guard {max_tuples}")
    orbits = _orbit_stacks(sample)
    sums = sample[0].matrix[None]
    for R in orbits[1:]:
        sums = (sums[:, None] + R[None]).reshape(-1, *sample.shape)
    sq_norm_total = float(sum(np.sum(X.matrix ** 2) for X in sample))
    values = (sq_norm_total - np.sum(sums ** 2, axis=(1, 2)) / n) / n
    value = float(values.min())
    tied = np.flatnonzero(values <= value + VALUE_TIE_TOL)
    candidates = (Partition(sums[t] / n) for t in tied)
    minimizers = _dedup(candidates, DEDUP_TOL)
    return MeanSet(tuple(minimizers), max(value, 0.0))


def exact_hard_mean(sample, max_candidates: int = 10**6) -> MeanSet:
    """Minimizers of the Fréchet function restricted to hard partitions.

    Enumerates all ``l^m`` label vectors; for comparison with the soft mean only.
    """
    sample = check_sample(sample)
    l, m = sample.shape
    if l ** m > max_candidates:
        raise GuardExceeded(f"{l}^{m} label vectors exceeds guard {max_candidates}")
    seen = set()
    scored = []
    for labels in itertools.product(range(l), repeat=m):
        # canonical relabelling by first appearance removes row-permutation copies
        relabel = {}
        canon = tuple(relabel.setdefault(c, len(relabel)) for c in labels)
        if canon in seen:
            continue
        seen.add(canon)
        Z = from_labels(canon, l)
        scored.append((frechet_value(sample, Z), Z))
    value = min(v for v, _ in scored)
    minimizers = [Z for v, Z in scored if v <= value + VALUE_TIE_TOL]
    return MeanSet(tuple(minimizers), value)


def _distance_matrix(sample: EnsembleSample, distance: str) -> np.ndarray:
    if distance not in DISTANCES:
        raise ValueError(f"distance must be one of {DISTANCES}, got {distance!r}")
    if distance == "indicator":
        from .homogeneity import ball_matrix

        ball, _ = ball_matrix(sample)
        return ball
    D2 = pairwise_delta_squared(sample)
    return np.sqrt(D2) if distance == "delta" else D2


def frechet_from_matrix(D: np.ndarray, indicator: bool = False) -> np.ndarray:
    """Per-member Fréchet values ``F(X_i) = mean_j D[i, j]``.

    With ``indicator=True``, ``D`` is the ball-membership matrix and
    ``F(X_i) = 1 - h_i``.
    """
    D = np.asarray(D)
    if indicator:
        return 1.0 - D.sum(axis=1) / D.shape[1]
    return D.mean(axis=1)


def medoid_from_matrix(D: np.ndarray, indicator: bool = False) -> tuple[int, float]:
    F = frechet_from_matrix(D, indicator)
    i = int(np.argmin(F))
    return i, float(F[i])


def instability_from_matrix(D: np.ndarray, indicator: bool = False) -> float:
    return float(np.mean(frechet_from_matrix(D, indicator)))


def medoid(sample, distance: str = "delta_squared") -> tuple[int, float]:
    """Index (0-based, first on ties) and Fréchet value of the best sample member."""
    sample = check_sample(sample)
    D = _distance_matrix(sample, distance)
    return medoid_from_matrix(D, indicator=distance == "indicator")


def instability(sample, distance: str = "delta") -> float:
    """Average pairwise distance ``(1/n^2) sum_ij D(X_i, X_j)``, diagonal included."""
    sample = check_sample(sample)
    D = _distance_matrix(sample, distance)
    return instability_from_matrix(D, indicator=distance == "indicator")


def mean_gap_bound(sample, M: Partition, M_other: Partition, tol: float = DEDUP_TOL) -> float:
    """Bound ``(1/n) sum_J ||X_j - X_j'||`` on the distance between two means.

    ``X_j`` and ``X_j'`` are representations of member ``j`` in optimal
    position with ``M`` and with the representation of ``M_other`` closest to
    ``M``; ``J`` holds the members where they differ.  Raises when the bound
    does not hold, which signals that an argument is not a mean.
    """
    sample = check_sample(sample)
    check_compatible(sample, M)
    check_compatible(sample, M_other)
    P, gap = optimal_alignment(M, M_other)
    M2 = apply_permutation(M_other, P)
    total = 0.0
    differing = 0
    for X in sample:
        A = apply_permutation(X, optimal_alignment(M.matrix, X)[0])
        B = apply_permutation(X, optimal_alignment(M2, X)[0])
        if not np.array_equal(A, B):
            differing += 1
            total += frobenius_distance(A, B)
    bound = total / len(sample)
    if differing == 0 and gap > tol:
        raise RuntimeError("means differ but every member has the same optimal position")
    if gap > bound + tol:
        raise RuntimeError(f"delta(M, M')={gap!r} exceeds bound {bound!r}")
    return bound
