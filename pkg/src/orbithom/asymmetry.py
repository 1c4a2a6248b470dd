"""Degree of asymmetry of a partition and asymmetry-ball membership.

The degree of asymmetry is the smallest distance between a representation
and any non-trivial row permutation of itself.  Within a quarter of it, the
orbit space looks Euclidean around the partition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .partitions import Partition, PartitionError, delta_squared

IDENTICAL_ROW_TOL = 1e-12


@dataclass(frozen=True)
class AsymmetryProfile:
    alpha: float
    is_asymmetric: bool
    smallest_pair: tuple[int, int] | None
    ball_radius: float

    @property
    def alpha_squared(self) -> float:
        return self.alpha ** 2

    def to_dict(self) -> dict:
        finite = math.isfinite(self.alpha)
        p, q = self.smallest_pair if self.smallest_pair else (None, None)
        return {
            "alpha": self.alpha if finite else None,
            "is_asymmetric": self.is_asymmetric,
            "pair_p": p,
            "pair_q": q,
            "ball_radius": self.ball_radius if finite else None,
        }


def _alpha_squared_general(Z: np.ndarray) -> tuple[float, tuple[int, int] | None]:
    l = Z.shape[0]
    if l < 2:
        # no non-trivial permutation exists
        return math.inf, None
    best, pair = math.inf, None
    for p in range(l - 1):
        d2 = np.sum((Z[p + 1:] - Z[p]) ** 2, axis=1)
        q = int(np.argmin(d2))
        if d2[q] < best:
            best, pair = float(d2[q]), (p, p + 1 + q)
    if best <= IDENTICAL_ROW_TOL ** 2:
        best = 0.0
    return 2.0 * best, pair


def alpha_general(Z: Partition) -> AsymmetryProfile:
    """Degree of asymmetry from the closest pair of rows, ``sqrt(2) * min ||z_p - z_q||``.

    Single-cluster partitions have no non-identity permutation; their alpha
    is ``inf``.
    """
    a2, pair = _alpha_squared_general(Z.matrix)
    alpha = math.sqrt(a2)
    return AsymmetryProfile(alpha, alpha > 0, pair, alpha / 4)


def alpha_hard(Z: Partition) -> float:
    """Degree of asymmetry of a hard partition, ``sqrt(2 (m1 + m2))`` for the two
    smallest cluster sizes (empty clusters count as 0)."""
    if not Z.is_hard:
        raise PartitionError("alpha_hard requires a hard partition")
    if Z.n_clusters < 2:
        return math.inf
    sizes = np.sort(np.bincount(Z.labels, minlength=Z.n_clusters))
    return math.sqrt(2.0 * float(sizes[0] + sizes[1]))


def alpha_bounds(n_points: int, n_clusters: int) -> tuple[float, float]:
    """Range of alpha over asymmetric hard partitions: ``(sqrt 2, 2 sqrt(ceil(m / l)))``."""
    if not 1 <= n_clusters <= n_points:
        raise ValueError(f"need 1 <= n_clusters <= n_points, got {n_clusters}, {n_points}")
    return math.sqrt(2.0), 2.0 * math.sqrt(-(-n_points // n_clusters))


def alpha_squared(Z: Partition) -> float:
    if Z.is_hard:
        a = alpha_hard(Z)
        return a if math.isinf(a) else 2.0 * float(np.sum(np.sort(Z.cluster_sizes())[:2]))
    return _alpha_squared_general(Z.matrix)[0]


def in_ball_squared(d2: float, a2: float, strict: bool = False) -> bool:
    # 16 d^2 vs alpha^2 keeps the hard-partition comparison in exact integers
    return 16.0 * d2 < a2 if strict else 16.0 * d2 <= a2


def in_asymmetry_ball(center: Partition, probe: Partition, strict: bool = False) -> bool:
    """Whether ``delta(center, probe) <= alpha(center) / 4``.

    ``strict=True`` tests the open ball instead.
    """
    return in_ball_squared(delta_squared(center, probe), alpha_squared(center), strict)
