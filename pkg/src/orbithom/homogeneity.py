"""Alpha-homogeneity, exact homogeneity for tiny samples, and model selection."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .asymmetry import alpha_squared
from .frechet import exact_mean_set, instability_from_matrix, medoid_from_matrix
from .partitions import DimensionError
from .sample import EnsembleSample, check_sample, pairwise_delta_squared


@dataclass(frozen=True)
class HomogeneityReport:
    n: int
    alphas: np.ndarray
    h: np.ndarray
    h_star: float
    best_center: int
    outliers: tuple[int, ...]
    ball: np.ndarray = field(repr=False)

    @property
    def inliers(self) -> tuple[int, ...]:
        return tuple(int(j) for j in np.flatnonzero(self.ball[self.best_center]))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "alphas": [float(a) if np.isfinite(a) else None for a in self.alphas],
            "h": [float(v) for v in self.h],
            "h_star": float(self.h_star),
            "best_center": self.best_center,
            "outliers": list(self.outliers),
        }


def ball_matrix(sample: EnsembleSample, D2: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """``B[i, j]`` is true when member ``j`` lies in the asymmetry ball of member ``i``.

    Returns the ball matrix and the squared alphas.
    """
    if D2 is None:
        D2 = pairwise_delta_squared(sample)
    a2 = np.array([alpha_squared(X) for X in sample])
    ball = 16.0 * D2 <= a2[:, None]
    return ball, a2


def alpha_homogeneity(sample, D2: np.ndarray | None = None) -> HomogeneityReport:
    """Largest fraction of the sample inside one member's asymmetry ball.

    ``h[i]`` is the fraction inside the ball of member ``i``; ``h_star`` its
    maximum, attained first at ``best_center``.  Members outside that ball
    are reported as outliers.
    """
    sample = check_sample(sample)
    n = len(sample)
    ball, a2 = ball_matrix(sample, D2)
    counts = ball.sum(axis=1)
    best = int(np.argmax(counts))
    outliers = tuple(int(j) for j in np.flatnonzero(~ball[best]))
    return HomogeneityReport(
        n=n,
        alphas=np.sqrt(a2),
        h=counts / n,
        h_star=float(counts[best] / n),
        best_center=best,
        outliers=outliers,
        ball=ball,
    )


def exact_homogeneity(sample, max_n: int = 6, max_tuples: int = 10**6) -> float:
    """Largest fraction of members whose sub-sample has a unique mean.

    Subsets are tried by decreasing size, so the first homogeneous one
    found determines the answer.  Exponential; tiny samples only.
    """
    sample = check_sample(sample)
    n = len(sample)
    if n > max_n:
        raise OverflowError(f"exact homogeneity limited to n <= {max_n}, got {n}")
    for size in range(n, 1, -1):
        for subset in itertools.combinations(range(n), size):
            if len(exact_mean_set(sample.subsample(subset), max_tuples=max_tuples)) == 1:
                return size / n
    return 1 / n


@dataclass(frozen=True)
class StabilityProfile:
    ks: tuple[int, ...]
    h_star_k: tuple[float, ...]
    instability_k: tuple[float, ...]
    frechet_medoid_k: tuple[float, ...]
    selected: int

    def to_dict(self) -> dict:
        return {
            "ks": list(self.ks),
            "h_star_k": list(self.h_star_k),
            "instability_k": list(self.instability_k),
            "frechet_medoid_k": list(self.frechet_medoid_k),
            "selected": self.selected,
        }

    def rows(self) -> list[dict]:
        return [
            {"k": k, "h_star": h, "instability": i, "frechet_medoid": f}
            for k, h, i, f in zip(self.ks, self.h_star_k, self.instability_k, self.frechet_medoid_k)
        ]


def select_clusters(samples_by_k) -> StabilityProfile:
    """Score every candidate cluster count and pick ``argmax_k h*_k`` (smallest k on ties).

    Instability is reported under the intrinsic metric; the medoid score
    uses the indicator distance and so equals ``1 - h*_k``.
    """
    if not samples_by_k:
        raise ValueError("need at least one cluster count")
    ks = sorted(samples_by_k)
    n_points = None
    h_star, instab, fmed = [], [], []
    for k in ks:
        sample = check_sample(samples_by_k[k])
        if n_points is None:
            n_points = sample.n_points
        elif sample.n_points != n_points:
            raise DimensionError(f"k={k}: {sample.n_points} points, expected {n_points}")
        D2 = pairwise_delta_squared(sample)
        report = alpha_homogeneity(sample, D2)
        h_star.append(report.h_star)
        instab.append(instability_from_matrix(np.sqrt(D2)))
        fmed.append(medoid_from_matrix(report.ball, indicator=True)[1])
    best = max(range(len(ks)), key=lambda i: (h_star[i], -i))
    return StabilityProfile(tuple(ks), tuple(h_star), tuple(instab), tuple(fmed), ks[best])
