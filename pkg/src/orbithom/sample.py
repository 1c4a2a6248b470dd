"""Ensembles of partitions over a common point set and input validation."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .partitions import DimensionError, Partition, PartitionError, from_labels


class EnsembleSample(Sequence):
    """Ordered, immutable tuple of ``n >= 1`` partitions sharing ``(l, m)``."""

    def __init__(self, partitions):
        partitions = tuple(partitions)
        if not partitions:
            raise PartitionError("a sample needs at least one partition")
        for i, X in enumerate(partitions):
            if not isinstance(X, Partition):
                raise TypeError(f"member {i} is {type(X).__name__}, expected Partition")
        shape = partitions[0].shape
        for i, X in enumerate(partitions):
            if X.shape != shape:
                raise DimensionError(f"member {i} has shape {X.shape}, expected {shape}")
        self._partitions = partitions
        self._stack = None

    @classmethod
    def from_labels(cls, label_rows, n_clusters: int) -> "EnsembleSample":
        return cls(from_labels(row, n_clusters) for row in np.asarray(label_rows))

    def __getitem__(self, index):
        if isinstance(index, slice):
            return EnsembleSample(self._partitions[index])
        return self._partitions[index]

    def __len__(self) -> int:
        return len(self._partitions)

    def subsample(self, indices) -> "EnsembleSample":
        return EnsembleSample(self._partitions[i] for i in indices)

    @property
    def n_clusters(self) -> int:
        return self._partitions[0].n_clusters

    @property
    def n_points(self) -> int:
        return self._partitions[0].n_points

    @property
    def shape(self) -> tuple[int, int]:
        return self._partitions[0].shape

    @property
    def is_hard(self) -> bool:
        return all(X.is_hard for X in self._partitions)

    def stack(self) -> np.ndarray:
        """Representations as an array of shape ``(n, l, m)``."""
        if self._stack is None:
            stack = np.stack([X.matrix for X in self._partitions])
            stack.setflags(write=False)
            self._stack = stack
        return self._stack

    def labels(self) -> np.ndarray:
        """0-based labels of shape ``(n, m)``; hard samples only."""
        return np.stack([X.labels for X in self._partitions])

    def __repr__(self):
        l, m = self.shape
        return f"EnsembleSample(n={len(self)}, n_clusters={l}, n_points={m})"


def check_partition(X, n_clusters: int | None = None) -> Partition:
    """Coerce a Partition, matrix, or 1-D label vector into a Partition."""
    if isinstance(X, Partition):
        return X
    arr = np.asarray(X)
    if arr.ndim == 1:
        k = int(arr.max()) + 1 if n_clusters is None else n_clusters
        return from_labels(arr, k)
    return Partition(arr)


def check_sample(sample, n_clusters: int | None = None) -> EnsembleSample:
    """Coerce the accepted sample encodings into an EnsembleSample.

    Accepts an EnsembleSample, a sequence of Partitions or matrices, an
    ``(n, l, m)`` array, or an ``(n, m)`` integer array of 0-based labels
    (``n_clusters`` defaults to the largest label plus one).
    """
    if isinstance(sample, EnsembleSample):
        return sample
    if isinstance(sample, (list, tuple)) and sample and all(isinstance(X, Partition) for X in sample):
        return EnsembleSample(sample)
    arr = np.asarray(sample)
    if arr.ndim == 3:
        return EnsembleSample(Partition(X) for X in arr)
    if arr.ndim == 2 and np.issubdtype(arr.dtype, np.integer):
        k = int(arr.max()) + 1 if n_clusters is None else n_clusters
        return EnsembleSample.from_labels(arr, k)
    raise PartitionError(f"cannot interpret object of shape {arr.shape} as a sample")


def check_compatible(sample: EnsembleSample, Z: Partition) -> None:
    if Z.shape != sample.shape:
        raise DimensionError(f"partition shape {Z.shape} does not match sample shape {sample.shape}")


def _hard_pairwise_sq(sample: EnsembleSample) -> np.ndarray:
    # delta^2 = 2 (m - maximum matched overlap), exact in integers
    n = len(sample)
    l, m = sample.shape
    onehot = sample.stack().reshape(n * l, m)
    overlap = np.rint(onehot @ onehot.T).reshape(n, l, n, l)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            N = overlap[i, :, j, :]
            r, c = linear_sum_assignment(N, maximize=True)
            D[i, j] = D[j, i] = 2.0 * (m - N[r, c].sum())
    return D


def _soft_sq(A: np.ndarray, B: np.ndarray) -> float:
    C = np.sum((A[:, None, :] - B[None, :, :]) ** 2, axis=2)
    r, c = linear_sum_assignment(C)
    return max(float(C[r, c].sum()), 0.0)


def pairwise_delta_squared(sample: EnsembleSample) -> np.ndarray:
    """Symmetric ``(n, n)`` matrix of squared intrinsic distances."""
    n = len(sample)
    if sample.is_hard:
        return _hard_pairwise_sq(sample)
    S = sample.stack()
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            D[i, j] = D[j, i] = _soft_sq(S[i], S[j])
    return D


def delta_squared_to(sample: EnsembleSample, Z: Partition) -> np.ndarray:
    """Squared distances from every sample member to ``Z``."""
    check_compatible(sample, Z)
    return np.array([_soft_sq(X.matrix, Z.matrix) for X in sample])
