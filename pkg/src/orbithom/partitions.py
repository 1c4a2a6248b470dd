"""Partitions as points of an orbit space and the intrinsic metric between them.

A partition of ``m`` points into at most ``l`` clusters is stored as an
``(l, m)`` membership matrix whose columns sum to one.  Two matrices that
differ by a row permutation describe the same partition, so distances are
taken between orbits: ``delta(X, Y) = min_P ||X - P Y||``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import linear_sum_assignment

COLUMN_SUM_TOL = 1e-12
RENORMALIZE_TOL = 1e-9
TIE_TOL = 1e-12


class PartitionError(ValueError):
    """Raised for malformed partition data."""


class DimensionError(PartitionError):
    """Raised when two partitions do not share ``(l, m)``."""


@dataclass(frozen=True)
class PermutationMap:
    """Bijection on cluster indices ``0..l-1``.

    Acting on a representation, row ``p`` of the output is row ``image[p]``
    of the input.
    """

    image: tuple[int, ...]

    def __post_init__(self):
        image = tuple(int(i) for i in self.image)
        if sorted(image) != list(range(len(image))):
            raise ValueError(f"not a permutation: {image}")
        object.__setattr__(self, "image", image)

    @classmethod
    def identity(cls, size: int) -> "PermutationMap":
        return cls(tuple(range(size)))

    @classmethod
    def swap(cls, size: int, p: int, q: int) -> "PermutationMap":
        image = list(range(size))
        image[p], image[q] = image[q], image[p]
        return cls(tuple(image))

    def __len__(self) -> int:
        return len(self.image)

    @property
    def is_identity(self) -> bool:
        return self.image == tuple(range(len(self.image)))

    def compose(self, other: "PermutationMap") -> "PermutationMap":
        """Map equal to applying ``other`` first and then ``self``."""
        if len(other) != len(self):
            raise ValueError("permutation sizes differ")
        return PermutationMap(tuple(other.image[i] for i in self.image))

    def inverse(self) -> "PermutationMap":
        inv = [0] * len(self.image)
        for p, q in enumerate(self.image):
            inv[q] = p
        return PermutationMap(tuple(inv))

    def matrix(self) -> np.ndarray:
        P = np.zeros((len(self), len(self)))
        P[np.arange(len(self)), self.image] = 1.0
        return P


class Partition:
    """Immutable ``(l, m)`` column-stochastic membership matrix.

    Parameters
    ----------
    matrix : array-like of shape (n_clusters, n_points)
        Membership degrees in ``[0, 1]``. Columns must sum to one; column
        sums off by less than ``1e-9`` are renormalized, larger deviations
        are rejected.
    """

    __slots__ = ("_matrix", "_is_hard", "_labels")

    def __init__(self, matrix):
        X = np.array(matrix, dtype=float, copy=True)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise PartitionError(f"expected a non-empty 2-D matrix, got shape {X.shape}")
        n_clusters, n_points = X.shape
        if n_clusters > n_points:
            raise PartitionError(
                f"n_clusters={n_clusters} exceeds n_points={n_points}"
            )
        if not np.all(np.isfinite(X)):
            raise PartitionError("membership values must be finite")
        if X.min() < -COLUMN_SUM_TOL or X.max() > 1 + COLUMN_SUM_TOL:
            raise PartitionError("membership values must lie in [0, 1]")
        np.clip(X, 0.0, 1.0, out=X)
        dev = np.abs(X.sum(axis=0) - 1.0)
        worst = float(dev.max())
        if worst >= RENORMALIZE_TOL:
            j = int(dev.argmax())
            raise PartitionError(
                f"column {j} sums to {X[:, j].sum()!r}, expected 1"
            )
        if worst > COLUMN_SUM_TOL:
            X /= X.sum(axis=0, keepdims=True)
        X.setflags(write=False)
        self._matrix = X
        self._is_hard = bool(np.all((X == 0.0) | (X == 1.0)))
        self._labels = None
        if self._is_hard:
            labels = X.argmax(axis=0)
            labels.setflags(write=False)
            self._labels = labels

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def n_clusters(self) -> int:
        return self._matrix.shape[0]

    @property
    def n_points(self) -> int:
        return self._matrix.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._matrix.shape

    @property
    def is_hard(self) -> bool:
        return self._is_hard

    @property
    def labels(self) -> np.ndarray:
        """0-based cluster label of every point (hard partitions only)."""
        if not self._is_hard:
            raise PartitionError("labels are only defined for hard partitions")
        return self._labels

    def cluster_sizes(self) -> np.ndarray:
        return self._matrix.sum(axis=1)

    def __array__(self, dtype=None, copy=None):
        return self._matrix if dtype is None else self._matrix.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._matrix, other._matrix))

    def __hash__(self):
        return hash((self.shape, self._matrix.tobytes()))

    def __repr__(self):
        kind = "hard" if self._is_hard else "soft"
        return f"Partition({kind}, n_clusters={self.n_clusters}, n_points={self.n_points})"


def from_labels(labels, n_clusters: int) -> Partition:
    """One-hot encode 0-based ``labels`` into a hard partition with ``n_clusters`` rows.

    >>> from_labels([0, 0, 1], 2).matrix
    array([[1., 1., 0.],
           [0., 0., 1.]])
    """
    labels = np.asarray(labels)
    if labels.ndim != 1 or labels.size == 0:
        raise PartitionError("labels must be a non-empty 1-D sequence")
    if not np.issubdtype(labels.dtype, np.integer):
        as_int = labels.astype(np.int64)
        if not np.array_equal(as_int, labels):
            raise PartitionError("labels must be integers")
        labels = as_int
    n_clusters = int(n_clusters)
    if n_clusters < 1:
        raise PartitionError("n_clusters must be positive")
    if n_clusters > labels.size:
        raise PartitionError(f"n_clusters={n_clusters} exceeds n_points={labels.size}")
    bad = (labels < 0) | (labels >= n_clusters)
    if bad.any():
        j = int(np.flatnonzero(bad)[0])
        raise PartitionError(
            f"label {labels[j]} at position {j} outside 0..{n_clusters - 1}"
        )
    X = np.zeros((n_clusters, labels.size))
    X[labels, np.arange(labels.size)] = 1.0
    return Partition(X)


def _as_matrix(X) -> np.ndarray:
    return X.matrix if isinstance(X, Partition) else np.asarray(X, dtype=float)


def _check_same_shape(X: np.ndarray, Y: np.ndarray):
    if X.shape != Y.shape:
        raise DimensionError(f"shape mismatch: {X.shape} vs {Y.shape}")


def apply_permutation(X, P: PermutationMap) -> np.ndarray:
    """Permute the rows of a representation: ``out[p] = X[P.image[p]]``."""
    M = _as_matrix(X)
    if len(P) != M.shape[0]:
        raise DimensionError(f"permutation of size {len(P)} for {M.shape[0]} rows")
    return M[list(P.image)]


def frobenius_distance(X, Y) -> float:
    """Euclidean norm of ``X - Y`` for two representations of equal shape."""
    A, B = _as_matrix(X), _as_matrix(Y)
    _check_same_shape(A, B)
    return float(np.sqrt(np.sum((A - B) ** 2)))


def row_cost_matrix(X, Y) -> np.ndarray:
    """``C[p, q] = ||row_p(X) - row_q(Y)||^2``."""
    A, B = _as_matrix(X), _as_matrix(Y)
    _check_same_shape(A, B)
    return np.sum((A[:, None, :] - B[None, :, :]) ** 2, axis=2)


def _assignment_value(C: np.ndarray) -> float:
    if C.size == 0:
        return 0.0
    rows, cols = linear_sum_assignment(C)
    return float(C[rows, cols].sum())


def lexicographic_assignment(C: np.ndarray, tol: float = TIE_TOL) -> tuple[int, ...]:
    """Minimum-cost assignment with the lexicographically smallest image among ties.

    Fixes rows in order, committing each to the smallest column that still
    admits an optimal completion.
    """
    C = np.asarray(C, dtype=float)
    size = C.shape[0]
    best = _assignment_value(C)
    slack = tol * max(1.0, abs(best))
    image = []
    free = list(range(size))
    spent = 0.0
    for p in range(size):
        for q in free:
            rest = [c for c in free if c != q]
            value = spent + C[p, q] + _assignment_value(C[p + 1:][:, rest])
            if value <= best + slack:
                image.append(q)
                free = rest
                spent += C[p, q]
                break
        else:  # pragma: no cover - guarded by slack
            raise RuntimeError("tie-breaking failed to complete an optimal assignment")
    return tuple(image)


def optimal_alignment(X, Y) -> tuple[PermutationMap, float]:
    """Permutation ``P`` minimizing ``||X - P Y||`` and the minimum, ``delta(X, Y)``."""
    C = row_cost_matrix(X, Y)
    image = lexicographic_assignment(C)
    d2 = float(C[np.arange(len(image)), image].sum())
    return PermutationMap(image), float(np.sqrt(max(d2, 0.0)))


def delta_squared(X, Y) -> float:
    C = row_cost_matrix(X, Y)
    return max(_assignment_value(C), 0.0)


def delta(X, Y) -> float:
    """Intrinsic distance between the orbits of ``X`` and ``Y``."""
    return float(np.sqrt(delta_squared(X, Y)))


# --- serialization -------------------------------------------------------

def _fmt(value: float) -> str:
    if value == 0.0:
        return "0"
    if value == 1.0:
        return "1"
    return repr(float(value))


def to_csv(partition: Partition) -> str:
    """Dense CSV, one cluster per row."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in partition.matrix:
        writer.writerow(_fmt(v) for v in row)
    return buf.getvalue()


def to_label_csv(partition: Partition) -> str:
    """Compact form for hard partitions: a comment carrying ``n_clusters`` and
    one row of 1-based labels."""
    labels = partition.labels + 1
    return f"# n_clusters={partition.n_clusters}\n" + ",".join(str(int(v)) for v in labels) + "\n"


def parse_partition(text: str, n_clusters: int | None = None, source: str = "<string>") -> Partition:
    """Read either serialized form.

    A single data row of positive integers is read as a 1-based label vector;
    anything else as a dense matrix.  ``n_clusters`` (or a leading
    ``# n_clusters=K`` comment) fixes the row count of a label vector.
    """
    declared = None
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            key, _, value = stripped.lstrip("#").partition("=")
            if key.strip() == "n_clusters":
                try:
                    declared = int(value)
                except ValueError:
                    raise PartitionError(f"{source}:{lineno}: bad n_clusters comment") from None
            continue
        try:
            rows.append([float(cell) for cell in next(csv.reader([stripped]))])
        except ValueError as exc:
            raise PartitionError(f"{source}:{lineno}: {exc}") from None
    if not rows:
        raise PartitionError(f"{source}: no data rows")
    if len({len(r) for r in rows}) != 1:
        raise PartitionError(f"{source}: rows have different lengths")
    if n_clusters is None:
        n_clusters = declared
    first = np.array(rows[0])
    if len(rows) == 1 and np.all(first >= 1) and np.all(first == np.round(first)):
        labels = first.astype(np.int64) - 1
        k = int(labels.max()) + 1 if n_clusters is None else int(n_clusters)
        try:
            return from_labels(labels, k)
        except PartitionError as exc:
            raise PartitionError(f"{source}: {exc}") from None
    try:
        return Partition(np.array(rows))
    except PartitionError as exc:
        raise PartitionError(f"{source}: {exc}") from None


def read_partition(path, n_clusters: int | None = None) -> Partition:
    path = Path(path)
    return parse_partition(path.read_text(), n_clusters=n_clusters, source=str(path))


def write_partition(partition: Partition, path, labels: bool | None = None) -> None:
    """Write ``partition``; hard partitions default to the label-vector form."""
    if labels is None:
        labels = partition.is_hard
    Path(path).write_text(to_label_csv(partition) if labels else to_csv(partition))
