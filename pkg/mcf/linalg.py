"""
linalg — sparse example vectors, dense hypotheses, and the incremental norm identity.

Examples a_i are sparse; hypotheses w_i are dense (dimension is known after the
data load). Every update touches only the stored entries of a_i, and the cached
squared norm of w_i is advanced with

    ||w + lam*y*a||^2 = ||w||^2 + lam^2 ||a||^2 + 2 lam y (w . a)

so neither prediction nor update costs more than O(nnz(a)).
"""

import math
from dataclasses import dataclass
from typing import Iterable, List, Tuple

import numpy as np

from mcf.errors import DimensionMismatchError


# ── Vector types ─────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class SparseVector:
    """Index/value feature vector; indices strictly increasing, no stored zeros."""
    indices: np.ndarray
    values: np.ndarray
    dim: int

    def __post_init__(self):
        indices = np.asarray(self.indices, dtype=np.int64)
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "values", values)
        dim = int(self.dim)
        object.__setattr__(self, "dim", dim)

        if dim <= 0:
            raise ValueError(f"dim must be > 0, got {dim}")
        if indices.ndim != 1 or values.ndim != 1 or indices.shape != values.shape:
            raise ValueError(
                f"indices and values must be 1-D of equal length, got {indices.shape} and {values.shape}"
            )
        if indices.size:
            if indices[0] < 0 or indices[-1] >= dim:
                raise ValueError(f"indices must lie in [0, {dim}), got [{indices[0]}, {indices[-1]}]")
            steps = np.diff(indices)
            if np.any(steps <= 0):
                bad = int(np.flatnonzero(steps <= 0)[0]) + 1
                raise ValueError(f"indices must be strictly increasing (position {bad}: {indices[bad]})")
            if np.any(values == 0.0):
                bad = int(np.flatnonzero(values == 0.0)[0])
                raise ValueError(f"stored value at index {indices[bad]} is exactly zero")

    @classmethod
    def from_entries(cls, entries: Iterable[Tuple[int, float]], dim: int) -> "SparseVector":
        entries = list(entries)
        if not entries:
            return cls(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64), dim)
        idx, vals = zip(*entries)
        return cls(np.array(idx, dtype=np.int64), np.array(vals, dtype=np.float64), dim)

    @classmethod
    def unchecked(cls, indices: np.ndarray, values: np.ndarray, dim: int) -> "SparseVector":
        """Wrap arrays already known to be canonical (rows of a sorted, zero-free CSR matrix)."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "indices", indices)
        object.__setattr__(obj, "values", values)
        object.__setattr__(obj, "dim", dim)
        return obj

    @classmethod
    def from_dense(cls, values) -> "SparseVector":
        values = np.asarray(values, dtype=np.float64).ravel()
        nz = np.flatnonzero(values)
        return cls(nz, values[nz], values.size)

    def entries(self) -> List[Tuple[int, float]]:
        return [(int(i), float(v)) for i, v in zip(self.indices, self.values)]

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim, dtype=np.float64)
        out[self.indices] = self.values
        return out

    def scaled(self, alpha: float) -> "SparseVector":
        if alpha == 0.0:
            return SparseVector(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64), self.dim)
        return SparseVector(self.indices.copy(), self.values * alpha, self.dim)

    def __eq__(self, other):
        if not isinstance(other, SparseVector):
            return NotImplemented
        return (
            self.dim == other.dim
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    def __repr__(self):
        return f"SparseVector(dim={self.dim}, entries={self.entries()})"


@dataclass(eq=False)
class DenseVector:
    """Dense real vector; houses hypotheses w_i and the target w."""
    values: np.ndarray

    def __post_init__(self):
        self.values = np.array(self.values, dtype=np.float64)
        if self.values.ndim != 1 or self.values.size == 0:
            raise ValueError(f"DenseVector needs a non-empty 1-D array, got shape {self.values.shape}")

    @classmethod
    def zeros(cls, dim: int) -> "DenseVector":
        if dim <= 0:
            raise ValueError(f"dim must be > 0, got {dim}")
        return cls(np.zeros(dim, dtype=np.float64))

    @property
    def dim(self) -> int:
        return int(self.values.size)

    def norm_sq(self) -> float:
        return float(np.dot(self.values, self.values))

    def copy(self) -> "DenseVector":
        return DenseVector(self.values.copy())

    def __repr__(self):
        return f"DenseVector({self.values.tolist()})"


# ── Operations ───────────────────────────────────────────────

def _check_dims(w: DenseVector, a: SparseVector):
    if w.dim != a.dim:
        raise DimensionMismatchError(f"dimension mismatch: w has {w.dim}, a has {a.dim}")


def dot(w: DenseVector, a: SparseVector) -> float:
    """w . a over the stored entries of a."""
    _check_dims(w, a)
    if not a.indices.size:
        return 0.0
    return float(np.dot(w.values[a.indices], a.values))


def norm_sq(a) -> float:
    """Squared Euclidean norm of a SparseVector or DenseVector."""
    return float(np.dot(a.values, a.values))


def axpy_update(w: DenseVector, norm_sq_w: float, lam: float, y: int, a: SparseVector) -> Tuple[DenseVector, float]:
    """w <- w + lam*y*a, in place. Returns (w, updated squared norm)."""
    _check_dims(w, a)
    if lam == 0.0 or not a.indices.size:
        return w, norm_sq_w
    wa = float(np.dot(w.values[a.indices], a.values))
    step = lam * y
    w.values[a.indices] += step * a.values
    new_norm_sq = norm_sq_w + lam * lam * norm_sq(a) + 2.0 * step * wa
    return w, max(new_norm_sq, 0.0)


def scale_axpy_update(w: DenseVector, norm_sq_w: float, c: float, d: float, a: SparseVector) -> Tuple[DenseVector, float]:
    """w <- c*w + d*a, in place. Returns (w, updated squared norm)."""
    _check_dims(w, a)
    wa = dot(w, a)
    if c != 1.0:
        w.values *= c
    if a.indices.size:
        w.values[a.indices] += d * a.values
    new_norm_sq = c * c * norm_sq_w + d * d * norm_sq(a) + 2.0 * c * d * wa
    return w, max(new_norm_sq, 0.0)


def cosine(u: DenseVector, v: DenseVector) -> float:
    """Cosine of the angle between two dense vectors; 0 if either is zero."""
    if u.dim != v.dim:
        raise DimensionMismatchError(f"dimension mismatch: {u.dim} vs {v.dim}")
    nu, nv = u.norm_sq(), v.norm_sq()
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u.values, v.values)) / math.sqrt(nu * nv)
