"""
data — MNIST IDX ingestion, one-vs-rest relabelling, the bucket-permutation
protocol, and a synthetic separable generator with a known target.

IDX layout (big-endian):
  [offset] [type]          [value]           [description]
  0000     32 bit integer  0x00000803(2051)  magic (ubyte, 3 dims) / 0x00000801(2049) for labels
  0004     32 bit integer  N                 number of items
  0008     32 bit integer  28                rows      (images only)
  0012     32 bit integer  28                columns   (images only)
  ....     unsigned byte   ..                payload
"""

import gzip
import logging
import math
import struct
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterator, Optional, Tuple

import numpy as np
import scipy.sparse as sps

from mcf import config
from mcf.certificate import KnownTarget
from mcf.errors import DataError, GeneratorParameterError, IdxFormatError
from mcf.linalg import DenseVector, SparseVector, dot, norm_sq
from mcf.models import LabeledExample

logger = logging.getLogger(__name__)

_GZIP_MAGIC = b"\x1f\x8b"
_UBYTE_CODE = 0x08


# ── Dataset ───────────────────────────────────────────────────

@dataclass(frozen=True)
class Dataset:
    """Rows of a canonical CSR matrix; raw labels 0-9 and/or relabelled +-1 labels."""
    matrix: sps.csr_matrix
    raw_labels: Optional[np.ndarray] = None
    labels: Optional[np.ndarray] = None
    split: str = "train"

    def __post_init__(self):
        m = sps.csr_matrix(self.matrix, dtype=np.float64)
        m.sum_duplicates()
        m.eliminate_zeros()
        m.sort_indices()
        object.__setattr__(self, "matrix", m)
        for name in ("raw_labels", "labels"):
            arr = getattr(self, name)
            if arr is None:
                continue
            arr = np.asarray(arr, dtype=np.int64)
            if arr.shape != (m.shape[0],):
                raise DataError(f"{name} has shape {arr.shape}, expected ({m.shape[0]},)")
            object.__setattr__(self, name, arr)
        if self.labels is not None and not np.all(np.abs(self.labels) == 1):
            raise DataError("relabelled labels must be -1 or +1")
        if self.split not in ("train", "test"):
            raise DataError(f"split must be 'train' or 'test', got {self.split!r}")

    def __len__(self):
        return self.matrix.shape[0]

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def example(self, i: int) -> SparseVector:
        m = self.matrix
        lo, hi = m.indptr[i], m.indptr[i + 1]
        return SparseVector.unchecked(m.indices[lo:hi].astype(np.int64, copy=False), m.data[lo:hi], self.dim)

    @property
    def examples(self):
        return [self.example(i) for i in range(len(self))]

    def labeled(self, i: int) -> LabeledExample:
        if self.labels is None:
            raise DataError("dataset has no +-1 labels; call relabel_one_vs_rest first")
        return LabeledExample(self.example(i), int(self.labels[i]))

    def __iter__(self) -> Iterator[LabeledExample]:
        for i in range(len(self)):
            yield self.labeled(i)


def dataset_from_idx_arrays(images: np.ndarray, labels: np.ndarray, split: str = "train") -> Dataset:
    """uint8 images (n, rows, cols) and labels (n,) -> Dataset with pixels scaled to [0, 1]."""
    images = np.asarray(images)
    n = images.shape[0]
    flat = images.reshape(n, -1).astype(np.float64) / config.PIXEL_SCALE
    return Dataset(sps.csr_matrix(flat), raw_labels=np.asarray(labels, dtype=np.int64), split=split)


def dataset_to_idx_arrays(dataset: Dataset, shape: Tuple[int, int] = config.MNIST_SHAPE):
    """Inverse of dataset_from_idx_arrays (pixels rounded back to bytes)."""
    if shape[0] * shape[1] != dataset.dim:
        raise DataError(f"shape {shape} does not match dim {dataset.dim}")
    if dataset.raw_labels is None:
        raise DataError("dataset has no raw labels to write")
    dense = dataset.matrix.toarray() * config.PIXEL_SCALE
    images = np.clip(np.rint(dense), 0, 255).astype(np.uint8).reshape(len(dataset), *shape)
    return images, dataset.raw_labels.astype(np.uint8)


# ── IDX container ─────────────────────────────────────────────

def _read_bytes(path) -> bytes:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"IDX file not found: {path}")
    raw = path.read_bytes()
    if raw[:2] == _GZIP_MAGIC or path.suffix == ".gz":
        try:
            raw = gzip.decompress(raw)
        except (OSError, EOFError) as e:
            raise IdxFormatError(f"corrupt gzip stream: {e}", path, 0) from e
    return raw


def read_idx(path, expected_magic: int) -> np.ndarray:
    """Parse one IDX file into a uint8 array shaped by its dimension records."""
    raw = _read_bytes(path)
    if len(raw) < 4:
        raise IdxFormatError(f"truncated header: {len(raw)} bytes", path, len(raw))
    (magic,) = struct.unpack(">I", raw[:4])
    if magic != expected_magic:
        raise IdxFormatError(f"magic number mismatch: got {magic}, expected {expected_magic}", path, 0)
    if (magic >> 8) & 0xFF != _UBYTE_CODE:
        raise IdxFormatError(f"unsupported IDX element type 0x{(magic >> 8) & 0xFF:02x}", path, 2)

    ndim = magic & 0xFF
    header = 4 + 4 * ndim
    if len(raw) < header:
        raise IdxFormatError(f"truncated dimension records: need {header} bytes, have {len(raw)}", path, len(raw))
    dims = struct.unpack(f">{ndim}I", raw[4:header])

    expected = int(np.prod(dims, dtype=np.int64))
    have = len(raw) - header
    if have < expected:
        raise IdxFormatError(f"truncated payload: expected {expected} bytes, found {have}", path, header + have)
    if have > expected:
        raise IdxFormatError(f"{have - expected} trailing bytes after payload", path, header + expected)

    return np.frombuffer(raw, dtype=np.uint8, count=expected, offset=header).reshape(dims)


def load_idx(images_path, labels_path, split: str = "train",
             shape: Optional[Tuple[int, int]] = config.MNIST_SHAPE) -> Dataset:
    """Load an IDX image/label pair. Pass shape=None to accept any image geometry."""
    images = read_idx(images_path, config.IDX_IMAGE_MAGIC)
    labels = read_idx(labels_path, config.IDX_LABEL_MAGIC)

    if shape is not None and tuple(images.shape[1:]) != tuple(shape):
        raise IdxFormatError(f"image dimensions {images.shape[1:]}, expected {tuple(shape)}", images_path, 8)
    if images.shape[0] != labels.shape[0]:
        raise IdxFormatError(
            f"count mismatch: {images.shape[0]} images vs {labels.shape[0]} labels", labels_path, 4
        )
    bad = np.flatnonzero(labels > max(config.MNIST_LABELS))
    if bad.size:
        raise IdxFormatError(f"label {labels[bad[0]]} out of range 0-9", labels_path, 8 + int(bad[0]))

    dataset = dataset_from_idx_arrays(images, labels, split)
    logger.info("loaded %s: %d examples, dim %d, %d stored entries",
                split, len(dataset), dataset.dim, dataset.matrix.nnz)
    return dataset


def write_idx(images: np.ndarray, labels: np.ndarray, images_path, labels_path):
    """Write uint8 images (n, rows, cols) and labels (n,) as IDX; gzip when a path ends in .gz."""
    images = np.asarray(images, dtype=np.uint8)
    labels = np.asarray(labels, dtype=np.uint8)
    if images.ndim != 3:
        raise ValueError(f"images must be (n, rows, cols), got shape {images.shape}")
    if labels.shape != (images.shape[0],):
        raise ValueError(f"labels must have shape ({images.shape[0]},), got {labels.shape}")

    image_bytes = struct.pack(">IIII", config.IDX_IMAGE_MAGIC, *images.shape) + images.tobytes()
    label_bytes = struct.pack(">II", config.IDX_LABEL_MAGIC, labels.shape[0]) + labels.tobytes()
    for path, payload in ((images_path, image_bytes), (labels_path, label_bytes)):
        path = Path(path)
        if path.suffix == ".gz":
            payload = gzip.compress(payload, mtime=0)
        path.write_bytes(payload)


# ── One-vs-rest ───────────────────────────────────────────────

def relabel_one_vs_rest(dataset: Dataset, target_label: int) -> Dataset:
    """y = +1 iff the raw label equals target_label. Always derived from the raw labels."""
    if dataset.raw_labels is None:
        raise DataError("one-vs-rest relabelling needs raw labels")
    if target_label not in config.MNIST_LABELS:
        raise ValueError(f"target_label must be in 0..9, got {target_label}")
    labels = np.where(dataset.raw_labels == target_label, 1, -1)
    return replace(dataset, labels=labels)


# ── Bucket permutations ───────────────────────────────────────

@dataclass(frozen=True)
class BucketPermutationPlan:
    permutation: Tuple[int, ...]
    bucket_size: int = config.BUCKET_SIZE
    seed: Optional[int] = None

    def __post_init__(self):
        perm = tuple(int(b) for b in self.permutation)
        object.__setattr__(self, "permutation", perm)
        if sorted(perm) != list(range(len(perm))):
            raise ValueError(f"permutation is not a bijection on 0..{len(perm) - 1}")
        if self.bucket_size < 1:
            raise ValueError(f"bucket_size must be >= 1, got {self.bucket_size}")

    @property
    def bucket_count(self) -> int:
        return len(self.permutation)

    @property
    def size(self) -> int:
        return self.bucket_count * self.bucket_size

    @classmethod
    def from_seed(cls, seed: int, bucket_count: int = config.BUCKET_COUNT,
                  bucket_size: int = config.BUCKET_SIZE) -> "BucketPermutationPlan":
        """Fisher-Yates shuffle of the bucket indices by a PCG64 generator."""
        perm = np.random.default_rng(seed).permutation(bucket_count)
        return cls(tuple(perm.tolist()), bucket_size, seed)

    @classmethod
    def identity(cls, bucket_count: int = config.BUCKET_COUNT,
                 bucket_size: int = config.BUCKET_SIZE) -> "BucketPermutationPlan":
        return cls(tuple(range(bucket_count)), bucket_size)

    def order(self) -> np.ndarray:
        """Example indices in stream order; within-bucket order is kept."""
        starts = np.asarray(self.permutation, dtype=np.int64) * self.bucket_size
        return (starts[:, None] + np.arange(self.bucket_size, dtype=np.int64)).ravel()


def permuted_stream(dataset: Dataset, plan: BucketPermutationPlan) -> Iterator[LabeledExample]:
    if len(dataset) != plan.size:
        raise DataError(
            f"dataset has {len(dataset)} examples, plan needs {plan.bucket_count} x {plan.bucket_size} = {plan.size}"
        )
    for i in plan.order():
        yield dataset.labeled(int(i))


def derive_task_seed(master_seed: int, label: int, permutation_index: int) -> int:
    """64-bit seed of one (label, permutation) task, independent of scheduling order."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(label, permutation_index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


# ── Synthetic separable data ─────────────────────────────────

def _ball_batch(rng: np.random.Generator, size: int, dim: int, radius: float) -> np.ndarray:
    """Uniform samples from the radius ball: Gaussian direction, radius * U^(1/dim)."""
    directions = rng.standard_normal((size, dim))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = radius * rng.random(size) ** (1.0 / dim)
    return directions * radii[:, None]


def synthesize_separable(n: int, dim: int, gamma: float, radius: float, seed: int) -> Tuple[Dataset, KnownTarget]:
    """n points of the radius ball with |w . a| >= gamma for a uniform unit target w.

    The returned target carries the realised minimum margin and maximum norm.
    """
    if n < 1 or dim < 1:
        raise GeneratorParameterError(f"n and dim must be >= 1, got n={n}, dim={dim}")
    if not (0 < gamma < radius):
        raise GeneratorParameterError(f"need 0 < gamma < radius, got gamma={gamma}, radius={radius}")

    rng = np.random.default_rng(seed)
    w = rng.standard_normal(dim)
    w /= np.linalg.norm(w)

    batch = max(1024, min(65536, 2 * n))
    window = config.GENERATOR_REJECT_WINDOW
    kept = []
    accepted = 0
    window_draws = window_accepted = 0
    while accepted < n:
        points = _ball_batch(rng, batch, dim, radius)
        proj = points @ w
        mask = np.abs(proj) >= gamma
        kept.append(points[mask])
        accepted += int(mask.sum())
        window_draws += batch
        window_accepted += int(mask.sum())
        if window_draws >= window:
            if window_accepted / window_draws < config.GENERATOR_MIN_ACCEPT_RATE:
                raise GeneratorParameterError(
                    f"acceptance rate {window_accepted / window_draws:.2e} over {window_draws} draws "
                    f"(gamma={gamma}, radius={radius}, dim={dim})"
                )
            window_draws = window_accepted = 0

    points = np.concatenate(kept)[:n]
    labels = np.where(points @ w >= 0, 1, -1)
    dataset = Dataset(sps.csr_matrix(points), labels=labels, split="train")

    target_w = DenseVector(w)
    margins = [ex.y * dot(target_w, ex.a) for ex in dataset]
    norms = [math.sqrt(norm_sq(a)) for a in dataset.examples]
    target = KnownTarget(target_w, gamma=float(min(margins)), radius=float(max(norms)))
    logger.info("synthesized %d examples in dim %d: gamma=%.4g, R=%.4g", n, dim, target.gamma, target.radius)
    return dataset, target
