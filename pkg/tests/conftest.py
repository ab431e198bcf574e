"""Shared fixtures: IDX writers, a small separable stream, a tiny MNIST-shaped dataset."""

import struct

import numpy as np
import pytest

from mcf import config
from mcf.data import synthesize_separable, write_idx


@pytest.fixture
def idx_bytes():
    """Build raw IDX payloads byte by byte."""
    def build(magic, dims, payload):
        return struct.pack(f">I{len(dims)}I", magic, *dims) + bytes(payload)
    return build


@pytest.fixture
def separable():
    """300 examples in 10 dimensions, margin >= 0.1 inside the unit ball."""
    return synthesize_separable(300, 10, 0.1, 1.0, seed=7)


def _tiny_images(rng, n):
    images = np.zeros((n, *config.MNIST_SHAPE), dtype=np.uint8)
    for k in range(n):
        rows = rng.integers(0, config.MNIST_SHAPE[0], size=12)
        cols = rng.integers(0, config.MNIST_SHAPE[1], size=12)
        images[k, rows, cols] = rng.integers(1, 256, size=12)
    return images


@pytest.fixture
def tiny_mnist(tmp_path):
    """6 buckets x 5 training images and 10 test images, written as IDX files."""
    rng = np.random.default_rng(2024)
    bucket_count, bucket_size = 6, 5
    n_train = bucket_count * bucket_size
    train_images = _tiny_images(rng, n_train)
    train_labels = np.arange(n_train, dtype=np.uint8) % 10
    test_images = _tiny_images(rng, 10)
    test_labels = np.arange(10, dtype=np.uint8)

    paths = {
        "train_images": tmp_path / "train-images-idx3-ubyte",
        "train_labels": tmp_path / "train-labels-idx1-ubyte",
        "test_images":  tmp_path / "t10k-images-idx3-ubyte.gz",
        "test_labels":  tmp_path / "t10k-labels-idx1-ubyte.gz",
    }
    write_idx(train_images, train_labels, paths["train_images"], paths["train_labels"])
    write_idx(test_images, test_labels, paths["test_images"], paths["test_labels"])
    return {
        "paths": {k: str(v) for k, v in paths.items()},
        "bucket_count": bucket_count,
        "bucket_size": bucket_size,
        "train_images": train_images,
        "train_labels": train_labels,
    }


@pytest.fixture
def tiny_mnist_args(tiny_mnist):
    """CLI flags pointing the bench at the tiny dataset."""
    p = tiny_mnist["paths"]
    return [
        "--train-images", p["train_images"], "--train-labels", p["train_labels"],
        "--test-images", p["test_images"], "--test-labels", p["test_labels"],
        "--bucket-count", str(tiny_mnist["bucket_count"]),
        "--bucket-size", str(tiny_mnist["bucket_size"]),
    ]

