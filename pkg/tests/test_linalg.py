"""Sparse/dense primitives and the incremental norm identity."""

import math

import numpy as np
import pytest

from mcf import config
from mcf.errors import DimensionMismatchError
from mcf.linalg import (
    DenseVector, SparseVector, axpy_update, cosine, dot, norm_sq, scale_axpy_update,
)
from mcf.models import HypothesisState


def sv(entries, dim):
    return SparseVector.from_entries(entries, dim)


def random_sparse(rng, dim, density=0.3):
    dense = rng.standard_normal(dim) * (rng.random(dim) < density)
    if not dense.any():
        dense[rng.integers(dim)] = 1.0
    return SparseVector.from_dense(dense)


class TestSparseVector:

    def test_from_dense_omits_zeros(self):
        a = SparseVector.from_dense([0.0, 2.5, 0.0, -1.0])
        assert a.entries() == [(1, 2.5), (3, -1.0)]
        assert a.dim == 4
        np.testing.assert_array_equal(a.to_dense(), [0.0, 2.5, 0.0, -1.0])

    def test_unsorted_indices_rejected(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            sv([(2, 1.0), (1, 1.0)], 3)

    def test_duplicate_indices_rejected(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            sv([(1, 1.0), (1, 2.0)], 3)

    def test_index_out_of_range(self):
        with pytest.raises(ValueError, match="must lie in"):
            sv([(3, 1.0)], 3)

    def test_stored_zero_rejected(self):
        with pytest.raises(ValueError, match="exactly zero"):
            sv([(0, 0.0)], 3)

    def test_equality(self):
        assert sv([(0, 1.0)], 2) == SparseVector.from_dense([1.0, 0.0])
        assert sv([(0, 1.0)], 2) != sv([(0, 1.0)], 3)


class TestDot:

    def test_single_entry_projection(self):
        assert dot(DenseVector([1, 2, 3]), sv([(1, 1.0)], 3)) == 2.0

    def test_zero_hypothesis(self):
        assert dot(DenseVector([0, 0, 0]), sv([(0, 5.0), (2, -1.0)], 3)) == 0.0

    def test_hand_arithmetic(self):
        a = sv([(0, 0.4), (1, 0.3)], 2)
        w = DenseVector([1, 0])
        assert dot(w, a) == pytest.approx(0.4)
        assert dot(w, a) == pytest.approx(float(np.dot(w.values, a.to_dense())))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            dot(DenseVector([1, 2]), sv([(0, 1.0)], 3))

    def test_bilinear_under_exact_scaling(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            w = DenseVector(rng.standard_normal(12))
            a = random_sparse(rng, 12)
            base = dot(w, a)
            assert dot(DenseVector(w.values * 2.0), a) == 2.0 * base
            assert dot(w, a.scaled(0.5)) == 0.5 * base

    def test_cauchy_schwarz(self):
        rng = np.random.default_rng(42)
        for _ in range(500):
            w = DenseVector(rng.standard_normal(20))
            a = random_sparse(rng, 20)
            assert dot(w, a) ** 2 <= w.norm_sq() * norm_sq(a) * (1 + 1e-12)


class TestNormSq:

    def test_empty(self):
        assert norm_sq(sv([], 2)) == 0.0

    def test_three_four_five(self):
        assert norm_sq(sv([(0, 3.0), (1, 4.0)], 2)) == 25.0

    def test_hand_arithmetic(self):
        assert norm_sq(sv([(0, 0.4), (1, 0.3)], 2)) == pytest.approx(0.25)


class TestAxpyUpdate:

    def test_add_unit_example(self):
        w, n = axpy_update(DenseVector([1, 0]), 1.0, 1.0, +1, sv([(1, 1.0)], 2))
        np.testing.assert_array_equal(w.values, [1, 1])
        assert n == pytest.approx(2.0)

    def test_zero_step_is_identity(self):
        w, n = axpy_update(DenseVector([1, 1]), 2.0, 0.0, -1, sv([(0, 9.0)], 2))
        np.testing.assert_array_equal(w.values, [1, 1])
        assert n == 2.0

    def test_negative_label(self):
        w, n = axpy_update(DenseVector([2, 0]), 4.0, 0.5, -1, sv([(0, 2.0)], 2))
        np.testing.assert_array_equal(w.values, [1, 0])
        assert n == pytest.approx(1.0)

    def test_identity_matches_from_scratch(self):
        rng = np.random.default_rng(42)
        w = DenseVector(rng.standard_normal(30))
        n = w.norm_sq()
        for _ in range(1000):
            a = random_sparse(rng, 30)
            lam = float(rng.uniform(0, 3))
            y = int(rng.choice([-1, 1]))
            w, n = axpy_update(w, n, lam, y, a)
            assert n == pytest.approx(w.norm_sq(), rel=1e-9)

    def test_scale_axpy_identity(self):
        rng = np.random.default_rng(7)
        w = DenseVector(rng.standard_normal(15))
        n = w.norm_sq()
        for _ in range(300):
            a = random_sparse(rng, 15)
            c, d = float(rng.uniform(0.5, 2)), float(rng.standard_normal())
            expected = c * w.values + d * a.to_dense()
            w, n = scale_axpy_update(w, n, c, d, a)
            np.testing.assert_allclose(w.values, expected, rtol=1e-12, atol=1e-12)
            assert n == pytest.approx(w.norm_sq(), rel=1e-9)


class TestCosine:

    def test_parallel_and_orthogonal(self):
        assert cosine(DenseVector([1, 1]), DenseVector([2, 2])) == pytest.approx(1.0)
        assert cosine(DenseVector([1, 0]), DenseVector([0, 3])) == 0.0

    def test_zero_vector(self):
        assert cosine(DenseVector([0, 0]), DenseVector([1, 0])) == 0.0


class TestHypothesisNormRefresh:

    def test_recomputed_every_interval(self):
        rng = np.random.default_rng(3)
        state = HypothesisState.empty(8)
        state.replace(SparseVector.from_dense(rng.standard_normal(8)), 1.0)
        for _ in range(config.NORM_RECOMPUTE_EVERY):
            state.apply_additive(0.1, 1, random_sparse(rng, 8))
        assert state.additive_updates == config.NORM_RECOMPUTE_EVERY
        assert state.norm_sq_w == state.w.norm_sq()
        assert math.isfinite(state.norm_w)
