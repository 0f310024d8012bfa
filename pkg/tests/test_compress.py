import math

import numpy as np
import pytest

from cfdm import (
    DegeneracyError,
    KernelMatrix,
    Partition,
    PartitionError,
    build_compressed_operators,
    build_gaussian_kernel,
    build_idmgc_kernel,
    compress_kernel,
    compressed_degrees,
    compressed_markov,
    degrees,
    markov_normalize,
    region_to_point,
)

from helpers import block_sum_loops, random_points


def random_partition(seed, n, n_regions):
    rng = np.random.default_rng(seed)
    assignment = rng.integers(0, n_regions, n)
    # Guarantee non-empty regions, then pick one centroid per region.
    assignment[:n_regions] = np.arange(n_regions)
    centroids = np.array([np.flatnonzero(assignment == j)[0] for j in range(n_regions)])
    return Partition.from_assignment(assignment, centroids)


def random_instance(seed, n=60, n_regions=5, epsilon=2.0):
    kernel = build_gaussian_kernel(random_points(seed, n), epsilon=epsilon)
    q = degrees(kernel)
    partition = random_partition(seed + 1000, n, n_regions)
    return kernel, q, partition


class TestPartition:
    def test_singleton(self):
        part = Partition.singleton(4)
        part.validate()
        assert part.n_regions == 4

    def test_rejects_empty_region(self):
        with pytest.raises(PartitionError):
            Partition.from_assignment([0, 0, 2], [0, 1, 2])

    def test_rejects_misassigned_centroid(self):
        with pytest.raises(PartitionError):
            Partition.from_assignment([0, 1, 0], [0, 1, 2], n_regions=2)

    def test_rejects_foreign_centroid(self):
        with pytest.raises(PartitionError):
            Partition.from_assignment([0, 1, 1], [0, 0])


class TestCompressKernel:
    def test_singleton_partition_reproduces_idmgc(self):
        kernel, q, _ = random_instance(0)
        expected = build_idmgc_kernel(kernel, q).weights
        out = compress_kernel(kernel, q, Partition.singleton(kernel.n))
        np.testing.assert_array_equal(out, expected)

    def test_single_region_sums_all_degrees(self):
        kernel, q, _ = random_instance(1)
        part = Partition.from_assignment(np.zeros(kernel.n, dtype=int), [0])
        out = compress_kernel(kernel, q, part)
        assert out.shape == (1, 1)
        assert out[0, 0] == pytest.approx(q.sum(), rel=1e-12)

    def test_matches_block_sum_oracle(self):
        kernel, q, partition = random_instance(2)
        explicit = build_idmgc_kernel(kernel, q).weights
        expected = block_sum_loops(explicit, partition.assignment, partition.n_regions)
        out = compress_kernel(kernel, q, partition)
        np.testing.assert_allclose(out, expected, atol=1e-10)
        assert np.array_equal(out, out.T)

    def test_sparse_kernel_matches_dense(self):
        x = random_points(3, 80)
        sparse_kernel = build_gaussian_kernel(x, epsilon=2.0, neighbors=12)
        dense_kernel = KernelMatrix(sparse_kernel.dense(), epsilon=2.0)
        q = degrees(sparse_kernel)
        partition = random_partition(4, 80, 7)
        np.testing.assert_allclose(
            compress_kernel(sparse_kernel, q, partition),
            compress_kernel(dense_kernel, q, partition),
            atol=1e-12,
        )

    def test_norm_bounded_by_n_times_gaussian(self):
        for seed in range(10):
            kernel, q, partition = random_instance(seed + 10, n=50, n_regions=6)
            out = compress_kernel(kernel, q, partition)
            norm_ks = np.max(np.abs(np.linalg.eigvalsh(out)))
            norm_g = np.max(np.abs(np.linalg.eigvalsh(kernel.weights)))
            assert norm_ks <= kernel.n * norm_g + 1e-9


class TestCompressedDegrees:
    def test_singleton_equals_pointwise(self):
        kernel, q, _ = random_instance(5)
        out = compress_kernel(kernel, q, Partition.singleton(kernel.n))
        np.testing.assert_allclose(compressed_degrees(out), q, rtol=1e-10)

    def test_equals_per_region_degree_sums(self):
        kernel, q, partition = random_instance(6)
        out = compress_kernel(kernel, q, partition)
        expected = np.bincount(partition.assignment, weights=q, minlength=partition.n_regions)
        np.testing.assert_allclose(compressed_degrees(out), expected, rtol=1e-10)


class TestCompressedMarkov:
    def test_single_region(self):
        kernel, q, _ = random_instance(7)
        part = Partition.from_assignment(np.zeros(kernel.n, dtype=int), [0])
        np.testing.assert_allclose(compressed_markov(compress_kernel(kernel, q, part)), [[1.0]])

    def test_singleton_equals_squared_transition(self):
        kernel, q, _ = random_instance(8)
        p = markov_normalize(kernel)
        out = compressed_markov(compress_kernel(kernel, q, Partition.singleton(kernel.n)))
        np.testing.assert_allclose(out, p @ p, atol=1e-10)

    def test_rows_sum_to_one(self):
        kernel, q, partition = random_instance(9)
        out = compressed_markov(compress_kernel(kernel, q, partition))
        np.testing.assert_allclose(out.sum(axis=1), np.ones(partition.n_regions), atol=1e-12)

    def test_matches_two_factor_composition(self):
        # Region transitions factor through a point-level step: the prior-
        # weighted walk out of the region composed with the walk into the
        # target region.
        kernel, q, partition = random_instance(10)
        p = kernel.weights / q[:, None]
        z = np.zeros((kernel.n, partition.n_regions))
        z[np.arange(kernel.n), partition.assignment] = 1.0
        deg_s = np.bincount(partition.assignment, weights=q, minlength=partition.n_regions)
        prior = (z * q[:, None] / deg_s[partition.assignment][:, None]).T
        expected = prior @ p @ p @ z
        out = compressed_markov(compress_kernel(kernel, q, partition))
        np.testing.assert_allclose(out, expected, atol=1e-10)

    def test_zero_degree_region_rejected(self):
        with pytest.raises(DegeneracyError):
            compressed_markov(np.zeros((2, 2)))


class TestRegionToPoint:
    def test_single_region_all_ones(self):
        kernel, q, _ = random_instance(11)
        part = Partition.from_assignment(np.zeros(kernel.n, dtype=int), [0])
        out = region_to_point(kernel, q, part)
        np.testing.assert_array_equal(out, np.ones((kernel.n, 1)))

    def test_two_point_closed_form(self):
        eps = 3.0
        x = np.array([[0.0], [math.sqrt(eps)]])
        kernel = build_gaussian_kernel(x, epsilon=eps)
        q = degrees(kernel)
        out = region_to_point(kernel, q, Partition.singleton(2), normalize=False)
        e = math.exp(-1.0)
        expected = np.array([[1.0, e], [e, 1.0]]) / (1.0 + e)
        np.testing.assert_allclose(out, expected, atol=1e-14)

    def test_unnormalized_matches_composition_oracle(self):
        kernel, q, partition = random_instance(12)
        p = kernel.weights / q[:, None]
        deg_s = np.bincount(partition.assignment, weights=q, minlength=partition.n_regions)
        n, n_regions = kernel.n, partition.n_regions
        expected = np.zeros((n, n_regions))
        for region in range(n_regions):
            members = np.flatnonzero(partition.assignment == region)
            for x in range(n):
                expected[x, region] = sum(p[y, x] * q[y] for y in members) / deg_s[region]
        out = region_to_point(kernel, q, partition, normalize=False)
        np.testing.assert_allclose(out, expected, atol=1e-12)

    def test_normalized_rows_are_stochastic(self):
        kernel, q, partition = random_instance(13)
        out = region_to_point(kernel, q, partition)
        np.testing.assert_allclose(out.sum(axis=1), np.ones(kernel.n), atol=1e-12)
        assert np.all(out >= 0.0)

    def test_unnormalized_columns_are_stochastic(self):
        # For fixed region, the weights form a distribution over points.
        kernel, q, partition = random_instance(14)
        out = region_to_point(kernel, q, partition, normalize=False)
        np.testing.assert_allclose(out.sum(axis=0), np.ones(partition.n_regions), atol=1e-12)


class TestBuildCompressedOperators:
    def test_consistent_with_individual_operations(self):
        kernel, q, partition = random_instance(15)
        ops = build_compressed_operators(kernel, q, partition)
        np.testing.assert_array_equal(ops.kernel, compress_kernel(kernel, q, partition))
        np.testing.assert_allclose(ops.degrees, compressed_degrees(ops.kernel), rtol=1e-14)
        np.testing.assert_allclose(ops.markov, compressed_markov(ops.kernel), atol=1e-14)
        np.testing.assert_allclose(ops.interp, region_to_point(kernel, q, partition), atol=1e-12)

    def test_interpolating_constants_is_exact(self):
        kernel, q, partition = random_instance(16)
        ops = build_compressed_operators(kernel, q, partition)
        constant = np.full(partition.n_regions, 2.75)
        np.testing.assert_allclose(ops.interp @ constant, np.full(kernel.n, 2.75), rtol=1e-14)

    def test_mismatched_partition_rejected(self):
        kernel, q, _ = random_instance(17)
        with pytest.raises(Exception):
            compress_kernel(kernel, q, Partition.singleton(kernel.n + 1))
