import numpy as np
import pytest

from cfdm import (
    Embedding,
    ParameterError,
    Partition,
    SpectrumError,
    align_embeddings,
    build_compressed_operators,
    build_gaussian_kernel,
    build_idmgc_kernel,
    compressed_diffusion_map,
    degrees,
    diffusion_map,
    eigendecompose,
    generate_swiss_roll,
    interpolate_embedding,
    run_cfdm,
    run_exact,
    symmetric_affinity,
)
from cfdm.eigen import EigenSystem

from helpers import (
    exhaustive_alignment_sse,
    full_eigh_by_magnitude,
    map_from_kernel_oracle,
    random_points,
)


def exact_inputs(seed, n, epsilon=4.0):
    kernel = build_gaussian_kernel(random_points(seed, n), epsilon=epsilon)
    q = degrees(kernel)
    eigs = eigendecompose(symmetric_affinity(kernel, q), n)
    return kernel, q, eigs


class TestDiffusionMap:
    def test_two_point_closed_form(self):
        a = 0.5
        x = np.array([[0.0], [1.0]])
        eps = 1.0 / np.log(1.0 / a)  # exp(-1/eps) == a
        kernel = build_gaussian_kernel(x, epsilon=eps)
        q = degrees(kernel)
        eigs = eigendecompose(symmetric_affinity(kernel, q), 2)
        for t in (1.0, 2.0):
            emb = diffusion_map(eigs, q, t, 1)
            lam = (1 - a) / (1 + a)
            c = 1.0 / np.sqrt(2.0 * (1.0 + a))
            np.testing.assert_allclose(
                np.abs(emb.coordinates[:, 0]), lam**t * np.array([c, c]), atol=1e-12
            )
            assert emb.coordinates[0, 0] * emb.coordinates[1, 0] < 0

    def test_t_zero_gives_unscaled_eigenvectors(self):
        kernel, q, eigs = exact_inputs(0, 40)
        emb = diffusion_map(eigs, q, 0.0, 5)
        phi = eigs.eigenvectors[:, 1:6] / np.sqrt(q)[:, None]
        np.testing.assert_allclose(emb.coordinates, phi, atol=1e-12)

    def test_distance_consistency_with_eigen_sum(self):
        # Euclidean distances in the full map equal the spectral form of the
        # diffusion distance carried through the 1/sqrt(q) conjugation.
        n, t = 50, 1.5
        kernel, q, eigs = exact_inputs(1, n)
        emb = diffusion_map(eigs, q, t, n - 1)
        values, vectors = full_eigh_by_magnitude(symmetric_affinity(kernel, q).dense())
        phi = vectors / np.sqrt(q)[:, None]
        rng = np.random.default_rng(2)
        for _ in range(25):
            x, y = rng.choice(n, 2, replace=False)
            map_dist = float(np.sum((emb.coordinates[x] - emb.coordinates[y]) ** 2))
            eigen_sum = float(
                np.sum(np.abs(values) ** (2 * t) * (phi[x] - phi[y]) ** 2)
            )
            assert map_dist == pytest.approx(eigen_sum, abs=1e-8)

    def test_eigenvalue_power_consistency(self):
        kernel, q, eigs = exact_inputs(3, 60)
        emb_t = diffusion_map(eigs, q, 2.0, 8)
        emb_2t = diffusion_map(eigs, q, 4.0, 8)
        scale = emb_t.eigenvalues**2.0
        np.testing.assert_allclose(emb_2t.coordinates, emb_t.coordinates * scale[None, :], atol=1e-10)

    def test_broken_spectrum_rejected(self):
        bad = EigenSystem(np.array([0.8, 0.5]), np.eye(2))
        with pytest.raises(SpectrumError):
            diffusion_map(bad, np.ones(2), 1.0, 1)

    def test_insufficient_eigenpairs_rejected(self):
        kernel, q, _ = exact_inputs(4, 30)
        eigs = eigendecompose(symmetric_affinity(kernel, q), 3)
        with pytest.raises(ParameterError):
            diffusion_map(eigs, q, 1.0, 3)


class TestCompressedDiffusionMap:
    def test_singleton_matches_two_step_pointwise_map(self):
        kernel = build_gaussian_kernel(random_points(5, 80), epsilon=4.0)
        q = degrees(kernel)
        ops = build_compressed_operators(kernel, q, Partition.singleton(80))
        region_map = compressed_diffusion_map(ops, 1.0, 6)
        expected, _ = map_from_kernel_oracle(build_idmgc_kernel(kernel, q).weights, q, 1.0, 6)
        report, _ = align_embeddings(
            Embedding(expected, region_map.eigenvalues, 1.0, "regions"), region_map
        )
        assert report.total_sse <= 1e-16 * 80

    def test_single_region_rejected(self):
        kernel = build_gaussian_kernel(random_points(6, 20), epsilon=4.0)
        q = degrees(kernel)
        part = Partition.from_assignment(np.zeros(20, dtype=int), [0])
        ops = build_compressed_operators(kernel, q, part)
        with pytest.raises(ParameterError):
            compressed_diffusion_map(ops, 1.0, 1)

    def test_region_eigenvalues_match_dense_oracle(self):
        rng = np.random.default_rng(7)
        kernel = build_gaussian_kernel(random_points(8, 60), epsilon=4.0)
        q = degrees(kernel)
        assignment = rng.integers(0, 5, 60)
        assignment[:5] = np.arange(5)
        centroids = [int(np.flatnonzero(assignment == j)[0]) for j in range(5)]
        ops = build_compressed_operators(kernel, q, Partition.from_assignment(assignment, centroids))
        region_map = compressed_diffusion_map(ops, 1.0, 3)
        oracle = np.sort(np.linalg.eigvals(ops.markov).real)[::-1]
        np.testing.assert_allclose(region_map.eigenvalues, oracle[1:4], atol=1e-8)


class TestInterpolateEmbedding:
    def region_embedding(self, coords):
        coords = np.asarray(coords, dtype=float)
        return Embedding(coords, np.linspace(0.9, 0.5, coords.shape[1]), 1.0, "regions")

    def test_constant_column_preserved(self):
        emb = self.region_embedding(np.full((4, 2), 3.25))
        interp = np.random.default_rng(9).dirichlet(np.ones(4), size=10)
        out = interpolate_embedding(emb, interp)
        np.testing.assert_allclose(out.coordinates, np.full((10, 2), 3.25), rtol=1e-14)

    def test_single_region_copies_coordinates(self):
        emb = self.region_embedding([[1.5, -2.0]])
        out = interpolate_embedding(emb, np.ones((6, 1)))
        np.testing.assert_array_equal(out.coordinates, np.tile([1.5, -2.0], (6, 1)))

    def test_interpolated_points_in_componentwise_hull(self):
        kernel = build_gaussian_kernel(random_points(10, 70), epsilon=4.0)
        q = degrees(kernel)
        rng = np.random.default_rng(11)
        assignment = rng.integers(0, 6, 70)
        assignment[:6] = np.arange(6)
        centroids = [int(np.flatnonzero(assignment == j)[0]) for j in range(6)]
        ops = build_compressed_operators(kernel, q, Partition.from_assignment(assignment, centroids))
        region_map = compressed_diffusion_map(ops, 1.0, 4)
        out = interpolate_embedding(region_map, ops.interp)
        lo = region_map.coordinates.min(axis=0) - 1e-12
        hi = region_map.coordinates.max(axis=0) + 1e-12
        assert np.all(out.coordinates >= lo[None, :])
        assert np.all(out.coordinates <= hi[None, :])

    def test_non_stochastic_weights_rejected(self):
        emb = self.region_embedding(np.ones((3, 2)))
        with pytest.raises(ParameterError):
            interpolate_embedding(emb, np.full((5, 3), 0.5))

    def test_point_embedding_rejected(self):
        emb = Embedding(np.ones((3, 2)), np.ones(2), 1.0, "points")
        with pytest.raises(ParameterError):
            interpolate_embedding(emb, np.ones((3, 3)) / 3.0)


class TestAlignEmbeddings:
    def make_embedding(self, coords, t=1.0):
        coords = np.asarray(coords, dtype=float)
        return Embedding(coords, np.linspace(0.9, 0.1, coords.shape[1]), t, "points")

    def test_recovers_permutation_and_signs(self):
        rng = np.random.default_rng(12)
        ref = self.make_embedding(rng.normal(size=(40, 5)))
        perm = np.array([3, 0, 4, 1, 2])
        signs = np.array([1.0, -1.0, 1.0, -1.0, -1.0])
        candidate = self.make_embedding(ref.coordinates[:, perm] * signs[None, :])
        report, aligned = align_embeddings(ref, candidate)
        assert report.total_sse == pytest.approx(0.0, abs=1e-20)
        np.testing.assert_array_equal(aligned.coordinates, ref.coordinates)
        # The recovered matching is the inverse of the planted permutation.
        np.testing.assert_array_equal(report.permutation, np.argsort(perm))
        np.testing.assert_array_equal(report.signs, signs[report.permutation])

    def test_offset_component_sse(self):
        rng = np.random.default_rng(13)
        ref = self.make_embedding(rng.normal(size=(30, 4)))
        delta = 0.75
        shifted = ref.coordinates.copy()
        shifted[:, 2] += delta
        report, _ = align_embeddings(ref, self.make_embedding(shifted))
        assert report.total_sse == pytest.approx(30 * delta**2, rel=1e-12)
        assert report.total_mse == pytest.approx(delta**2, rel=1e-12)

    def test_matches_exhaustive_search_on_swiss_roll(self):
        roll = generate_swiss_roll(2000, seed=21)
        exact = run_exact(roll.data, epsilon=2.0, k=6).embedding
        approx = run_cfdm(roll.data, epsilon=2.0, n_partitions=120, k=6, seed=3).embedding
        report, _ = align_embeddings(exact, approx)
        oracle = exhaustive_alignment_sse(exact.coordinates, approx.coordinates)
        assert report.total_sse == pytest.approx(oracle, rel=1e-9)

    def test_candidate_may_have_extra_components(self):
        rng = np.random.default_rng(14)
        ref = self.make_embedding(rng.normal(size=(25, 3)))
        extra = np.column_stack([ref.coordinates[:, [2, 0]], rng.normal(size=(25, 2)), -ref.coordinates[:, [1]]])
        report, aligned = align_embeddings(ref, self.make_embedding(extra))
        assert report.total_sse == pytest.approx(0.0, abs=1e-20)
        assert aligned.k == 3

    def test_zero_variance_component_flagged(self):
        rng = np.random.default_rng(15)
        ref = self.make_embedding(rng.normal(size=(20, 3)))
        flat = ref.coordinates.copy()
        flat[:, 1] = 4.0
        report, _ = align_embeddings(self.make_embedding(flat), ref)
        assert any("zero variance" in note for note in report.excluded_components)

    def test_subject_count_mismatch_rejected(self):
        ref = self.make_embedding(np.ones((5, 2)))
        with pytest.raises(ParameterError):
            align_embeddings(ref, self.make_embedding(np.ones((6, 2))))

    def test_fewer_candidate_components_rejected(self):
        ref = self.make_embedding(np.random.default_rng(16).normal(size=(10, 3)))
        candidate = self.make_embedding(ref.coordinates[:, :2])
        with pytest.raises(ParameterError):
            align_embeddings(ref, candidate)
