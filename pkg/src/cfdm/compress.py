"""Region-level compression of the two-step kernel.

Aggregates the inverse-density kernel over a partition of the points
without ever materializing the n x n two-step kernel: with Z the n x n_S
region indicator matrix and B = W . Z, the compressed kernel is
K_S = B^T . diag(1/q) . B, which costs O(nnz(W) * n_S).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import sparse

from .errors import DegeneracyError, ParameterError, PartitionError
from .kernels import KernelMatrix, _two_step_product


@dataclass(frozen=True, eq=False)
class Partition:
    """Assignment of n points to n_regions non-empty regions.

    ``centroid_indices[j]`` is the point index acting as region j's
    centroid and is always assigned to region j.
    """

    assignment: np.ndarray
    n_regions: int
    centroid_indices: np.ndarray
    sizes: np.ndarray

    @property
    def n(self) -> int:
        return self.assignment.shape[0]

    @classmethod
    def from_assignment(cls, assignment, centroid_indices, n_regions: Optional[int] = None) -> "Partition":
        assignment = np.asarray(assignment, dtype=np.int64)
        centroid_indices = np.asarray(centroid_indices, dtype=np.int64)
        if n_regions is None:
            n_regions = centroid_indices.shape[0]
        part = cls(
            assignment=assignment,
            n_regions=int(n_regions),
            centroid_indices=centroid_indices,
            sizes=np.bincount(assignment, minlength=int(n_regions)),
        )
        part.validate()
        return part

    @classmethod
    def singleton(cls, n: int) -> "Partition":
        """The identity partition: every point is its own region."""
        idx = np.arange(n, dtype=np.int64)
        return cls(assignment=idx, n_regions=n, centroid_indices=idx.copy(), sizes=np.ones(n, dtype=np.int64))

    def validate(self) -> None:
        n = self.assignment.shape[0]
        if n == 0:
            raise PartitionError("partition over zero points")
        if self.assignment.min() < 0 or self.assignment.max() >= self.n_regions:
            raise PartitionError("assignment values must lie in [0, n_regions)")
        if self.centroid_indices.shape[0] != self.n_regions:
            raise PartitionError(
                f"expected {self.n_regions} centroid indices, got {self.centroid_indices.shape[0]}"
            )
        sizes = np.bincount(self.assignment, minlength=self.n_regions)
        if np.any(sizes == 0):
            empty = int(np.flatnonzero(sizes == 0)[0])
            raise PartitionError(f"region {empty} is empty")
        if not np.array_equal(sizes, self.sizes):
            raise PartitionError("stored region sizes do not match the assignment")
        if int(self.sizes.sum()) != n:
            raise PartitionError("region sizes must sum to the point count")
        own = self.assignment[self.centroid_indices]
        if not np.array_equal(own, np.arange(self.n_regions)):
            bad = int(np.flatnonzero(own != np.arange(self.n_regions))[0])
            raise PartitionError(f"centroid of region {bad} is assigned to region {own[bad]}")


@dataclass(frozen=True, eq=False)
class CompressedOperators:
    """Region-level kernel, degrees, transition matrix, and the
    region-to-point interpolation weights (row-stochastic)."""

    kernel: np.ndarray
    degrees: np.ndarray
    markov: np.ndarray
    interp: np.ndarray

    @property
    def n_regions(self) -> int:
        return self.kernel.shape[0]


def region_indicator(partition: Partition) -> sparse.csr_matrix:
    """The n x n_S one-hot membership matrix Z."""
    n = partition.n
    return sparse.csr_matrix(
        (np.ones(n), (np.arange(n), partition.assignment)),
        shape=(n, partition.n_regions),
    )


def _region_column_sums(weights, partition: Partition) -> np.ndarray:
    """B = W . Z: per-region sums of kernel columns, shape (n, n_S)."""
    zt = region_indicator(partition).T.tocsr()
    b = zt @ weights
    if sparse.issparse(b):
        return np.ascontiguousarray(b.T.toarray())
    return np.ascontiguousarray(b.T)


def _check_inputs(gaussian: KernelMatrix, q: np.ndarray, partition: Partition) -> np.ndarray:
    partition.validate()
    if partition.n != gaussian.n:
        raise ParameterError(
            f"partition covers {partition.n} points but the kernel has {gaussian.n}"
        )
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (gaussian.n,):
        raise ParameterError(f"degree vector has shape {q.shape}, expected ({gaussian.n},)")
    if np.any(q <= 0.0):
        raise DegeneracyError("degree vector must be strictly positive")
    return q


def compress_kernel(gaussian: KernelMatrix, q: np.ndarray, partition: Partition) -> np.ndarray:
    """Region-by-region block sums of the two-step kernel.

    Equals sum over x in S_i, y in S_j of K[x, y] for the inverse-density
    kernel K, evaluated as B^T . diag(1/q) . B without forming K.
    """
    q = _check_inputs(gaussian, q, partition)
    b = _region_column_sums(gaussian.weights, partition)
    return _two_step_product(b, q)


def compressed_degrees(kernel_s: np.ndarray) -> np.ndarray:
    """Row sums of the compressed kernel; equal per-region sums of q."""
    return np.asarray(kernel_s).sum(axis=1)


def compressed_markov(kernel_s: np.ndarray) -> np.ndarray:
    """Row-stochastic region transition matrix P_S."""
    deg = compressed_degrees(kernel_s)
    if np.any(deg <= 0.0):
        raise DegeneracyError("compressed kernel has a region with zero degree")
    return kernel_s / deg[:, None]


def region_to_point(
    gaussian: KernelMatrix,
    q: np.ndarray,
    partition: Partition,
    normalize: bool = True,
) -> np.ndarray:
    """Region-to-point transition weights, shape (n, n_S).

    The unnormalized weight of region i at point x is
    sum_{y in S_i} w[y, x] / deg_S[i], the probability that a one-step walk
    started in region i (under its degree prior) lands at x. With
    ``normalize=True`` each row is rescaled to sum to 1 so interpolation is
    a convex combination that reproduces constants.
    """
    q = _check_inputs(gaussian, q, partition)
    b = _region_column_sums(gaussian.weights, partition)
    deg_s = np.bincount(partition.assignment, weights=q, minlength=partition.n_regions)
    weights = b / deg_s[None, :]
    if not normalize:
        return weights
    totals = weights.sum(axis=1)
    if np.any(totals <= 0.0):
        # Unreachable for Gaussian kernels: the point's own region
        # contributes at least w[x, x] = 1.
        raise AssertionError("point with zero affinity to every region")
    return weights / totals[:, None]


def build_compressed_operators(
    gaussian: KernelMatrix, q: np.ndarray, partition: Partition
) -> CompressedOperators:
    """Compute kernel, degrees, transition matrix, and interpolation weights
    in one pass over the column sums."""
    q = _check_inputs(gaussian, q, partition)
    b = _region_column_sums(gaussian.weights, partition)
    kernel_s = _two_step_product(b, q)
    deg_s = kernel_s.sum(axis=1)
    if np.any(deg_s <= 0.0):
        raise DegeneracyError("compressed kernel has a region with zero degree")
    markov_s = kernel_s / deg_s[:, None]
    interp = b / deg_s[None, :]
    totals = interp.sum(axis=1)
    if np.any(totals <= 0.0):
        raise AssertionError("point with zero affinity to every region")
    interp /= totals[:, None]
    return CompressedOperators(kernel=kernel_s, degrees=deg_s, markov=markov_s, interp=interp)
