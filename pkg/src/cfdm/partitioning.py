"""Coherence-biased centroid sampling and angular-distance assignment.

Partition centroids are drawn without replacement with probability biased
by diffusion coherence (the diagonal of A^(2t)), and points join the
centroid maximizing the coherence-normalized 2t-step affinity, which is
equivalent to minimizing the angular diffusion distance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy import sparse
from scipy.spatial.distance import cdist

from .compress import Partition
from .eigen import EigenSystem
from .errors import (
    DegeneracyError,
    ParameterError,
    SamplingError,
    VerificationError,
)
from .kernels import AffinityOperator, Matrix, to_dense

TRACE_IDENTITY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class CoherenceVector:
    """Per-point diffusion coherence: rho[i] = (A^(2t))_ii in (0, 1]."""

    rho: np.ndarray
    t: int


@dataclass(frozen=True, eq=False)
class CentroidScoreMatrix:
    """Normalized 2t-step affinities toward each centroid.

    Entry (x, i) is a^(2t)(x, y_i) / sqrt(rho_t(y_i)); the row-wise argmax
    matches the angular-diffusion-distance argmin because the remaining
    rho_t(x) factor is constant along each row.
    """

    scores: np.ndarray
    centroid_rho: np.ndarray
    centroids: np.ndarray
    t: int


@dataclass(frozen=True, eq=False)
class LocalityDiagnostic:
    """Per-region profile flatness xi and maximum intra-region diffusion
    distance; the distance is bounded by 2 * xi * sqrt(n)."""

    profile_gap: np.ndarray
    max_intra_distance: np.ndarray


def _operator(affinity: Union[AffinityOperator, Matrix]) -> Matrix:
    return affinity.matrix if isinstance(affinity, AffinityOperator) else affinity


def _power_columns(m: Matrix, cols: np.ndarray, steps: int) -> np.ndarray:
    """Columns of m^steps selected by index, via repeated products."""
    if sparse.issparse(m):
        block = m.tocsc()[:, cols].toarray()
    else:
        block = np.array(m[:, cols])
    for _ in range(steps - 1):
        block = m @ block
    return block


def diffusion_coherence(
    affinity: Union[AffinityOperator, Matrix],
    t: int = 1,
    block_size: int = 256,
) -> CoherenceVector:
    """Diagonal of A^(2t); the squared norm of each t-step affinity profile.

    t = 1 is a single pass over the stored entries (squared row norms);
    larger t uses blocked per-point matrix-vector products.
    """
    if t < 0:
        raise ParameterError(f"t must be non-negative, got {t}")
    m = _operator(affinity)
    n = m.shape[0]
    if t == 0:
        return CoherenceVector(np.ones(n), 0)
    if t == 1:
        if sparse.issparse(m):
            rho = np.asarray(m.multiply(m).sum(axis=1)).ravel()
        else:
            rho = np.einsum("ij,ij->i", m, m)
        return CoherenceVector(rho, 1)
    rho = np.empty(n)
    for start in range(0, n, block_size):
        cols = np.arange(start, min(start + block_size, n))
        block = _power_columns(m, cols, t)
        rho[cols] = np.einsum("ij,ij->j", block, block)
    return CoherenceVector(rho, t)


def verify_coherence_trace(eigs: EigenSystem, rho: CoherenceVector, ell: int) -> float:
    """Check the summed coherence-estimator identity and return the error.

    With mu_ell(x) the sum of the first ``ell`` squared eigenvector entries
    at x, orthogonality forces |sum_x mu_ell(x) - sum_x rho_t(x)| to equal
    |ell - sum_j lambda_j^(2t)|. Requires the full eigendecomposition.

    Raises
    ------
    VerificationError
        If the two sides differ by more than 1e-8.
    """
    n = eigs.n
    if eigs.k != n:
        raise ParameterError(
            f"full eigendecomposition required: got {eigs.k} of {n} eigenpairs"
        )
    if not 0 <= ell <= n:
        raise ParameterError(f"ell must lie in [0, n={n}], got {ell}")
    if rho.rho.shape != (n,):
        raise ParameterError("coherence vector does not match the eigensystem size")
    mu_total = float(np.sum(eigs.eigenvectors[:, :ell] ** 2))
    lhs = abs(mu_total - float(rho.rho.sum()))
    rhs = abs(ell - float(np.sum(eigs.eigenvalues ** (2 * rho.t))))
    if abs(lhs - rhs) > TRACE_IDENTITY_TOL:
        raise VerificationError(
            f"coherence trace identity violated: |sum mu - sum rho| = {lhs}, "
            f"|ell - sum lambda^2t| = {rhs}"
        )
    return lhs


def sample_centroids(
    rho: Union[CoherenceVector, np.ndarray],
    n_centroids: int,
    seed: int,
) -> np.ndarray:
    """Draw distinct centroid indices without replacement, biased by rho.

    Weighted reservoir scheme with exponential keys: index i receives key
    E_i / rho_i with E_i standard exponential, and the n_centroids smallest
    keys win. Deterministic given the seed; zero-weight points are never
    selected.
    """
    weights = rho.rho if isinstance(rho, CoherenceVector) else np.asarray(rho, dtype=np.float64)
    n = weights.shape[0]
    if not 1 <= n_centroids <= n:
        raise ParameterError(f"n_centroids must satisfy 1 <= n_centroids <= n={n}, got {n_centroids}")
    if np.any(weights < 0.0) or not np.all(np.isfinite(weights)):
        raise SamplingError("sampling weights must be finite and non-negative")
    positive = weights > 0.0
    if int(positive.sum()) < n_centroids:
        raise SamplingError(
            f"need at least {n_centroids} positive weights, got {int(positive.sum())}"
        )
    rng = np.random.default_rng(seed)
    keys = np.full(n, np.inf)
    keys[positive] = rng.exponential(size=n)[positive] / weights[positive]
    order = np.lexsort((np.arange(n), keys))
    return np.sort(order[:n_centroids])


def angular_scores(
    affinity: Union[AffinityOperator, Matrix],
    centroids: Sequence[int],
    t: int = 1,
) -> CentroidScoreMatrix:
    """Per-centroid columns of A^(2t) scaled by 1 / sqrt(centroid coherence).

    Costs 2t - 1 operator products applied to an n x n_centroids block.
    """
    if t < 1:
        raise ParameterError(f"t must be at least 1, got {t}")
    centroids = np.asarray(centroids, dtype=np.int64)
    if np.unique(centroids).shape[0] != centroids.shape[0]:
        raise ParameterError("centroid indices must be distinct")
    m = _operator(affinity)
    block = _power_columns(m, centroids, 2 * t)
    centroid_rho = block[centroids, np.arange(centroids.shape[0])].copy()
    if np.any(centroid_rho <= 0.0):
        raise DegeneracyError("a centroid has zero diffusion coherence")
    scores = block / np.sqrt(centroid_rho)[None, :]
    return CentroidScoreMatrix(scores, centroid_rho, centroids, t)


def _repair_empty_regions(labels: np.ndarray, scores: np.ndarray, centroids: np.ndarray) -> None:
    """Reassign the highest-affinity movable point to each empty region."""
    n_regions = centroids.shape[0]
    sizes = np.bincount(labels, minlength=n_regions)
    is_centroid = np.zeros(labels.shape[0], dtype=bool)
    is_centroid[centroids] = True
    for region in np.flatnonzero(sizes == 0):
        for point in np.argsort(-scores[:, region], kind="stable"):
            if not is_centroid[point] and sizes[labels[point]] > 1:
                sizes[labels[point]] -= 1
                labels[point] = region
                sizes[region] += 1
                break
        else:
            raise SamplingError(f"cannot repair empty region {region}")


def assign_partitions(
    scores: CentroidScoreMatrix,
    centroids: Optional[Sequence[int]] = None,
) -> Partition:
    """Assign each point to the centroid with the highest normalized score.

    Equivalent to minimizing the angular diffusion distance; ties resolve
    toward the lowest region index, and each centroid always lands in its
    own region.
    """
    if centroids is None:
        centroids = scores.centroids
    centroids = np.asarray(centroids, dtype=np.int64)
    if centroids.shape[0] != scores.scores.shape[1]:
        raise ParameterError("centroid list does not match the score matrix width")
    labels = np.argmax(scores.scores, axis=1).astype(np.int64)
    labels[centroids] = np.arange(centroids.shape[0])
    if np.any(np.bincount(labels, minlength=centroids.shape[0]) == 0):
        _repair_empty_regions(labels, scores.scores, centroids)
    return Partition.from_assignment(labels, centroids)


def partition_locality_diagnostic(
    affinity: Union[AffinityOperator, Matrix],
    partition: Partition,
) -> LocalityDiagnostic:
    """Per-region affinity-profile flatness and intra-region spread.

    For region j, ``profile_gap[j]`` is the largest deviation of a member's
    affinity profile from the region's mean profile, and
    ``max_intra_distance[j]`` the largest pairwise L2 distance between
    member profiles. Dense computation; intended as a test-scale
    diagnostic of partition quality.
    """
    a = to_dense(_operator(affinity))
    if partition.n != a.shape[0]:
        raise ParameterError("partition does not match the operator size")
    gap = np.zeros(partition.n_regions)
    spread = np.zeros(partition.n_regions)
    for region in range(partition.n_regions):
        rows = a[partition.assignment == region]
        gap[region] = float(np.max(np.abs(rows - rows.mean(axis=0))))
        if rows.shape[0] > 1:
            spread[region] = float(np.max(cdist(rows, rows)))
    return LocalityDiagnostic(profile_gap=gap, max_intra_distance=spread)
