"""Diffusion-coordinate embeddings: exact, region-compressed, interpolated,
and the component-matching machinery used to score competing embeddings."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .compress import CompressedOperators
from .eigen import EigenSystem, eigendecompose
from .errors import ParameterError, SpectrumError
from .kernels import _symmetrized

LAMBDA0_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class Embedding:
    """Diffusion coordinates for points or regions.

    Column j holds lambda_j^t * phi_j with the trivial constant component
    excluded; ``eigenvalues`` stores the matching lambda_1..lambda_k.
    """

    coordinates: np.ndarray
    eigenvalues: np.ndarray
    t: float
    subject: str  # "points" | "regions"

    @property
    def count(self) -> int:
        return self.coordinates.shape[0]

    @property
    def k(self) -> int:
        return self.coordinates.shape[1]


@dataclass(frozen=True, eq=False)
class AlignmentReport:
    """Optimal component matching between two embeddings.

    ``permutation[j]`` is the candidate component matched to reference
    component j and ``signs[j]`` its orientation; per-point errors are
    squared Euclidean distances between matched rows.
    """

    permutation: np.ndarray
    signs: np.ndarray
    per_point_error: np.ndarray
    total_sse: float
    total_mse: float
    excluded_components: List[str] = field(default_factory=list)


def _eigenvalue_power(values: np.ndarray, t: float) -> np.ndarray:
    # Negative eigenvalues under fractional t: scale magnitudes, keep signs.
    if float(t).is_integer():
        return values ** int(t)
    return np.sign(values) * np.abs(values) ** t


def _map_from_eigensystem(
    eigs: EigenSystem, weights: np.ndarray, t: float, k: int, subject: str
) -> Embedding:
    if k < 1:
        raise ParameterError(f"k must be positive, got {k}")
    if eigs.k < k + 1:
        raise ParameterError(
            f"need {k + 1} eigenpairs for a {k}-component map, got {eigs.k}"
        )
    if abs(eigs.eigenvalues[0] - 1.0) > LAMBDA0_TOL:
        raise SpectrumError(
            f"leading eigenvalue {eigs.eigenvalues[0]} is not 1; "
            "the kernel is disconnected or not properly normalized"
        )
    phi = eigs.eigenvectors[:, : k + 1] / np.sqrt(weights)[:, None]
    norms = np.sqrt(np.sum(weights[:, None] * phi**2, axis=0))
    phi /= norms[None, :]
    lam = eigs.eigenvalues[1 : k + 1]
    coords = phi[:, 1:] * _eigenvalue_power(lam, t)[None, :]
    return Embedding(coords, lam.copy(), float(t), subject)


def diffusion_map(eigs: EigenSystem, q: np.ndarray, t: float, k: int) -> Embedding:
    """Pointwise diffusion map from the affinity eigensystem.

    Converts each affinity eigenvector psi_j to the transition-matrix
    eigenvector phi_j = psi_j / sqrt(q), normalized to unit q-weighted
    norm, and scales by lambda_j^t. The constant component is dropped.
    """
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (eigs.n,):
        raise ParameterError(f"degree vector has shape {q.shape}, expected ({eigs.n},)")
    return _map_from_eigensystem(eigs, q, t, k, "points")


def compressed_diffusion_map(ops: CompressedOperators, t: float, k: int) -> Embedding:
    """Diffusion map of the regions under the compressed kernel."""
    n_regions = ops.n_regions
    if k + 1 > n_regions:
        raise ParameterError(
            f"k={k} components require at least k+1={k + 1} regions, got {n_regions}"
        )
    s = 1.0 / np.sqrt(ops.degrees)
    affinity = _symmetrized(ops.kernel * s[:, None] * s[None, :])
    eigs = eigendecompose(affinity, k + 1)
    return _map_from_eigensystem(eigs, ops.degrees, t, k, "regions")


def interpolate_embedding(region_embedding: Embedding, interp: np.ndarray) -> Embedding:
    """Map region coordinates to points through row-stochastic weights."""
    if region_embedding.subject != "regions":
        raise ParameterError("interpolation expects a region-level embedding")
    interp = np.asarray(interp, dtype=np.float64)
    if interp.ndim != 2 or interp.shape[1] != region_embedding.count:
        raise ParameterError(
            f"interpolation matrix shape {interp.shape} does not match "
            f"{region_embedding.count} regions"
        )
    if np.any(np.abs(interp.sum(axis=1) - 1.0) > 1e-8):
        raise ParameterError("interpolation weights must be row-stochastic")
    coords = interp @ region_embedding.coordinates
    return Embedding(coords, region_embedding.eigenvalues.copy(), region_embedding.t, "points")


def _correlation_matrix(ref: np.ndarray, cand: np.ndarray) -> Tuple[np.ndarray, List[str]]:
    excluded: List[str] = []
    rc = ref - ref.mean(axis=0)
    cc = cand - cand.mean(axis=0)
    rn = np.linalg.norm(rc, axis=0)
    cn = np.linalg.norm(cc, axis=0)
    for j in np.flatnonzero(rn == 0.0):
        excluded.append(f"reference component {j} has zero variance")
    for j in np.flatnonzero(cn == 0.0):
        excluded.append(f"candidate component {j} has zero variance")
    denom = np.outer(np.where(rn == 0.0, 1.0, rn), np.where(cn == 0.0, 1.0, cn))
    corr = (rc.T @ cc) / denom
    corr[rn == 0.0, :] = 0.0
    corr[:, cn == 0.0] = 0.0
    return corr, excluded


def align_embeddings(reference: Embedding, candidate: Embedding) -> Tuple[AlignmentReport, Embedding]:
    """Match candidate components to the reference and score the residual.

    Components are paired one-to-one by maximal absolute Pearson
    correlation (Hungarian assignment); each matched component takes the
    correlation's sign. Zero-variance components are excluded from the
    correlation and flagged in the report.
    """
    if reference.count != candidate.count:
        raise ParameterError(
            f"subject counts differ: {reference.count} vs {candidate.count}"
        )
    if candidate.k < reference.k:
        raise ParameterError(
            f"candidate has {candidate.k} components but the reference needs {reference.k}"
        )
    corr, excluded = _correlation_matrix(reference.coordinates, candidate.coordinates)
    rows, cols = linear_sum_assignment(-np.abs(corr))
    permutation = cols[np.argsort(rows)]
    signs = np.sign(corr[np.arange(reference.k), permutation])
    signs[signs == 0.0] = 1.0
    aligned_coords = candidate.coordinates[:, permutation] * signs[None, :]
    diff = reference.coordinates - aligned_coords
    per_point = np.einsum("ij,ij->i", diff, diff)
    report = AlignmentReport(
        permutation=permutation,
        signs=signs,
        per_point_error=per_point,
        total_sse=float(per_point.sum()),
        total_mse=float(per_point.mean()),
        excluded_components=excluded,
    )
    aligned = Embedding(
        aligned_coords,
        candidate.eigenvalues[permutation].copy(),
        candidate.t,
        candidate.subject,
    )
    return report, aligned
