"""Competing landmark approximations of the pointwise diffusion map.

Two fixed constructions used for head-to-head evaluation:

* centroid interpolation: an exact diffusion map on k-means centroids,
  extended to every point by normalized Gaussian weights;
* volume-weighted Nystrom: the affinity eigenproblem solved on centroids
  with cluster-cardinality quadrature weights, extended through the
  affinity rows and divided by the eigenvalues.

Both consume the same kernel bandwidth as the method under test so that
comparisons isolate the approximation strategy.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from .eigen import eigendecompose
from .embedding import Embedding, _eigenvalue_power, _map_from_eigensystem
from .errors import DegeneracyError, ParameterError, SpectrumError
from .kernels import as_data_matrix, build_gaussian_kernel, degrees, suggest_epsilon, symmetric_affinity

KMEANS_MAX_ITER = 100
NYSTROM_EIGENVALUE_FLOOR = 1e-10


@dataclass(frozen=True)
class BaselineConfig:
    """Parameters shared by both baseline approximations.

    ``method`` is informational ("centroid-interp" or "nystrom"); dispatch
    happens at the call site. ``neighbors`` sparsifies the landmark kernel
    when it is smaller than the landmark count.
    """

    n_landmarks: int
    epsilon: Optional[float] = None
    neighbors: Optional[int] = None
    t: float = 1.0
    k: int = 2
    seed: int = 0
    method: str = ""
    uniform_volumes: bool = False  # Nystrom only: ignore cluster cardinalities.

    def landmark_neighbors(self) -> Optional[int]:
        if self.neighbors is not None and self.neighbors < self.n_landmarks:
            return self.neighbors
        return None


def cluster_landmarks(
    data, n_clusters: int, seed: int, max_iter: int = KMEANS_MAX_ITER
) -> Tuple[np.ndarray, np.ndarray]:
    """Lloyd's k-means with k-means++ seeding; returns (centers, labels).

    Deterministic given the seed. An emptied cluster is re-seeded at the
    point farthest from its assigned center.
    """
    x = as_data_matrix(data).values
    n = x.shape[0]
    if not 1 <= n_clusters <= n:
        raise ParameterError(f"n_clusters must satisfy 1 <= n_clusters <= n={n}, got {n_clusters}")
    rng = np.random.default_rng(seed)

    centers = np.empty((n_clusters, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    closest = cdist(x, centers[:1], "sqeuclidean").ravel()
    for j in range(1, n_clusters):
        total = closest.sum()
        if total > 0.0:
            pick = rng.choice(n, p=closest / total)
        else:  # remaining points coincide with chosen centers
            pick = int(rng.integers(n))
        centers[j] = x[pick]
        closest = np.minimum(closest, cdist(x, centers[j : j + 1], "sqeuclidean").ravel())

    labels = np.argmin(cdist(x, centers, "sqeuclidean"), axis=1)
    for _ in range(max_iter):
        for j in range(n_clusters):
            members = labels == j
            if members.any():
                centers[j] = x[members].mean(axis=0)
            else:
                dist_to_own = cdist(x, centers, "sqeuclidean")[np.arange(n), labels]
                centers[j] = x[np.argmax(dist_to_own)]
        new_labels = np.argmin(cdist(x, centers, "sqeuclidean"), axis=1)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return centers, labels


def _resolve_epsilon(x: np.ndarray, cfg: BaselineConfig) -> float:
    return cfg.epsilon if cfg.epsilon is not None else suggest_epsilon(x)


def _landmark_weights(x: np.ndarray, centers: np.ndarray, epsilon: float) -> np.ndarray:
    """Row-normalized Gaussian weights from points to landmarks.

    Points coinciding exactly with a landmark take that landmark's value
    (nodal reproduction), mirroring inverse-distance interpolants.
    """
    d2 = cdist(x, centers, "sqeuclidean")
    w = np.exp(-d2 / epsilon)
    hits = d2.min(axis=1) == 0.0
    if hits.any():
        w[hits] = 0.0
        w[hits, np.argmin(d2[hits], axis=1)] = 1.0
    totals = w.sum(axis=1)
    if np.any(totals <= 0.0):
        raise DegeneracyError("a point has no Gaussian affinity to any landmark")
    return w / totals[:, None]


def centroid_interp_dm(
    data, cfg: BaselineConfig, clusters: Optional[Tuple[np.ndarray, np.ndarray]] = None
) -> Embedding:
    """Exact diffusion map on k-means centroids, linearly interpolated to
    every point by normalized Gaussian weights at the shared bandwidth."""
    x = as_data_matrix(data).values
    if cfg.k + 1 > cfg.n_landmarks:
        raise ParameterError(
            f"k={cfg.k} components require at least k+1={cfg.k + 1} landmarks, "
            f"got {cfg.n_landmarks}"
        )
    epsilon = _resolve_epsilon(x, cfg)
    centers, _ = clusters if clusters is not None else cluster_landmarks(x, cfg.n_landmarks, cfg.seed)
    kernel = build_gaussian_kernel(centers, epsilon, cfg.landmark_neighbors())
    q = degrees(kernel)
    eigs = eigendecompose(symmetric_affinity(kernel, q), cfg.k + 1)
    landmark_map = _map_from_eigensystem(eigs, q, cfg.t, cfg.k, "points")
    weights = _landmark_weights(x, centers, epsilon)
    return Embedding(weights @ landmark_map.coordinates, landmark_map.eigenvalues, cfg.t, "points")


def _nystrom_system(
    x: np.ndarray,
    centers: np.ndarray,
    volumes: np.ndarray,
    epsilon: float,
    n_pairs: int,
    neighbors: Optional[int] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Volume-weighted landmark eigensystem extended to all points.

    Solves the symmetrized quadrature eigenproblem
    diag(v)^(1/2) . a . diag(v)^(1/2) on the landmarks, then evaluates each
    eigenfunction at every point via
    psi_j(x) = (1/lambda_j) * sum_i v_i a(x, l_i) psi_j(l_i) and converts
    to transition-matrix coordinates by dividing by sqrt of the estimated
    degree at x. Returns (eigenvalues, per-point phi columns).
    """
    gl = build_gaussian_kernel(centers, epsilon, neighbors).dense()
    ql = gl @ volumes
    if np.any(ql <= 0.0):
        raise DegeneracyError("a landmark has zero volume-weighted degree")
    al = gl / np.sqrt(np.outer(ql, ql))
    scaled = al * np.sqrt(np.outer(volumes, volumes))
    eigs = eigendecompose((scaled + scaled.T) * 0.5, n_pairs)
    if abs(eigs.eigenvalues[0] - 1.0) > 1e-6:
        raise SpectrumError(
            f"landmark system has leading eigenvalue {eigs.eigenvalues[0]}, expected 1"
        )
    lam = eigs.eigenvalues
    keep = np.abs(lam) >= NYSTROM_EIGENVALUE_FLOOR
    if not keep.all():
        warnings.warn(
            f"dropping {int((~keep).sum())} Nystrom components with |lambda| < "
            f"{NYSTROM_EIGENVALUE_FLOOR}; the extension divides by lambda",
            RuntimeWarning,
            stacklevel=3,
        )
        lam = lam[keep]
    psi_nodes = eigs.eigenvectors[:, keep] / np.sqrt(volumes)[:, None]

    gx = np.exp(-cdist(x, centers, "sqeuclidean") / epsilon)
    q_hat = gx @ volumes
    if np.any(q_hat <= 0.0):
        raise DegeneracyError("a point has zero volume-weighted degree estimate")
    # a(x, l_i) v_i summed against node values, then /lambda and /sqrt(q_hat)
    # twice: once from a(x, .), once converting psi to phi.
    phi = (gx * (volumes / np.sqrt(ql))[None, :]) @ psi_nodes
    phi /= q_hat[:, None]
    phi /= lam[None, :]
    return lam, phi


def nystrom_dm(
    data, cfg: BaselineConfig, clusters: Optional[Tuple[np.ndarray, np.ndarray]] = None
) -> Embedding:
    """Volume-weighted Nystrom extension of the landmark diffusion map."""
    x = as_data_matrix(data).values
    if cfg.k + 1 > cfg.n_landmarks:
        raise ParameterError(
            f"k={cfg.k} components require at least k+1={cfg.k + 1} landmarks, "
            f"got {cfg.n_landmarks}"
        )
    epsilon = _resolve_epsilon(x, cfg)
    centers, labels = clusters if clusters is not None else cluster_landmarks(x, cfg.n_landmarks, cfg.seed)
    if cfg.uniform_volumes:
        volumes = np.ones(centers.shape[0])
    else:
        volumes = np.bincount(labels, minlength=centers.shape[0]).astype(np.float64)
        volumes = np.maximum(volumes, 1.0)  # a re-seeded empty cluster still counts itself
    lam, phi = _nystrom_system(x, centers, volumes, epsilon, cfg.k + 1, cfg.landmark_neighbors())
    coords = phi[:, 1:] * _eigenvalue_power(lam[1:], cfg.t)[None, :]
    return Embedding(coords, lam[1:].copy(), cfg.t, "points")
