"""Pointwise kernels and their diffusion normalizations.

Builds Gaussian affinity kernels (dense or kNN-sparsified), the
inverse-density two-step kernel derived from them, and the standard
normalizations used by diffusion embeddings: row-stochastic transition
matrices and their symmetric conjugates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import sparse
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from .errors import DataError, DegeneracyError, ParameterError

Matrix = Union[np.ndarray, sparse.spmatrix]

# Neighbor count used by the bandwidth heuristic when none is supplied.
DEFAULT_EPSILON_NEIGHBORS = 10


def _row_sums(weights: Matrix) -> np.ndarray:
    if sparse.issparse(weights):
        return np.asarray(weights.sum(axis=1)).ravel()
    return weights.sum(axis=1)


def to_dense(weights: Matrix) -> np.ndarray:
    """Return ``weights`` as a dense float64 array."""
    if sparse.issparse(weights):
        return weights.toarray()
    return np.asarray(weights, dtype=np.float64)


def _symmetrized(m: Matrix) -> Matrix:
    if sparse.issparse(m):
        return ((m + m.T) * 0.5).tocsr()
    return (m + m.T) * 0.5


@dataclass(frozen=True, eq=False)
class DataMatrix:
    """n points in m ambient dimensions, one point per row."""

    values: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @classmethod
    def from_array(cls, values) -> "DataMatrix":
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 2:
            raise DataError(f"data must be a 2-d array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DataError(f"data must have at least one row and column, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DataError("data contains non-finite entries")
        return cls(np.ascontiguousarray(arr))


def as_data_matrix(data) -> DataMatrix:
    """Coerce an array-like or DataMatrix into a validated DataMatrix."""
    if isinstance(data, DataMatrix):
        return data
    return DataMatrix.from_array(data)


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """Symmetric non-negative point-to-point affinities.

    ``weights`` is dense for full kernels and CSR sparse for kNN-thresholded
    ones. ``epsilon`` is the squared-distance bandwidth of the underlying
    Gaussian; ``neighbors`` records the per-row retention count when the
    kernel was thresholded.
    """

    weights: Matrix
    epsilon: float
    neighbors: Optional[int] = None

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sparse.issparse(self.weights)

    def dense(self) -> np.ndarray:
        return to_dense(self.weights)


@dataclass(frozen=True, eq=False)
class AffinityOperator:
    """Symmetric conjugate of the row-stochastic transition matrix.

    ``matrix`` equals diag(q)^(-1/2) . W . diag(q)^(-1/2); it shares its
    spectrum with the transition matrix and is exactly symmetric.
    """

    matrix: Matrix
    degrees: np.ndarray

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        return to_dense(self.matrix)


def suggest_epsilon(data, neighbors: Optional[int] = None) -> float:
    """Adaptive bandwidth: mean squared distance to the ceil(neighbors/2)-th
    nearest neighbor (self excluded).

    Used when no explicit bandwidth is supplied; ``neighbors`` defaults to
    ``DEFAULT_EPSILON_NEIGHBORS``.
    """
    x = as_data_matrix(data).values
    n = x.shape[0]
    if n == 1:
        return 1.0
    count = neighbors if neighbors is not None else DEFAULT_EPSILON_NEIGHBORS
    if count < 1:
        raise ParameterError(f"neighbors must be positive, got {count}")
    rank = min(math.ceil(count / 2), n - 1)
    tree = cKDTree(x)
    dist, _ = tree.query(x, k=rank + 1)
    eps = float(np.mean(dist[:, rank] ** 2))
    if eps <= 0.0:
        # All points within the rank-th neighborhood coincide.
        raise DegeneracyError("bandwidth heuristic found zero neighbor distances; supply epsilon")
    return eps


def _knn_gaussian(x: np.ndarray, epsilon: float, neighbors: int) -> sparse.csr_matrix:
    n = x.shape[0]
    tree = cKDTree(x)
    dist, idx = tree.query(x, k=neighbors + 1)
    rows = np.repeat(np.arange(n), neighbors + 1)
    cols = idx.ravel()
    keep = np.ones(idx.shape, dtype=bool)
    self_hits = idx == np.arange(n)[:, None]
    keep[self_hits] = False
    # A duplicate point can shadow the self match; drop the farthest entry
    # instead so each row retains exactly `neighbors` off-diagonal values.
    no_self = ~self_hits.any(axis=1)
    keep[no_self, -1] = False
    vals = np.exp(-(dist.ravel()[keep.ravel()] ** 2) / epsilon)
    w = sparse.coo_matrix(
        (vals, (rows[keep.ravel()], cols[keep.ravel()])), shape=(n, n)
    ).tocsr()
    w = w.maximum(w.T)
    w = (w + sparse.identity(n, format="csr")).tocsr()
    # Duplicate points produce off-diagonal weights of exactly 1; cap after
    # the diagonal addition so stored entries stay in [0, 1].
    w.data = np.minimum(w.data, 1.0)
    w.sort_indices()
    return w


def build_gaussian_kernel(
    data,
    epsilon: Optional[float] = None,
    neighbors: Optional[int] = None,
) -> KernelMatrix:
    """Gaussian kernel w[i, j] = exp(-|x_i - x_j|^2 / epsilon).

    With ``neighbors`` given, each row keeps its ``neighbors`` largest
    off-diagonal entries plus the diagonal, and the result is symmetrized
    by the entrywise maximum; the matrix is then stored sparse.

    Parameters
    ----------
    data : array-like or DataMatrix, shape (n, m)
    epsilon : float, optional
        Squared-distance bandwidth. Chosen by ``suggest_epsilon`` if omitted.
    neighbors : int, optional
        Per-row retention count; must satisfy 1 <= neighbors < n.
    """
    dm = as_data_matrix(data)
    x = dm.values
    n = x.shape[0]
    if epsilon is None:
        epsilon = suggest_epsilon(dm, neighbors)
    epsilon = float(epsilon)
    if not math.isfinite(epsilon) or epsilon <= 0.0:
        raise ParameterError(f"epsilon must be a positive real, got {epsilon}")
    if neighbors is not None:
        if not 1 <= neighbors < n:
            raise ParameterError(f"neighbors must satisfy 1 <= neighbors < n={n}, got {neighbors}")
        return KernelMatrix(_knn_gaussian(x, epsilon, neighbors), epsilon, neighbors)

    w = cdist(x, x, "sqeuclidean")
    np.divide(w, -epsilon, out=w)
    np.exp(w, out=w)
    return KernelMatrix(w, epsilon, None)


def degrees(kernel: KernelMatrix) -> np.ndarray:
    """Row sums of the kernel; the discrete density proxy q."""
    q = _row_sums(kernel.weights)
    if np.any(q <= 0.0):
        raise DegeneracyError("kernel has a row with no positive entry")
    return q


def _two_step_product(b: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Symmetric product b^T . diag(1/q) . b for column-aggregated kernels."""
    out = b.T @ (b / q[:, None])
    return (out + out.T) * 0.5


def build_idmgc_kernel(gaussian: KernelMatrix, q: Optional[np.ndarray] = None) -> KernelMatrix:
    """Inverse-density two-step kernel K = G . diag(1/q) . G.

    Correlates Gaussian affinities through intermediate points weighted by
    inverse density, which cancels sampling-density variation. Row sums of
    K equal the Gaussian degrees q, and row-normalizing K reproduces the
    two-step transition matrix P^2.
    """
    if q is None:
        q = degrees(gaussian)
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (gaussian.n,):
        raise ParameterError(f"degree vector has shape {q.shape}, expected ({gaussian.n},)")
    if np.any(q <= 0.0):
        raise DegeneracyError("degree vector must be strictly positive")
    w = gaussian.weights
    if sparse.issparse(w):
        k = (w @ sparse.diags(1.0 / q) @ w).tocsr()
        k = _symmetrized(k)
    else:
        k = _two_step_product(w, q)
    return KernelMatrix(k, gaussian.epsilon, None)


def markov_normalize(kernel: KernelMatrix) -> Matrix:
    """Row-stochastic transition matrix P = diag(q)^(-1) . W."""
    q = _row_sums(kernel.weights)
    if np.any(q <= 0.0):
        raise DegeneracyError("cannot normalize a kernel with zero row sums")
    if kernel.is_sparse:
        return (sparse.diags(1.0 / q) @ kernel.weights).tocsr()
    return kernel.weights / q[:, None]


def symmetric_affinity(kernel: KernelMatrix, q: Optional[np.ndarray] = None) -> AffinityOperator:
    """Symmetric conjugate diag(q)^(-1/2) . W . diag(q)^(-1/2).

    Shares its eigenvalues with ``markov_normalize(kernel)``; an eigenvector
    psi of the conjugate corresponds to the transition-matrix eigenvector
    psi / sqrt(q).
    """
    if q is None:
        q = degrees(kernel)
    q = np.asarray(q, dtype=np.float64)
    if np.any(q <= 0.0):
        raise DegeneracyError("degree vector must be strictly positive")
    s = 1.0 / np.sqrt(q)
    if kernel.is_sparse:
        a = (sparse.diags(s) @ kernel.weights @ sparse.diags(s)).tocsr()
    else:
        a = kernel.weights * s[:, None]
        a *= s[None, :]
    return AffinityOperator(_symmetrized(a), q)
