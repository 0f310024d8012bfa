"""Independent oracles used to freeze expected values.

Everything here is deliberately written against plain numpy / python
loops, not the library code paths under test.
"""

import itertools
import math

import numpy as np


def random_points(seed, n, m=3, scale=1.0):
    rng = np.random.default_rng(seed)
    return rng.normal(0.0, scale, (n, m))


def gaussian_kernel_loops(x, epsilon):
    n = x.shape[0]
    out = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            d2 = float(np.sum((x[i] - x[j]) ** 2))
            out[i, j] = math.exp(-d2 / epsilon)
    return out


def row_sums_loops(w):
    n = w.shape[0]
    out = np.zeros(n)
    for i in range(n):
        for j in range(n):
            out[i] += w[i, j]
    return out


def idmgc_loops(g, q):
    n = g.shape[0]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            out[i, j] = sum(g[i, r] * g[r, j] / q[r] for r in range(n))
    return out


def knn_threshold_oracle(dense_kernel, neighbors):
    """Per-row top-`neighbors` off-diagonal entries plus the diagonal,
    then entrywise-max symmetrization."""
    n = dense_kernel.shape[0]
    kept = np.zeros_like(dense_kernel)
    for i in range(n):
        row = dense_kernel[i].copy()
        row[i] = -np.inf
        top = np.argsort(-row, kind="stable")[:neighbors]
        kept[i, top] = dense_kernel[i, top]
        kept[i, i] = dense_kernel[i, i]
    return np.maximum(kept, kept.T)


def block_sum_loops(kernel, assignment, n_regions):
    out = np.zeros((n_regions, n_regions))
    n = kernel.shape[0]
    for x in range(n):
        for y in range(n):
            out[assignment[x], assignment[y]] += kernel[x, y]
    return out


def dense_affinity(x, epsilon):
    """Gaussian kernel, degrees, and symmetric affinity via plain numpy."""
    d2 = ((x[:, None, :] - x[None, :, :]) ** 2).sum(-1)
    g = np.exp(-d2 / epsilon)
    q = g.sum(axis=1)
    a = g / np.sqrt(np.outer(q, q))
    return g, q, (a + a.T) / 2


def full_eigh_by_magnitude(a):
    """All eigenpairs of a symmetric matrix, sorted by descending |lambda|."""
    values, vectors = np.linalg.eigh(a)
    order = np.argsort(-np.abs(values), kind="stable")
    return values[order], vectors[:, order]


def map_from_kernel_oracle(kernel, q, t, k):
    """Diffusion coordinates of a kernel: eigh of the symmetric conjugate,
    conjugate back by 1/sqrt(q), scale by lambda^t, drop the constant."""
    a = kernel / np.sqrt(np.outer(q, q))
    values, vectors = full_eigh_by_magnitude((a + a.T) / 2)
    phi = vectors / np.sqrt(q)[:, None]
    lam = values[1 : k + 1]
    return phi[:, 1 : k + 1] * np.sign(lam) * np.abs(lam) ** t, values


def two_step_map_oracle(x, epsilon, t, k):
    """Pointwise map of the density-normalized two-step kernel."""
    g, q, _ = dense_affinity(x, epsilon)
    kernel = g @ np.diag(1.0 / q) @ g
    return map_from_kernel_oracle(kernel, q, t, k)


def exact_map_oracle(x, epsilon, t, k):
    g, q, _ = dense_affinity(x, epsilon)
    return map_from_kernel_oracle(g, q, t, k)


def exhaustive_alignment_sse(reference, candidate):
    """Minimum SSE over every component permutation and sign flip (k <= 6).

    The optimal sign of a matched pair is independent of the permutation,
    so signs are resolved per pair before the permutation search.
    """
    k = reference.shape[1]
    assert k <= 6, "exhaustive search is only tractable for k <= 6"
    pair_cost = np.empty((k, candidate.shape[1]))
    for i in range(k):
        for j in range(candidate.shape[1]):
            plus = float(np.sum((reference[:, i] - candidate[:, j]) ** 2))
            minus = float(np.sum((reference[:, i] + candidate[:, j]) ** 2))
            pair_cost[i, j] = min(plus, minus)
    best = np.inf
    for perm in itertools.permutations(range(candidate.shape[1]), k):
        best = min(best, float(sum(pair_cost[i, perm[i]] for i in range(k))))
    return best


def angular_distance_oracle(a, t, x, y):
    """arccos of the normalized 2t-step affinity between points x and y,
    computed from a dense matrix power."""
    power = np.linalg.matrix_power(a, 2 * t)
    value = power[x, y] / math.sqrt(power[x, x] * power[y, y])
    return math.acos(min(1.0, max(-1.0, value)))


def profile_distance_oracle(a, t, x, y):
    """Squared distance between coherence-normalized t-step profiles."""
    power = np.linalg.matrix_power(a, t)
    px = power[x] / np.linalg.norm(power[x])
    py = power[y] / np.linalg.norm(power[y])
    return float(np.sum((px - py) ** 2))
