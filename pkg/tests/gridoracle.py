"""Brute-force grid oracles used by the tests.

These deliberately share no code with the package solvers: hull minima come
from exhaustive evaluation over a simplex grid of hull weights, streamed in
chunks so even fine grids stay within memory.
"""

import numpy as np


def _compositions_upto3(total):
    """All (a, b, c) >= 0 with a + b + c = total, as an (N, 3) int array."""
    counts = np.arange(total + 1, 0, -1)
    a = np.repeat(np.arange(total + 1), counts)
    b = np.concatenate([np.arange(total - aa + 1) for aa in range(total + 1)])
    c = total - a - b
    return np.stack([a, b, c], axis=1)


def simplex_grid_chunks(K, d):
    """Yield integer weight chunks (rows sum to K) covering the whole grid."""
    if d == 1:
        yield np.array([[K]], dtype=np.int64)
    elif d == 2:
        first = np.arange(K + 1)
        yield np.stack([first, K - first], axis=1)
    elif d == 3:
        yield _compositions_upto3(K)
    elif d == 4:
        for i in range(K + 1):
            rest = _compositions_upto3(K - i)
            col = np.full((rest.shape[0], 1), i, dtype=np.int64)
            yield np.hstack([col, rest])
    else:
        raise ValueError("grid oracle supports d <= 4")


def grid_hull_min(points, sigma, step):
    """argmin of g' sigma g over the hull-weight grid; returns (gamma, value)."""
    P = np.asarray(points, dtype=np.float64)
    d = P.shape[0]
    K = int(round(1.0 / step))
    Q = P @ np.asarray(sigma, dtype=np.float64) @ P.T
    best_val, best_w = np.inf, None
    for chunk in simplex_grid_chunks(K, d):
        W = chunk.astype(np.float64)
        vals = np.einsum("ni,ij,nj->n", W, Q, W)
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val = float(vals[i])
            best_w = W[i] / K
    return P.T @ best_w, best_val / (K * K)


def grid_pred_maximin(points, sigma, step):
    """argmin over the hull-weight grid of max_j R(gamma; b_j)."""
    P = np.asarray(points, dtype=np.float64)
    S = np.asarray(sigma, dtype=np.float64)
    d = P.shape[0]
    K = int(round(1.0 / step))
    best_val, best_gamma = np.inf, None
    for chunk in simplex_grid_chunks(K, d):
        W = chunk.astype(np.float64) / K
        gammas = W @ P
        worst = np.full(W.shape[0], -np.inf)
        for b in P:
            diff = gammas - b
            worst = np.maximum(worst, np.einsum("ni,ij,nj->n", diff, S, diff))
        i = int(np.argmin(worst))
        if worst[i] < best_val:
            best_val = float(worst[i])
            best_gamma = gammas[i].copy()
    return best_gamma, best_val


def random_support(rng, p=None, d=None, scale=1.25):
    """A random support set with a well-conditioned random Gram matrix."""
    from maximin.model import SupportSet

    if p is None:
        p = int(rng.integers(1, 4))
    if d is None:
        d = int(rng.integers(1, 5))
    points = scale * rng.uniform(-1.0, 1.0, size=(d, p))
    A = rng.standard_normal((p, p))
    sigma = A @ A.T / p + 0.3 * np.eye(p)
    return SupportSet(points=points, sigma=sigma)


def sigma_norm(v, sigma):
    v = np.asarray(v, dtype=np.float64)
    return float(np.sqrt(v @ sigma @ v))
