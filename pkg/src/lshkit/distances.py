"""Distance kernels shared by the exact scan and both LSH indexes.

All math runs in float64 on float32 inputs and avoids BLAS reductions, so a
vector compared against a bit-identical copy of itself always comes out at
distance exactly 0.0, regardless of whether it is processed alone or inside
a batch.
"""

from __future__ import annotations

import numpy as np

METRICS = ("cosine", "euclidean")


def check_metric(metric: str) -> str:
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}, expected one of {METRICS}")
    return metric


def as_query(q, dim: int) -> np.ndarray:
    """Validate a query vector and quantize it to the stored float32 precision."""
    arr = np.asarray(q, dtype=np.float32).reshape(-1)
    if arr.shape != (dim,):
        raise ValueError(f"query has length {arr.shape[0]}, index dimensionality is {dim}")
    if not np.isfinite(arr).all():
        raise ValueError("query contains non-finite values")
    return arr


def normalize_rows(matrix: np.ndarray) -> np.ndarray:
    """L2-normalize rows in float64; all-zero rows stay zero."""
    m = np.asarray(matrix, dtype=np.float64)
    norms = np.sqrt((m * m).sum(axis=1))
    out = np.zeros_like(m)
    nonzero = norms > 0
    out[nonzero] = m[nonzero] / norms[nonzero, None]
    return out


def euclidean_distances(matrix: np.ndarray, q: np.ndarray) -> np.ndarray:
    m = np.asarray(matrix, dtype=np.float64)
    diff = m - np.asarray(q, dtype=np.float64)
    return np.sqrt((diff * diff).sum(axis=1))


def cosine_distances(matrix: np.ndarray, q: np.ndarray) -> np.ndarray:
    """1 - cosine similarity, computed as half the squared distance of the
    normalized vectors. Any comparison involving an all-zero vector is
    defined as distance 1 (maximal dissimilarity short of opposition)."""
    m = np.asarray(matrix, dtype=np.float64)
    mn = normalize_rows(m)
    qn = normalize_rows(np.asarray(q, dtype=np.float64).reshape(1, -1))[0]
    diff = mn - qn
    dists = 0.5 * (diff * diff).sum(axis=1)
    row_zero = ~mn.any(axis=1)
    if not qn.any():
        dists[:] = 1.0
    else:
        dists[row_zero] = 1.0
    return dists


def distances_to(matrix: np.ndarray, q: np.ndarray, metric: str) -> np.ndarray:
    check_metric(metric)
    if metric == "euclidean":
        return euclidean_distances(matrix, q)
    return cosine_distances(matrix, q)


def rank_top_k(ids: np.ndarray, dists: np.ndarray, k: int) -> list[tuple[int, float]]:
    """Ascending by distance, ties by ascending id, truncated to k results."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    order = np.lexsort((ids, dists))[:k]
    return [(int(ids[i]), float(dists[i])) for i in order]
