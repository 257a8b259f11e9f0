"""Row-profile distance between vertices of an adjacency matrix.

For vertices i, i' of an n-vertex graph,

    d(i, i') = sqrt( max_{k != i, i'} <A_i - A_i', A_k> / n )

The signed inner product is taken in both orders so the matrix is symmetric,
which is the same as maximising its absolute value.  Negative maxima cannot
occur after that, but the result is still clamped at zero before the root.
"""
from __future__ import annotations

from typing import List

import numpy as np

from nbse.cover import Cover
from nbse.matrix import as_square, submatrix

# rows processed per vectorised chunk; bounds peak memory at CHUNK * n * n floats
_CHUNK = 8


def dist_matrix(A) -> np.ndarray:
    A = as_square(A, "A")
    n = A.shape[0]
    if n < 3:
        raise ValueError(f"distance needs n >= 3, got n={n}")
    A = np.asarray(A, dtype=float)
    # entries are small integers, so the product is exact in any summation order
    S = A @ A
    D2 = np.zeros((n, n))
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        rows = np.arange(lo, hi)
        cols = np.arange(lo, n)
        # diff[r, c, k] = |<A_i - A_i', A_k>| for i = rows[r], i' = cols[c]
        diff = np.abs(S[rows, None, :] - S[None, lo:, :])
        diff[np.arange(rows.size), :, rows] = -np.inf    # k == i
        diff[:, np.arange(cols.size), cols] = -np.inf    # k == i'
        D2[lo:hi, lo:] = diff.max(axis=2)
    D2 = np.triu(D2, 1)
    D2 = D2 + D2.T
    return np.sqrt(np.maximum(D2, 0.0) / n)


def dist_for_blocks(A_obs, cover: Cover) -> List[np.ndarray]:
    """Distance matrix of every block's induced subgraph, rows in sorted vertex order."""
    out = []
    for t, block in enumerate(cover.blocks):
        if block.size < 3:
            raise ValueError(f"block {t + 1} has {block.size} vertices; distances need at least 3")
        out.append(dist_matrix(submatrix(A_obs, block)))
    return out
