"""Quantile neighbourhoods and symmetrised neighbourhood smoothing."""
from __future__ import annotations

import math

import numpy as np

from nbse.matrix import as_square


def default_bandwidth(n: int, C: float = 1.0) -> float:
    """``C * sqrt(log n / n)`` clamped into (0, 1]."""
    if n < 2:
        raise ValueError("bandwidth needs n >= 2")
    h = C * math.sqrt(math.log(n) / n)
    return min(max(h, np.finfo(float).tiny), 1.0)


def neighbourhoods(D, h: float) -> np.ndarray:
    """Boolean membership matrix ``W`` with ``W[i, j]`` true iff j is in N_i.

    The per-row threshold is the lower empirical h-quantile of the row's
    off-diagonal distances, i.e. its ceil(h * (n - 1))-th smallest value.
    Ties with the threshold are included.
    """
    D = as_square(D, "D")
    n = D.shape[0]
    if n < 2:
        raise ValueError("neighbourhoods need n >= 2")
    if not 0 < h <= 1:
        raise ValueError(f"quantile level must lie in (0, 1], got {h}")
    k = min(max(math.ceil(h * (n - 1)), 1), n - 1)
    off = D.astype(float, copy=True)
    np.fill_diagonal(off, np.inf)
    q = np.partition(off, k - 1, axis=1)[:, k - 1]
    W = off <= q[:, None]
    np.fill_diagonal(W, False)
    return W


def smooth(W: np.ndarray, M: np.ndarray) -> np.ndarray:
    """``(Pt + Pt.T) / 2`` with ``Pt[i, j]`` the mean of ``M[i', j]`` over i' in N_i."""
    sizes = W.sum(axis=1)
    if np.any(sizes == 0):
        raise ValueError("empty neighbourhood")
    Pt = (W.astype(float) @ M) / sizes[:, None]
    return (Pt + Pt.T) / 2


def nbs_estimate(A, D, h: float) -> np.ndarray:
    A = as_square(A, "A")
    D = as_square(D, "D")
    if A.shape != D.shape:
        raise ValueError(f"dimension mismatch: A is {A.shape}, D is {D.shape}")
    if A.shape[0] < 3:
        raise ValueError("smoothing needs n >= 3")
    return smooth(neighbourhoods(D, h), np.asarray(A, dtype=float))
