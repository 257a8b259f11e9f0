"""Reference estimators run directly on the zero-filled observed matrix."""
from __future__ import annotations

import numpy as np

from nbse.distance import dist_matrix
from nbse.matrix import as_square
from nbse.smoothing import default_bandwidth, nbs_estimate


def nbs_vanilla(A_obs, C: float = 1.0) -> np.ndarray:
    """Neighbourhood smoothing that treats the zero-filled matrix as the whole graph."""
    A_obs = as_square(A_obs, "A_obs")
    n = A_obs.shape[0]
    return nbs_estimate(A_obs, dist_matrix(A_obs), default_bandwidth(n, C))


def usvt(A_obs, eta: float = 0.01, observed=None) -> np.ndarray:
    """Universal singular value thresholding.

    Keeps the singular values of ``A_obs`` above ``(2 + eta) * sqrt(n * p)``,
    where ``p`` is the edge density over observed off-diagonal pairs (all
    pairs when ``observed`` is None), then clips the reconstruction to [0, 1].
    ``A_obs`` is symmetric, so singular values are the absolute eigenvalues
    and the reconstruction keeps the matching signed eigenpairs.
    """
    A = np.asarray(as_square(A_obs, "A_obs"), dtype=float)
    n = A.shape[0]
    if n < 2:
        raise ValueError("USVT needs n >= 2")
    off = ~np.eye(n, dtype=bool)
    if observed is not None:
        off &= np.asarray(observed, dtype=bool)
    pairs = off.sum()
    p = A[off].sum() / pairs if pairs else 0.0
    if p == 0:
        return np.zeros((n, n))
    threshold = (2 + eta) * np.sqrt(n * p)
    vals, vecs = np.linalg.eigh((A + A.T) / 2)
    keep = np.abs(vals) > threshold
    if not keep.any():
        return np.zeros((n, n))
    V = vecs[:, keep]
    est = (V * vals[keep]) @ V.T
    est = np.clip(est, 0.0, 1.0)
    return (est + est.T) / 2
