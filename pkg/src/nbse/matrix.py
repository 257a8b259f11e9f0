"""Dense symmetric matrices: masking, sub-selection and the estimation error.

Matrices are plain ``numpy.ndarray`` objects of shape ``(n, n)``. Vertex
indices are 0-based inside the library; 1-based ids only appear in files.
"""
from __future__ import annotations

import numpy as np


def as_square(M, name: str = "matrix") -> np.ndarray:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    return M


def is_symmetric(M: np.ndarray, atol: float = 0.0) -> bool:
    M = as_square(M)
    if atol == 0.0:
        return bool(np.array_equal(M, M.T))
    return bool(np.allclose(M, M.T, rtol=0.0, atol=atol))


def mask_observed(A, observed) -> np.ndarray:
    """Zero-fill every pair of ``A`` that is not in the observed set."""
    A = as_square(A, "A")
    observed = as_square(observed, "observed").astype(bool, copy=False)
    if A.shape != observed.shape:
        raise ValueError(f"dimension mismatch: A is {A.shape}, observed set is {observed.shape}")
    return np.where(observed, A, 0).astype(A.dtype, copy=False)


def frobenius_error(Phat, P) -> float:
    """Return ``||Phat - P||_F / n``, diagonal included."""
    Phat = as_square(Phat, "Phat")
    P = as_square(P, "P")
    if Phat.shape != P.shape:
        raise ValueError(f"dimension mismatch: {Phat.shape} vs {P.shape}")
    n = P.shape[0]
    diff = np.asarray(Phat, dtype=float) - np.asarray(P, dtype=float)
    return float(np.sqrt(np.sum(diff * diff)) / n)


def submatrix(A, vertices) -> np.ndarray:
    """Rows and columns of ``A`` at ``vertices`` (0-based), in sorted order."""
    A = as_square(A, "A")
    idx = np.unique(np.asarray(vertices, dtype=np.intp))
    if idx.size == 0:
        raise ValueError("vertex subset must be nonempty")
    if idx[0] < 0 or idx[-1] >= A.shape[0]:
        raise ValueError(f"vertex index out of range for n={A.shape[0]}")
    return A[np.ix_(idx, idx)]
