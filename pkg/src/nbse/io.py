"""Plain-text formats: matrix CSV, cover files and edge lists.

Vertex ids in files are 1-based; everything returned is 0-based.
"""
from __future__ import annotations

from pathlib import Path
from typing import List, Union

import numpy as np

from nbse.cover import Cover

PathLike = Union[str, Path]


class DataFormatError(ValueError):
    """Raised for unreadable or malformed input files."""


def load_matrix_csv(path: PathLike, sym_tol: float = 1e-9) -> np.ndarray:
    try:
        M = np.loadtxt(path, delimiter=",", ndmin=2)
    except (OSError, ValueError) as exc:
        raise DataFormatError(f"{path}: {exc}") from exc
    if M.shape[0] != M.shape[1]:
        raise DataFormatError(f"{path}: matrix is {M.shape[0]}x{M.shape[1]}, expected square")
    if not np.all(np.isfinite(M)):
        raise DataFormatError(f"{path}: non-finite entries")
    if np.max(np.abs(M - M.T), initial=0.0) > sym_tol:
        raise DataFormatError(f"{path}: matrix is not symmetric within {sym_tol}")
    return (M + M.T) / 2


def save_matrix_csv(path: PathLike, M) -> None:
    np.savetxt(path, np.asarray(M, dtype=float), delimiter=",", fmt="%.17g")


def load_cover(path: PathLike, n: int = None) -> Cover:
    """One block per line of space-separated 1-based ids; ``#`` lines are comments."""
    blocks: List[np.ndarray] = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                ids = np.array([int(tok) for tok in line.split()], dtype=np.intp)
            except ValueError:
                raise DataFormatError(f"{path}:{lineno}: non-integer vertex id") from None
            if ids.min() < 1:
                raise DataFormatError(f"{path}:{lineno}: vertex ids start at 1")
            blocks.append(ids - 1)
    if not blocks:
        raise DataFormatError(f"{path}: no blocks")
    if n is None:
        n = int(max(b.max() for b in blocks)) + 1
    return Cover(n, blocks)


def save_cover(path: PathLike, cover: Cover) -> None:
    with open(path, "w") as fh:
        fh.write(f"# n={cover.n} T={cover.T}\n")
        for b in cover.blocks:
            fh.write(" ".join(str(v + 1) for v in b) + "\n")


def _is_int(tok: str) -> bool:
    try:
        int(tok)
    except ValueError:
        return False
    return True


def load_edge_list(path: PathLike) -> np.ndarray:
    """Read an undirected edge list into a 0/1 adjacency matrix.

    Lines starting with ``%`` or ``#`` are skipped.  A first data line of three
    integers ``n n m`` (equal first two) is a size header: ids then run over
    1..n as given.  Without a header, ids are compacted to 1..k in sorted
    order.  A third column is a weight and any edge listed is kept; self-loops
    are dropped.
    """
    edges = []
    header_n = None
    first = True
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line[0] in "%#":
                continue
            toks = line.replace(",", " ").split()
            if first:
                first = False
                if len(toks) == 3 and all(_is_int(t) for t in toks) and toks[0] == toks[1]:
                    header_n = int(toks[0])
                    continue
            if len(toks) < 2 or not (_is_int(toks[0]) and _is_int(toks[1])):
                raise DataFormatError(f"{path}:{lineno}: malformed edge line {line!r}")
            if len(toks) > 2:
                try:
                    float(toks[2])
                except ValueError:
                    raise DataFormatError(f"{path}:{lineno}: malformed weight {toks[2]!r}") from None
            edges.append((int(toks[0]), int(toks[1])))
    if not edges and header_n is None:
        raise DataFormatError(f"{path}: no edges")
    E = np.array(edges, dtype=np.int64).reshape(-1, 2)
    if header_n is not None and (E.size == 0 or (E.min() >= 1 and E.max() <= header_n)):
        n = header_n
        E = E - 1
    else:
        ids, E = np.unique(E, return_inverse=True)
        E = E.reshape(-1, 2)
        n = ids.size
    A = np.zeros((n, n))
    keep = E[:, 0] != E[:, 1]
    A[E[keep, 0], E[keep, 1]] = 1.0
    A[E[keep, 1], E[keep, 0]] = 1.0
    return A


def save_edge_list(path: PathLike, A) -> None:
    A = np.asarray(A)
    n = A.shape[0]
    i, j = np.nonzero(np.triu(A, 1))
    with open(path, "w") as fh:
        fh.write(f"{n} {n} {i.size}\n")
        for a, b in zip(i, j):
            fh.write(f"{a + 1} {b + 1}\n")
