"""Benchmark graphons, latent sampling and Bernoulli adjacency draws.

The six closed-form graphons, for x, y in [0, 1]:

    a  sin(5*pi*(x + y - 1) + 1) / 2 + 0.5
    b  1 - 0.5 * max(x, y)
    c  1 - 1 / (1 + exp(-15 * (0.8 * |x - y|) ** 0.8 - 0.1))
    d  (x^2 + y^2) / 3 * cos(1 / (x^2 + y^2)) + 0.15,   with d(0, 0) = 0.15
    e  1 / (1 + exp(-x - y))
    f  0.3 if floor(2x) == floor(2y) else 0.03

``grid`` graphons are piecewise constant on an m-by-m partition of the unit
square.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

KINDS = ("a", "b", "c", "d", "e", "f", "grid")


@dataclass(frozen=True)
class GraphonSpec:
    kind: str
    grid: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown graphon kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "grid":
            if self.grid is None:
                raise ValueError("grid graphon needs a grid payload")
            g = np.asarray(self.grid, dtype=float)
            if g.ndim != 2 or g.shape[0] != g.shape[1] or g.size == 0:
                raise ValueError("grid payload must be a nonempty square array")
            if not np.allclose(g, g.T, atol=1e-9):
                raise ValueError("grid payload must be symmetric")
            if g.min() < 0 or g.max() > 1:
                raise ValueError("grid payload must lie in [0, 1]")
            object.__setattr__(self, "grid", (g + g.T) / 2)

    @property
    def name(self) -> str:
        return self.kind

    @classmethod
    def parse(cls, text: str) -> "GraphonSpec":
        """Letters a-f name the closed forms; anything else is a CSV grid path."""
        text = text.strip()
        if text in KINDS[:-1]:
            return cls(text)
        path = Path(text)
        if not path.exists():
            raise ValueError(f"graphon {text!r} is neither a letter a-f nor an existing grid file")
        grid = np.loadtxt(path, delimiter=",", ndmin=2)
        return cls("grid", grid)


def _formula(kind: str, x: np.ndarray, y: np.ndarray, grid=None) -> np.ndarray:
    if kind == "a":
        return np.sin(5 * np.pi * (x + y - 1) + 1) / 2 + 0.5
    if kind == "b":
        return 1 - 0.5 * np.maximum(x, y)
    if kind == "c":
        return 1 - 1 / (1 + np.exp(-15 * (0.8 * np.abs(x - y)) ** 0.8 - 0.1))
    if kind == "d":
        s = x * x + y * y
        with np.errstate(divide="ignore", invalid="ignore"):
            v = s / 3 * np.cos(1 / s) + 0.15
        return np.where(s == 0, 0.15, v)
    if kind == "e":
        return 1 / (1 + np.exp(-x - y))
    if kind == "f":
        same = np.floor(2 * x) == np.floor(2 * y)
        return np.where(same, 0.3, 0.03)
    m = grid.shape[0]
    i = np.minimum((x * m).astype(np.intp), m - 1)
    j = np.minimum((y * m).astype(np.intp), m - 1)
    return grid[i, j]


def eval_graphon(spec: GraphonSpec, x, y):
    """Evaluate the graphon at ``(x, y)``; broadcasts over arrays."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any((x < 0) | (x > 1)) or np.any((y < 0) | (y > 1)):
        raise ValueError("graphon arguments must lie in [0, 1]")
    out = np.clip(_formula(spec.kind, x, y, spec.grid), 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_latents(n: int, seed) -> np.ndarray:
    if n < 1:
        raise ValueError("need at least one vertex")
    return make_rng(seed).uniform(0.0, 1.0, size=n)


def build_prob_matrix(spec: GraphonSpec, xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    P = eval_graphon(spec, xi[:, None], xi[None, :])
    # formulas are symmetric up to round-off; enforce it bitwise
    return np.triu(P) + np.triu(P, 1).T


def sample_adjacency(P, seed) -> np.ndarray:
    """Symmetric 0/1 matrix with independent Bernoulli(P_ij) edges for i < j."""
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    rng = make_rng(seed)
    iu = np.triu_indices(n, 1)
    draws = rng.uniform(size=iu[0].size) < P[iu]
    A = np.zeros((n, n), dtype=float)
    A[iu] = draws
    return A + A.T
