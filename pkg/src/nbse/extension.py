"""Distance extension across overlapping blocks and extended neighbourhood smoothing.

Distances measured inside each observed block are stitched together along a
traversal of a spanning tree of the block super-graph.  Two vertex sets are
merged through their common vertices r using the triangle inequality:

    upper(i, j) = min_r d(i, r) + d(j, r)
    lower(i, j) = max_r |d(i, r) - d(j, r)|

and the cross-block distance is an average of the two bounds.  Smoothing then
runs on the zero-filled observed matrix, and a fixed-point correction replaces
the zero-filled entries by the current probability estimates.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from nbse.cover import (
    Cover,
    SpanningTree,
    SuperGraph,
    build_supergraph,
    check_cover,
    generate_traversal,
    maximal_spanning_tree,
    observed_set,
    random_spanning_tree,
)
from nbse.distance import dist_for_blocks
from nbse.graphons import make_rng
from nbse.matrix import frobenius_error, mask_observed
from nbse.smoothing import default_bandwidth, smooth, neighbourhoods

RULES = ("harmonic", "arithmetic", "geometric")
STRATEGIES = ("maximal-tree", "random-trees")

_CHUNK_ELEMS = 4_000_000


@dataclass
class PartialDistance:
    """Distances among the sorted global vertex ids in ``vertices``."""

    vertices: np.ndarray
    dist: np.ndarray

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.intp)
        self.dist = np.asarray(self.dist, dtype=float)
        if self.dist.shape != (self.vertices.size, self.vertices.size):
            raise ValueError("distance matrix does not match the vertex set")
        if self.vertices.size > 1 and np.any(np.diff(self.vertices) <= 0):
            raise ValueError("vertices must be sorted and unique")

    def to_full(self, n: int) -> np.ndarray:
        if self.vertices.size != n:
            raise ValueError(f"distance covers {self.vertices.size} of {n} vertices")
        return self.dist


def average(x, y, rule: str = "harmonic"):
    """Mean of two nonnegative arrays under ``rule``; ``average(0, 0) == 0``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if rule == "arithmetic":
        return (x + y) / 2
    if rule == "geometric":
        return np.sqrt(x) * np.sqrt(y)
    if rule == "harmonic":
        s = x + y
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(s > 0, 2 * x * (y / s), 0.0)
    raise ValueError(f"unknown averaging rule {rule!r}; expected one of {RULES}")


def triangle_bounds(d_left, d_right) -> Tuple[np.ndarray, np.ndarray]:
    """Upper and lower triangle-inequality bounds through shared vertices.

    ``d_left[i, r]`` and ``d_right[j, r]`` are distances to the shared
    vertices r.  Returns ``(upper, lower)`` with
    ``upper[i, j] = min_r d_left[i, r] + d_right[j, r]`` and
    ``lower[i, j] = max_r |d_left[i, r] - d_right[j, r]|``.
    """
    d_left = np.asarray(d_left, dtype=float)
    d_right = np.asarray(d_right, dtype=float)
    a, m = d_left.shape
    b = d_right.shape[0]
    upper = np.empty((a, b))
    lower = np.empty((a, b))
    step = max(1, _CHUNK_ELEMS // max(1, b * m))
    for lo in range(0, a, step):
        L = d_left[lo:lo + step, None, :]
        R = d_right[None, :, :]
        upper[lo:lo + step] = (L + R).min(axis=2)
        lower[lo:lo + step] = np.abs(L - R).max(axis=2)
    return upper, lower


def de2(first: PartialDistance, second: PartialDistance, rule: str = "harmonic") -> PartialDistance:
    """Merge two overlapping partial distance matrices into one over their union."""
    shared = np.intersect1d(first.vertices, second.vertices, assume_unique=True)
    if shared.size == 0:
        raise ValueError("cannot merge distance matrices with no shared vertex")
    union = np.union1d(first.vertices, second.vertices)
    pos1 = np.searchsorted(union, first.vertices)
    pos2 = np.searchsorted(union, second.vertices)

    out = np.zeros((union.size, union.size))
    out[np.ix_(pos1, pos1)] = first.dist
    out[np.ix_(pos2, pos2)] = second.dist

    s1 = np.searchsorted(first.vertices, shared)
    s2 = np.searchsorted(second.vertices, shared)
    ps = np.searchsorted(union, shared)
    out[np.ix_(ps, ps)] = 0.5 * (first.dist[np.ix_(s1, s1)] + second.dist[np.ix_(s2, s2)])

    only1 = np.flatnonzero(~np.isin(first.vertices, shared, assume_unique=True))
    only2 = np.flatnonzero(~np.isin(second.vertices, shared, assume_unique=True))
    if only1.size and only2.size:
        upper, lower = triangle_bounds(first.dist[np.ix_(only1, s1)], second.dist[np.ix_(only2, s2)])
        cross = average(lower, upper, rule)
        r1, r2 = pos1[only1], pos2[only2]
        out[np.ix_(r1, r2)] = cross
        out[np.ix_(r2, r1)] = cross.T
    np.fill_diagonal(out, 0.0)
    return PartialDistance(union, out)


def check_traversal(tree: SpanningTree, tau: Sequence[int]) -> None:
    if len(tau) == 0:
        raise ValueError("empty traversal")
    adj = tree.neighbours()
    for u, v in zip(tau, tau[1:]):
        if v not in adj[u]:
            raise ValueError(f"traversal step {u + 1} -> {v + 1} is not a tree edge")
    if set(tau) != set(range(tree.T)):
        raise ValueError("traversal does not visit every tree node")


def de(block_dists: Sequence[PartialDistance], tree: SpanningTree, tau: Sequence[int],
       rule: str = "harmonic") -> PartialDistance:
    """Merge block distances in first-visit order along the traversal ``tau``.

    Entries produced by earlier merges are treated exactly like measured ones
    in later merges.
    """
    check_traversal(tree, tau)
    acc = block_dists[tau[0]]
    seen = {tau[0]}
    for t in tau[1:]:
        if t in seen:
            continue
        seen.add(t)
        acc = de2(acc, block_dists[t], rule)
    return acc


def block_partials(A_obs, cover: Cover) -> List[PartialDistance]:
    return [PartialDistance(b, d) for b, d in zip(cover.blocks, dist_for_blocks(A_obs, cover))]


def plan_traversals(sg: SuperGraph, I: int, J: int, strategy: str, seed) -> List[Tuple[SpanningTree, List[int]]]:
    """The (tree, traversal) pairs averaged over; maximal-tree uses one tree."""
    if I < 1 or J < 1:
        raise ValueError("need at least one tree and one traversal")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    rng = make_rng(seed)
    plan = []
    if strategy == "maximal-tree":
        trees = [maximal_spanning_tree(sg)]
    else:
        trees = [random_spanning_tree(sg, rng) for _ in range(I)]
    for tree in trees:
        for _ in range(J):
            plan.append((tree, generate_traversal(tree, rng)))
    return plan


def mean_of(mats: Sequence[np.ndarray]) -> np.ndarray:
    """Entrywise mean, written as a shifted mean so identical inputs come back unchanged."""
    base = mats[0]
    if len(mats) == 1:
        return base.copy()
    shift = np.zeros_like(base)
    for M in mats[1:]:
        shift += M - base
    return base + shift / len(mats)


def average_distance(block_dists: Sequence[PartialDistance], sg: SuperGraph, I: int = 1, J: int = 3,
                     strategy: str = "maximal-tree", rule: str = "harmonic", seed=None,
                     n: Optional[int] = None, plan=None) -> np.ndarray:
    """Mean of the extended distances over the (tree, traversal) pairs.

    ``plan`` overrides the pairs that ``I``, ``J``, ``strategy`` and ``seed``
    would otherwise draw.
    """
    if plan is None:
        plan = plan_traversals(sg, I, J, strategy, seed)
    if n is None:
        n = int(max(p.vertices[-1] for p in block_dists)) + 1
    return mean_of([de(block_dists, tree, tau, rule).to_full(n) for tree, tau in plan])


@dataclass
class NBSEParams:
    I: int = 1
    J: int = 3
    strategy: str = "maximal-tree"
    rule: str = "harmonic"
    C: float = 1.0
    h: Optional[float] = None
    epsilon: float = 1e-4
    max_iter: int = 200
    seed: Optional[int] = None

    def bandwidth(self, n: int) -> float:
        return self.h if self.h is not None else default_bandwidth(n, self.C)


def nbse0(A_obs, cover: Cover, params: Optional[NBSEParams] = None, plan=None):
    """Smoothing of the zero-filled matrix with extended distances.

    Returns ``(P0, W, D)``: the estimate, the neighbourhood membership matrix
    (kept fixed by the correction loop) and the extended distance matrix.
    """
    params = params or NBSEParams()
    check_cover(cover)
    A_obs = np.asarray(A_obs, dtype=float)
    if A_obs.shape != (cover.n, cover.n):
        raise ValueError(f"A_obs has shape {A_obs.shape}, cover has n={cover.n}")
    A_obs = mask_observed(A_obs, observed_set(cover))
    D = average_distance(block_partials(A_obs, cover), build_supergraph(cover), params.I, params.J,
                         params.strategy, params.rule, params.seed, n=cover.n, plan=plan)
    W = neighbourhoods(D, params.bandwidth(cover.n))
    return smooth(W, A_obs), W, D


def f_corr(P_cur, A_obs, observed, W) -> np.ndarray:
    """One correction step: smooth with unobserved entries replaced by ``P_cur``."""
    M = np.where(observed, np.asarray(A_obs, dtype=float), P_cur)
    return smooth(W, M)


@dataclass
class NBSEResult:
    P: np.ndarray
    iterations: int
    deltas: List[float]
    converged: bool
    P0: np.ndarray
    neighbourhoods: np.ndarray
    distance: np.ndarray
    iterates: List[np.ndarray] = field(default_factory=list)


def nbse(A_obs, cover: Cover, params: Optional[NBSEParams] = None, keep_iterates: bool = False,
         plan=None) -> NBSEResult:
    """Extended smoothing followed by corrections until the step size drops below epsilon.

    The step size is ``||P_t - P_{t-1}||_F / n``.  If ``max_iter`` corrections
    run without meeting the threshold the last iterate is returned with
    ``converged=False``.
    """
    params = params or NBSEParams()
    if not params.epsilon > 0:
        raise ValueError("epsilon must be positive")
    A_obs = np.asarray(A_obs, dtype=float)
    P0, W, D = nbse0(A_obs, cover, params, plan)
    O = observed_set(cover)
    A_obs = mask_observed(A_obs, O)
    prev = P0
    deltas: List[float] = []
    iterates = [P0] if keep_iterates else []
    converged = False
    while len(deltas) < params.max_iter:
        cur = f_corr(prev, A_obs, O, W)
        deltas.append(frobenius_error(cur, prev))
        if keep_iterates:
            iterates.append(cur)
        prev = cur
        if deltas[-1] < params.epsilon:
            converged = True
            break
    return NBSEResult(prev, len(deltas), deltas, converged, P0, W, D, iterates)
