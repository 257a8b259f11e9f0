"""Covers by overlapping vertex blocks, the block super-graph and its spanning trees."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Sequence, Tuple

import numpy as np

from nbse.graphons import make_rng


@dataclass(frozen=True)
class Cover:
    """``n`` vertices covered by ``blocks``; each block is a sorted 0-based index array."""

    n: int
    blocks: Tuple[np.ndarray, ...]

    def __init__(self, n: int, blocks: Sequence):
        object.__setattr__(self, "n", int(n))
        object.__setattr__(
            self, "blocks", tuple(np.unique(np.asarray(b, dtype=np.intp)) for b in blocks)
        )

    @property
    def T(self) -> int:
        return len(self.blocks)

    @classmethod
    def trivial(cls, n: int) -> "Cover":
        return cls(n, [np.arange(n)])


class CoverViolation(NamedTuple):
    kind: str  # "empty-block", "out-of-range", "not-covering", "disconnected"
    message: str


@dataclass
class SuperGraph:
    T: int
    weights: Dict[Tuple[int, int], int] = field(default_factory=dict)

    @property
    def edges(self) -> List[Tuple[int, int]]:
        return sorted(self.weights)

    def neighbours(self) -> List[List[int]]:
        adj: List[List[int]] = [[] for _ in range(self.T)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def is_connected(self) -> bool:
        return _connected(self.T, self.edges)


@dataclass(frozen=True)
class SpanningTree:
    T: int
    edges: Tuple[Tuple[int, int], ...]

    def neighbours(self) -> List[List[int]]:
        adj: List[List[int]] = [[] for _ in range(self.T)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        for nb in adj:
            nb.sort()
        return adj

    def weight(self, sg: SuperGraph) -> int:
        return sum(sg.weights[e] for e in self.edges)


def _connected(T: int, edges) -> bool:
    if T == 0:
        return False
    parent = list(range(T))

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    comps = T
    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            comps -= 1
    return comps == 1


def build_supergraph(cover: Cover) -> SuperGraph:
    sg = SuperGraph(cover.T)
    for a in range(cover.T):
        for b in range(a + 1, cover.T):
            w = np.intersect1d(cover.blocks[a], cover.blocks[b], assume_unique=True).size
            if w > 0:
                sg.weights[(a, b)] = int(w)
    return sg


def validate_cover(cover: Cover) -> List[CoverViolation]:
    """Return every violated cover invariant; an empty list means the cover is valid."""
    problems = []
    for t, b in enumerate(cover.blocks):
        if b.size == 0:
            problems.append(CoverViolation("empty-block", f"block {t + 1} is empty"))
        elif b[0] < 0 or b[-1] >= cover.n:
            problems.append(CoverViolation("out-of-range", f"block {t + 1} has vertices outside 1..{cover.n}"))
    union = np.unique(np.concatenate(cover.blocks)) if cover.blocks else np.array([], dtype=np.intp)
    missing = np.setdiff1d(np.arange(cover.n), union)
    if missing.size:
        shown = ", ".join(str(v + 1) for v in missing[:10])
        problems.append(CoverViolation("not-covering", f"vertices not in any block: {shown}"))
    if cover.T and not build_supergraph(cover).is_connected():
        problems.append(CoverViolation("disconnected", "block super-graph is disconnected"))
    return problems


def check_cover(cover: Cover) -> None:
    problems = validate_cover(cover)
    if problems:
        raise ValueError("invalid cover: " + "; ".join(p.message for p in problems))


def observed_set(cover: Cover) -> np.ndarray:
    O = np.zeros((cover.n, cover.n), dtype=bool)
    for b in cover.blocks:
        O[np.ix_(b, b)] = True
    return O


def random_spanning_tree(sg: SuperGraph, seed) -> SpanningTree:
    """Uniform spanning tree via Wilson's loop-erased random walks."""
    if not sg.is_connected():
        raise ValueError("super-graph is disconnected")
    rng = make_rng(seed)
    adj = sg.neighbours()
    in_tree = [False] * sg.T
    nxt = [-1] * sg.T
    in_tree[int(rng.integers(sg.T))] = True
    for start in range(sg.T):
        u = start
        while not in_tree[u]:
            nxt[u] = adj[u][int(rng.integers(len(adj[u])))]
            u = nxt[u]
        u = start
        while not in_tree[u]:
            in_tree[u] = True
            u = nxt[u]
    edges = tuple(sorted((min(u, v), max(u, v)) for u, v in enumerate(nxt) if v >= 0))
    return SpanningTree(sg.T, edges)


def maximal_spanning_tree(sg: SuperGraph) -> SpanningTree:
    """Kruskal on descending overlap; equal weights resolved by (min, max) endpoint order."""
    if not sg.is_connected():
        raise ValueError("super-graph is disconnected")
    parent = list(range(sg.T))

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    chosen = []
    for (a, b), _ in sorted(sg.weights.items(), key=lambda kv: (-kv[1], kv[0])):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            chosen.append((a, b))
    return SpanningTree(sg.T, tuple(sorted(chosen)))


def generate_traversal(tree: SpanningTree, seed=None, root=None) -> List[int]:
    """Depth-first walk listing each node as it is entered, including re-entries
    on the way back up, until every node has been seen.

    Root and child order are drawn from ``seed`` unless ``root`` is given; a
    given root with ``seed=None`` visits children in ascending order.
    """
    rng = make_rng(seed) if seed is not None else None
    if root is None:
        root = int(rng.integers(tree.T)) if rng is not None else 0
    adj = tree.neighbours()
    seen = {root}
    walk = [root]

    def visit(u, parent):
        children = [v for v in adj[u] if v != parent]
        if rng is not None:
            children = [children[k] for k in rng.permutation(len(children))]
        for v in children:
            if len(seen) == tree.T:
                return
            walk.append(v)
            seen.add(v)
            visit(v, u)
            if len(seen) == tree.T:
                return
            walk.append(u)

    visit(root, -1)
    return walk


def make_two_block_cover(n: int, overlap: int, seed=None) -> Cover:
    """Two blocks over a random vertex order sharing exactly ``overlap`` vertices."""
    if not 1 <= overlap <= n - 2:
        raise ValueError(f"overlap must be in [1, n-2], got {overlap} for n={n}")
    perm = make_rng(seed).permutation(n)
    size1 = -(-(n + overlap) // 2)
    size2 = n + overlap - size1
    return Cover(n, [perm[:size1], perm[n - size2:]])


def chain_block_sizes(n: int, T: int, overlap: int) -> List[int]:
    total = n + (T - 1) * overlap
    base, extra = divmod(total, T)
    return [base + (1 if t < extra else 0) for t in range(T)]


def make_chain_cover(n: int, T: int, overlap: int, seed=None) -> Cover:
    """``T`` consecutive blocks; neighbours share ``overlap`` vertices, others none."""
    if T < 2:
        raise ValueError("chain cover needs T >= 2")
    if overlap < 1:
        raise ValueError("overlap must be positive")
    sizes = chain_block_sizes(n, T, overlap)
    # an interior block must hold both of its overlaps without them touching;
    # end blocks need at least one private vertex
    for t, s in enumerate(sizes):
        need = overlap + 1 if t in (0, T - 1) else 2 * overlap
        if s < need:
            raise ValueError(f"infeasible chain cover: n={n}, T={T}, overlap={overlap}")
    perm = make_rng(seed).permutation(n)
    blocks, start = [], 0
    for s in sizes:
        blocks.append(perm[start:start + s])
        start += s - overlap
    return Cover(n, blocks)
