"""Seeded simulation and real-data experiments producing result rows.

Random streams are derived from the master seed with
``numpy.random.SeedSequence(master, spawn_key=key)``, where ``key`` is:

    (0, rep)                       latent positions and adjacency draw
    (1, rep, overlap_idx)          cover layout
    (2, rep, overlap_idx, est_idx) estimator randomness (trees, traversals)

so each row can be recomputed in isolation and the output does not depend on
how replications are distributed across workers.
"""
from __future__ import annotations

import csv
import io
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from threadpoolctl import threadpool_limits

from nbse.baselines import nbs_vanilla, usvt
from nbse.cover import (
    Cover,
    generate_traversal,
    make_chain_cover,
    make_two_block_cover,
    maximal_spanning_tree,
    build_supergraph,
    observed_set,
    validate_cover,
)
from nbse.extension import NBSEParams, RULES, STRATEGIES, nbse
from nbse.graphons import GraphonSpec, build_prob_matrix, sample_adjacency, sample_latents
from nbse.io import DataFormatError, load_cover, load_edge_list, load_matrix_csv, save_matrix_csv
from nbse.matrix import frobenius_error, mask_observed

log = logging.getLogger(__name__)

ESTIMATORS = ("nbse", "nbs", "usvt")
SCENARIOS = ("two-block", "chain", "file", "full")
CSV_HEADER = ["estimator", "dataset", "n", "T", "overlap", "rep", "error", "seconds", "iterations"]

GRAPH_STREAM, COVER_STREAM, ESTIMATOR_STREAM = 0, 1, 2


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


@dataclass
class ExperimentConfig:
    graphon: Optional[str] = None
    graph: Optional[str] = None
    n: int = 1000
    scenario: str = "two-block"
    T: int = 2
    overlap: float = 0.1
    overlaps: Tuple[float, ...] = ()
    cover_file: Optional[str] = None
    estimators: Tuple[str, ...] = ("nbse", "nbs", "usvt")
    I: int = 1
    J: int = 3
    strategy: str = "maximal-tree"
    rule: str = "harmonic"
    C: float = 1.0
    epsilon: float = 1e-4
    max_iter: int = 200
    eta: float = 0.01
    full_estimator: str = "nbs"
    replications: int = 5
    seed: int = 0
    workers: int = 1
    timing: bool = True
    output: Optional[str] = None
    dump_dir: Optional[str] = None

    def validate(self) -> None:
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if not self.estimators:
            raise ConfigError("estimator list is empty")
        bad = [e for e in self.estimators if e not in ESTIMATORS]
        if bad:
            raise ConfigError(f"unknown estimators {bad}; choose from {ESTIMATORS}")
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; choose from {SCENARIOS}")
        if self.scenario == "file" and not self.cover_file:
            raise ConfigError("scenario 'file' needs cover_file")
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r}")
        if self.rule not in RULES:
            raise ConfigError(f"unknown averaging rule {self.rule!r}")
        if self.full_estimator not in ("nbs", "usvt"):
            raise ConfigError("full_estimator must be 'nbs' or 'usvt'")
        if self.epsilon <= 0 or self.max_iter < 1 or self.I < 1 or self.J < 1:
            raise ConfigError("epsilon, max_iter, I and J must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def nbse_params(self, seed=None) -> NBSEParams:
        return NBSEParams(I=self.I, J=self.J, strategy=self.strategy, rule=self.rule, C=self.C,
                          epsilon=self.epsilon, max_iter=self.max_iter, seed=seed)

    def overlap_count(self, value: float, n: int) -> int:
        """Values below 1 are fractions of n; others are vertex counts."""
        return max(1, int(round(value * n))) if value < 1 else int(value)


@dataclass
class ResultRow:
    estimator: str
    dataset: str
    n: int
    T: int
    overlap: int
    rep: int
    error: float
    seconds: float = 0.0
    iterations: Optional[int] = None
    overlap_idx: int = field(default=0, compare=False)

    def as_csv(self, timing: bool = True) -> List[str]:
        return [
            self.estimator,
            self.dataset,
            str(self.n),
            str(self.T),
            str(self.overlap),
            str(self.rep),
            repr(float(self.error)),
            f"{self.seconds:.4f}" if timing else "0",
            "" if self.iterations is None else str(self.iterations),
        ]


def substream(master: int, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master, spawn_key=tuple(int(k) for k in key))


def sort_rows(rows: Sequence[ResultRow], estimators: Sequence[str] = ESTIMATORS) -> List[ResultRow]:
    order = {e: i for i, e in enumerate(estimators)}
    return sorted(rows, key=lambda r: (r.overlap_idx, r.overlap, r.rep, order.get(r.estimator, len(order)), r.estimator))


def rows_to_csv(rows: Sequence[ResultRow], timing: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.as_csv(timing))
    return buf.getvalue()


def write_results(rows: Sequence[ResultRow], path, timing: bool = True) -> None:
    Path(path).write_text(rows_to_csv(rows, timing))


# ---------------------------------------------------------------- data and covers


def simulate_graph(spec: GraphonSpec, n: int, master: int, rep: int):
    """Latent positions, probability matrix and adjacency for one replication."""
    xi_seed, a_seed = substream(master, GRAPH_STREAM, rep).spawn(2)
    xi = sample_latents(n, np.random.default_rng(xi_seed))
    P = build_prob_matrix(spec, xi)
    A = sample_adjacency(P, np.random.default_rng(a_seed))
    return xi, P, A


def build_cover(cfg: ExperimentConfig, n: int, overlap: int, seed) -> Cover:
    if cfg.scenario == "full":
        return Cover.trivial(n)
    if cfg.scenario == "two-block":
        return make_two_block_cover(n, overlap, seed)
    if cfg.scenario == "chain":
        return make_chain_cover(n, cfg.T, overlap, seed)
    return load_cover(cfg.cover_file, n)


def check_feasible(cfg: ExperimentConfig, n: int, overlaps: Sequence[int]) -> None:
    """Reject an infeasible cover before any sampling happens."""
    try:
        for ov in overlaps:
            cover = build_cover(cfg, n, ov, 0)
            problems = validate_cover(cover)
            if problems:
                raise ConfigError("; ".join(p.message for p in problems))
            small = [t + 1 for t, b in enumerate(cover.blocks) if b.size < 3]
            if small:
                raise ConfigError(f"blocks {small} have fewer than 3 vertices")
    except ValueError as exc:
        if isinstance(exc, (ConfigError, DataFormatError)):
            raise
        raise ConfigError(str(exc)) from exc


def resolved_overlaps(cfg: ExperimentConfig, n: int) -> List[int]:
    values = cfg.overlaps or (cfg.overlap,)
    if cfg.scenario in ("full", "file"):
        return [0]
    return [cfg.overlap_count(v, n) for v in values]


# ---------------------------------------------------------------- estimators


def run_estimator(name: str, A_obs: np.ndarray, cover: Cover, cfg: ExperimentConfig, seed, plan=None):
    """Return ``(estimate, iterations)``; iterations is None except for NBSE."""
    if name == "nbse":
        res = nbse(A_obs, cover, cfg.nbse_params(seed), plan=plan)
        if not res.converged:
            log.warning("NBSE hit the iteration cap (%d) without converging", cfg.max_iter)
        return res.P, res.iterations
    if name == "nbs":
        return nbs_vanilla(A_obs, cfg.C), None
    if name == "usvt":
        return usvt(A_obs, cfg.eta, observed=observed_set(cover)), None
    raise ConfigError(f"unknown estimator {name!r}")


def _evaluate(cfg, dataset, target, A, cover, overlap, rep, ov_idx, names=None, plans=None):
    A_obs = mask_observed(A, observed_set(cover))
    rows = []
    names = names or cfg.estimators
    for e_idx, name in enumerate(names):
        est_seed = substream(cfg.seed, ESTIMATOR_STREAM, rep, ov_idx, e_idx)
        plan = plans.get(name) if plans else None
        base = name if plan is None else "nbse"
        t0 = time.perf_counter()
        Phat, iters = run_estimator(base, A_obs, cover, cfg, est_seed, plan)
        elapsed = time.perf_counter() - t0
        err = frobenius_error(Phat, target)
        rows.append(ResultRow(name, dataset, cover.n, cover.T, overlap, rep, err, elapsed, iters, ov_idx))
        if cfg.dump_dir:
            Path(cfg.dump_dir).mkdir(parents=True, exist_ok=True)
            save_matrix_csv(Path(cfg.dump_dir) / f"{dataset}_{name}_ov{overlap}_rep{rep}.csv", Phat)
    return rows


def _simulation_task(args) -> List[ResultRow]:
    cfg, rep, ov_idx, overlap = args
    with threadpool_limits(limits=1):
        spec = GraphonSpec.parse(cfg.graphon)
        _, P, A = simulate_graph(spec, cfg.n, cfg.seed, rep)
        cover = build_cover(cfg, cfg.n, overlap, substream(cfg.seed, COVER_STREAM, rep, ov_idx))
        return _evaluate(cfg, spec.name if spec.kind != "grid" else Path(cfg.graphon).stem,
                         P, A, cover, overlap, rep, ov_idx)


def _run_tasks(fn, tasks, workers: int) -> List[ResultRow]:
    rows: List[ResultRow] = []
    if workers == 1 or len(tasks) <= 1:
        for t in tasks:
            rows.extend(fn(t))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for chunk in pool.map(fn, tasks):
                rows.extend(chunk)
    return rows


# ---------------------------------------------------------------- experiments


def run_simulation(cfg: ExperimentConfig) -> List[ResultRow]:
    """Graphon simulation over replications (and overlaps, if several are set)."""
    cfg.validate()
    if not cfg.graphon:
        raise ConfigError("simulation needs a graphon")
    try:
        GraphonSpec.parse(cfg.graphon)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    overlaps = resolved_overlaps(cfg, cfg.n)
    check_feasible(cfg, cfg.n, overlaps)
    tasks = [(cfg, rep, k, ov) for k, ov in enumerate(overlaps) for rep in range(cfg.replications)]
    return sort_rows(_run_tasks(_simulation_task, tasks, cfg.workers), cfg.estimators)


def run_overlap_sweep(cfg: ExperimentConfig, overlaps: Sequence[float]) -> List[ResultRow]:
    if cfg.scenario != "two-block":
        raise ConfigError("the overlap sweep uses the two-block scenario")
    if not overlaps:
        raise ConfigError("no overlap values given")
    return run_simulation(replace(cfg, overlaps=tuple(overlaps)))


TRAVERSAL_NAMES = ("nbse-trav1", "nbse-trav2", "nbse-trav3", "nbse-avg")


def traversal_plans(cover: Cover, seed) -> Dict[str, list]:
    """Three single traversals of the maximal spanning tree plus their average.

    Roots are three distinct blocks drawn from ``seed`` (repeating when T < 3);
    children are visited in ascending order.
    """
    tree = maximal_spanning_tree(build_supergraph(cover))
    rng = np.random.default_rng(seed)
    roots = rng.choice(cover.T, size=min(3, cover.T), replace=False).tolist()
    while len(roots) < 3:
        roots.append(roots[len(roots) % cover.T])
    singles = [(tree, generate_traversal(tree, root=int(r))) for r in roots]
    plans = {name: [pair] for name, pair in zip(TRAVERSAL_NAMES, singles)}
    plans[TRAVERSAL_NAMES[3]] = singles
    return plans


def _traversal_task(args) -> List[ResultRow]:
    cfg, rep, overlap = args
    with threadpool_limits(limits=1):
        spec = GraphonSpec.parse(cfg.graphon)
        _, P, A = simulate_graph(spec, cfg.n, cfg.seed, rep)
        cover = build_cover(cfg, cfg.n, overlap, substream(cfg.seed, COVER_STREAM, rep, 0))
        plans = traversal_plans(cover, substream(cfg.seed, ESTIMATOR_STREAM, rep, 0, len(ESTIMATORS)))
        return _evaluate(cfg, spec.name if spec.kind != "grid" else Path(cfg.graphon).stem,
                         P, A, cover, overlap, rep, 0, names=TRAVERSAL_NAMES, plans=plans)


def run_traversal_study(cfg: ExperimentConfig) -> List[ResultRow]:
    """NBSE with each of three single traversals and with their averaged distance."""
    cfg.validate()
    if cfg.scenario != "chain":
        raise ConfigError("the traversal study uses the chain scenario")
    if not cfg.graphon:
        raise ConfigError("traversal study needs a graphon")
    overlap = resolved_overlaps(cfg, cfg.n)[0]
    check_feasible(cfg, cfg.n, [overlap])
    tasks = [(cfg, rep, overlap) for rep in range(cfg.replications)]
    return sort_rows(_run_tasks(_traversal_task, tasks, cfg.workers), TRAVERSAL_NAMES)


def load_graph(path) -> np.ndarray:
    """Edge list, or a dense CSV adjacency when the file ends in ``.csv``."""
    path = Path(path)
    if not path.exists():
        raise DataFormatError(f"{path}: no such file")
    if path.suffix == ".csv":
        A = load_matrix_csv(path)
        if not np.all((A == 0) | (A == 1)):
            raise DataFormatError(f"{path}: adjacency entries must be 0 or 1")
        np.fill_diagonal(A, 0)
        return A
    return load_edge_list(path)


def full_graph_estimate(A: np.ndarray, cfg: ExperimentConfig) -> np.ndarray:
    if cfg.full_estimator == "usvt":
        return usvt(A, cfg.eta)
    return nbs_vanilla(A, cfg.C)


def _real_task(args) -> List[ResultRow]:
    cfg, A, P_full, dataset, rep, ov_idx, overlap = args
    with threadpool_limits(limits=1):
        n = A.shape[0]
        cover = build_cover(cfg, n, overlap, substream(cfg.seed, COVER_STREAM, rep, ov_idx))
        return _evaluate(cfg, dataset, P_full, A, cover, overlap, rep, ov_idx)


def run_real_data(cfg: ExperimentConfig) -> List[ResultRow]:
    """Errors against the estimate computed from the completely observed graph."""
    cfg.validate()
    if not cfg.graph:
        raise ConfigError("real-data run needs a graph path")
    A = load_graph(cfg.graph)
    n = A.shape[0]
    if n < 3:
        raise DataFormatError(f"{cfg.graph}: graph has only {n} vertices")
    overlaps = resolved_overlaps(cfg, n)
    check_feasible(cfg, n, overlaps)
    with threadpool_limits(limits=1):
        P_full = full_graph_estimate(A, cfg)
    dataset = Path(cfg.graph).stem
    tasks = [(cfg, A, P_full, dataset, rep, k, ov)
             for k, ov in enumerate(overlaps) for rep in range(cfg.replications)]
    return sort_rows(_run_tasks(_real_task, tasks, cfg.workers), cfg.estimators)


def summarize(rows: Sequence[ResultRow]) -> Dict[Tuple[str, str, int], Tuple[float, float, int]]:
    """Mean, standard deviation and count of the error per (dataset, estimator, overlap)."""
    groups: Dict[Tuple[str, str, int], List[float]] = {}
    for r in rows:
        groups.setdefault((r.dataset, r.estimator, r.overlap), []).append(r.error)
    return {
        k: (float(np.mean(v)), float(np.std(v, ddof=1)) if len(v) > 1 else 0.0, len(v))
        for k, v in groups.items()
    }
