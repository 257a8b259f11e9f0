"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line (shown in the pytest terminal summary)
before asserting.  Criteria 4-7 run full simulation studies and take minutes.
"""
import time

import numpy as np
import pytest

from nbse.cover import Cover, make_chain_cover, observed_set
from nbse.distance import dist_matrix
from nbse.experiments import ExperimentConfig, rows_to_csv, run_overlap_sweep, run_simulation, run_traversal_study, summarize
from nbse.extension import NBSEParams, PartialDistance, de2, nbse, triangle_bounds
from nbse.graphons import GraphonSpec, build_prob_matrix, sample_adjacency, sample_latents
from nbse.matrix import mask_observed
from nbse.smoothing import default_bandwidth, nbs_estimate

from conftest import random_adjacency
from oracles import brute_force_dist


def test_criterion_1_distance_equals_brute_force(acceptance_report):
    rng = np.random.default_rng(101)
    mismatches, elapsed = 0, 0.0
    for _ in range(50):
        n = int(rng.integers(3, 21))
        A = random_adjacency(rng, n, rng.uniform(0.05, 0.95))
        t0 = time.perf_counter()
        D = dist_matrix(A)
        elapsed += time.perf_counter() - t0
        mismatches += not np.array_equal(D, brute_force_dist(A))
    ok = mismatches == 0 and elapsed < 5.0
    acceptance_report(1, ok, f"{50 - mismatches}/50 exact matches, dist_matrix time {elapsed:.3f}s (< 5s)")
    assert ok


def test_criterion_2_trivial_cover_reduces_to_nbs(acceptance_report):
    rng = np.random.default_rng(202)
    bad = 0
    for k in range(20):
        spec = GraphonSpec("abcdef"[k % 6])
        P = build_prob_matrix(spec, sample_latents(100, rng))
        A = sample_adjacency(P, rng)
        res = nbse(A, Cover.trivial(100))
        ref = nbs_estimate(A, dist_matrix(A), default_bandwidth(100))
        bad += not (res.iterations == 1 and res.deltas == [0.0] and np.array_equal(res.P, ref))
    acceptance_report(2, bad == 0, f"{20 - bad}/20 runs: one correction, delta 0, bit-identical to NBS")
    assert bad == 0


def test_criterion_3_monotone_convergence(acceptance_report):
    rng = np.random.default_rng(303)
    failures = []
    max_iters = 0
    for k in range(20):
        T = (2, 3, 5)[k % 3]
        spec = GraphonSpec("abcdef"[k % 6])
        P = build_prob_matrix(spec, sample_latents(150, rng))
        A = sample_adjacency(P, rng)
        cover = make_chain_cover(150, T, int(rng.integers(2, 11)), seed=rng)
        A_obs = mask_observed(A, observed_set(cover))
        res = nbse(A_obs, cover, NBSEParams(epsilon=1e-4, max_iter=200, seed=k), keep_iterates=True)
        its = res.iterates
        monotone = all(np.all(b >= a) for a, b in zip(its, its[1:]))
        bounded = all(M.min() >= 0 and M.max() <= 1 for M in its)
        if not (monotone and bounded and res.converged and res.deltas[-1] < 1e-4 and res.iterations <= 200):
            failures.append(k)
        max_iters = max(max_iters, res.iterations)
    ok = not failures
    acceptance_report(3, ok, f"{20 - len(failures)}/20 instances monotone, in [0,1], converged (max {max_iters} iterations)")
    assert ok


TABLE1_N = 1000
TABLE1_OVERLAP = 100


@pytest.fixture(scope="module")
def table1_rows():
    out = {}
    for g in "ebc":
        cfg = ExperimentConfig(graphon=g, n=TABLE1_N, scenario="chain", T=5, overlap=TABLE1_OVERLAP,
                               estimators=("nbse", "nbs"), strategy="maximal-tree", replications=5, seed=4)
        out[g] = {est: mean for (_, est, _), (mean, _, _) in summarize(run_simulation(cfg)).items()}
    return out


def test_criterion_4_table1_reproduction(table1_rows, acceptance_report):
    e, b, c = table1_rows["e"], table1_rows["b"], table1_rows["c"]
    checks = {
        "(e) NBSE in [0.07, 0.15]": 0.07 <= e["nbse"] <= 0.15,
        "(e) NBS >= 0.40": e["nbs"] >= 0.40,
        "(b) NBSE in [0.09, 0.20]": 0.09 <= b["nbse"] <= 0.20,
        "(b) NBS >= 0.25": b["nbs"] >= 0.25,
        "(c) |NBSE - NBS| <= 0.05": abs(c["nbse"] - c["nbs"]) <= 0.05,
    }
    detail = (f"e NBSE={e['nbse']:.4f} NBS={e['nbs']:.4f}; b NBSE={b['nbse']:.4f} NBS={b['nbs']:.4f}; "
              f"c NBSE={c['nbse']:.4f} NBS={c['nbs']:.4f}; failing: "
              + (", ".join(k for k, v in checks.items() if not v) or "none"))
    ok = all(checks.values())
    acceptance_report(4, ok, detail)
    assert ok, detail


SWEEP = (0.01, 0.05, 0.1, 0.3)


def sweep_config(graphon, workers=1):
    return ExperimentConfig(graphon=graphon, n=400, scenario="two-block", estimators=("nbse", "nbs"),
                            replications=5, seed=5, workers=workers, timing=False)


@pytest.fixture(scope="module")
def sweep_rows():
    return {g: run_overlap_sweep(sweep_config(g), SWEEP) for g in "abe"}


def test_criterion_5_overlap_trend(sweep_rows, acceptance_report):
    lines, ok = [], True
    for g, rows in sweep_rows.items():
        stats = summarize(rows)
        lo, hi = 4, 120  # 0.01n and 0.3n at n = 400
        nbse_lo, sd_lo, r = stats[(g, "nbse", lo)]
        nbs_lo = stats[(g, "nbs", lo)][0]
        nbse_hi, sd_hi, _ = stats[(g, "nbse", hi)]
        pooled_se = np.sqrt(sd_lo ** 2 / r + sd_hi ** 2 / r)
        good = nbse_lo < nbs_lo and nbse_hi <= nbse_lo + pooled_se
        ok &= good
        lines.append(f"({g}) NBSE {nbse_lo:.4f} vs NBS {nbs_lo:.4f} at 0.01n, NBSE {nbse_hi:.4f} at 0.3n")
    acceptance_report(5, ok, "; ".join(lines))
    assert ok


def test_criterion_6_traversal_insensitivity(acceptance_report):
    ratios = {}
    for g in "abcdef":
        cfg = ExperimentConfig(graphon=g, n=400, scenario="chain", T=5, overlap=40, replications=3, seed=6)
        stats = summarize(run_traversal_study(cfg))
        singles = [stats[(g, f"nbse-trav{k}", 40)][0] for k in (1, 2, 3)]
        ratios[g] = max(singles) / min(singles)
    ok = all(r <= 1.25 for r in ratios.values())
    acceptance_report(6, ok, "max/min single-traversal error ratio " + ", ".join(f"{g}={r:.3f}" for g, r in ratios.items()) + " (<= 1.25)")
    assert ok


def test_criterion_7_determinism(sweep_rows, acceptance_report):
    sweep_csv = {g: rows_to_csv(rows, timing=False) for g, rows in sweep_rows.items()}
    again = {g: rows_to_csv(run_overlap_sweep(sweep_config(g), SWEEP), timing=False) for g in "abe"}
    parallel = {g: rows_to_csv(run_overlap_sweep(sweep_config(g, workers=8), SWEEP), timing=False) for g in "abe"}
    ok = again == sweep_csv and parallel == sweep_csv
    acceptance_report(7, ok, "criterion-5 CSVs byte-identical on rerun and with 8 workers" if ok else "CSV bytes differ")
    assert ok


def test_criterion_8_de2_metric_sandwich(acceptance_report):
    rng = np.random.default_rng(808)
    violations = bound_mismatch = 0
    for _ in range(100):
        m = int(rng.integers(10, 31))
        X = rng.normal(size=(m, int(rng.integers(1, 4))))
        D = np.sqrt(((X[:, None] - X[None]) ** 2).sum(-1))
        perm = rng.permutation(m)
        k = int(rng.integers(1, m - 2))
        s1 = int(rng.integers(1, m - k))
        shared = np.sort(perm[:k])
        only1 = np.sort(perm[k:k + s1])
        only2 = np.sort(perm[k + s1:])
        V1, V2 = np.union1d(shared, only1), np.union1d(shared, only2)
        upper, lower = triangle_bounds(D[np.ix_(only1, shared)], D[np.ix_(only2, shared)])
        for a, i in enumerate(only1):
            for b, j in enumerate(only2):
                lows = [abs(D[i, r] - D[j, r]) for r in shared]
                ups = [D[i, r] + D[j, r] for r in shared]
                # floating-point slack for the metric inequality itself
                violations += any(lo > D[i, j] + 1e-12 or D[i, j] > up + 1e-12 for lo, up in zip(lows, ups))
                bound_mismatch += not (lower[a, b] == max(lows) and upper[a, b] == min(ups))
        merged = de2(PartialDistance(V1, D[np.ix_(V1, V1)]), PartialDistance(V2, D[np.ix_(V2, V2)]))
        cross = merged.dist[np.ix_(np.searchsorted(merged.vertices, only1), np.searchsorted(merged.vertices, only2))]
        violations += int(np.sum((cross < lower - 1e-12) | (cross > upper + 1e-12)))
    ok = violations == 0 and bound_mismatch == 0
    acceptance_report(8, ok, f"{violations} sandwich violations, {bound_mismatch} bound mismatches over 100 point sets")
    assert ok
