import numpy as np
import pytest

from nbse.cover import Cover, make_chain_cover, observed_set
from nbse.distance import dist_for_blocks, dist_matrix
from nbse.graphons import GraphonSpec, build_prob_matrix, sample_adjacency, sample_latents
from nbse.matrix import mask_observed, submatrix

from conftest import random_adjacency
from oracles import brute_force_dist


def test_identical_rows_have_zero_distance():
    A = np.array([[0, 0, 1, 1], [0, 0, 1, 1], [1, 1, 0, 0], [1, 1, 0, 0]], float)
    assert dist_matrix(A)[0, 1] == 0.0


def test_hand_computed_three_vertex_case():
    A = np.zeros((3, 3))
    A[0, 2] = A[2, 0] = 1
    D = dist_matrix(A)
    assert D[0, 1] == 0.0
    # d(0, 2): only k = 1, whose row is empty, so every inner product is 0
    assert D[0, 2] == 0.0
    assert np.array_equal(D, brute_force_dist(A))


@pytest.mark.parametrize("seed", range(12))
def test_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 16))
    A = random_adjacency(rng, n, rng.uniform(0.1, 0.9))
    assert np.array_equal(dist_matrix(A), brute_force_dist(A))


def test_range_symmetry_and_equivariance(rng):
    A = random_adjacency(rng, 30)
    D = dist_matrix(A)
    assert np.array_equal(D, D.T)
    assert np.all(np.diag(D) == 0)
    assert D.min() >= 0 and D.max() <= 1
    perm = rng.permutation(30)
    Dp = dist_matrix(A[np.ix_(perm, perm)])
    assert np.array_equal(Dp, D[np.ix_(perm, perm)])


def test_chunk_boundaries_do_not_matter(rng, monkeypatch):
    import nbse.distance as mod

    A = random_adjacency(rng, 23)
    ref = dist_matrix(A)
    monkeypatch.setattr(mod, "_CHUNK", 5)
    assert np.array_equal(dist_matrix(A), ref)


def test_rejects_tiny_graphs():
    with pytest.raises(ValueError):
        dist_matrix(np.zeros((2, 2)))


def test_dist_for_blocks_reductions(rng):
    A = random_adjacency(rng, 9)
    out = dist_for_blocks(A, Cover.trivial(9))
    assert len(out) == 1 and np.array_equal(out[0], dist_matrix(A))
    a, b = dist_for_blocks(A, Cover(9, [range(9), range(9)]))
    assert np.array_equal(a, b)


def test_dist_for_blocks_on_sampled_graph():
    P = build_prob_matrix(GraphonSpec("f"), sample_latents(40, 1))
    A = sample_adjacency(P, 2)
    cover = make_chain_cover(40, 3, 3, seed=4)
    A_obs = mask_observed(A, observed_set(cover))
    for block, D in zip(cover.blocks, dist_for_blocks(A_obs, cover)):
        assert np.array_equal(D, brute_force_dist(submatrix(A_obs, block)))


def test_dist_for_blocks_rejects_small_block():
    with pytest.raises(ValueError, match="block 2"):
        dist_for_blocks(np.zeros((5, 5)), Cover(5, [[0, 1, 2, 3], [3, 4]]))
