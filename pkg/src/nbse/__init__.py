"""Edge-probability estimation for graphon networks observed through overlapping subgraphs."""

from nbse.matrix import frobenius_error, mask_observed, submatrix
from nbse.graphons import GraphonSpec, build_prob_matrix, eval_graphon, sample_adjacency, sample_latents
from nbse.cover import (
    Cover,
    SuperGraph,
    build_supergraph,
    generate_traversal,
    make_chain_cover,
    make_two_block_cover,
    maximal_spanning_tree,
    observed_set,
    random_spanning_tree,
    validate_cover,
)
from nbse.distance import dist_for_blocks, dist_matrix
from nbse.smoothing import default_bandwidth, nbs_estimate, neighbourhoods
from nbse.extension import (
    NBSEParams,
    PartialDistance,
    average_distance,
    de,
    de2,
    f_corr,
    nbse,
    nbse0,
)
from nbse.baselines import nbs_vanilla, usvt

__version__ = "0.1.0"

__all__ = [
    "Cover",
    "GraphonSpec",
    "NBSEParams",
    "PartialDistance",
    "SuperGraph",
    "average_distance",
    "build_prob_matrix",
    "build_supergraph",
    "de",
    "de2",
    "default_bandwidth",
    "dist_for_blocks",
    "dist_matrix",
    "eval_graphon",
    "f_corr",
    "frobenius_error",
    "generate_traversal",
    "make_chain_cover",
    "make_two_block_cover",
    "mask_observed",
    "maximal_spanning_tree",
    "nbs_estimate",
    "nbs_vanilla",
    "nbse",
    "nbse0",
    "neighbourhoods",
    "observed_set",
    "random_spanning_tree",
    "sample_adjacency",
    "sample_latents",
    "submatrix",
    "usvt",
    "validate_cover",
]
