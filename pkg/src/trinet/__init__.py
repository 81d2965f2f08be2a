"""Connected-dense-connected pattern mining on triple networks.

A triple network joins two node graphs ``G_a`` and ``G_b`` with a bipartite
graph ``G_c``; the miners look for node-set pairs with many ``G_c`` edges
relative to ``sqrt(|S_a| * |S_b|)`` under connectivity constraints.
"""
__version__ = "0.1.0"

from .network import (EmptyBipartiteError, NodeIndexError, NodeRef, NodeSetPair, NoCandidateError,
                      ScoredSubgraph, Side, TrinetError, TripleNetwork, bipartite_components,
                      bipartite_edge_count, connected_components, density, is_connected, score)
from .io import TrinetParseError, checksum, dumps, load_triple_network, write_triple_network
from .mds import MdsTooLargeError, enumerate_ratios, mds_densest_bipartite
from .peel import PeelCriterion, fast_rank_deletion, greedy_peel, peel_trajectory
from .patterns import MineParams, PatternKind, PatternResult, mine, mine_cdc, mine_ocd
from .local_search import SeedError, SeedSpec, local_search, seed_spanning_tree
from .generators import GenSpec, GeneratorError, degree_histogram, generate, grid_spec
from .oracle import OracleLimitError, brute_force_cdc, brute_force_densest_bipartite, brute_force_ocd

__all__ = [name for name in dir() if not name.startswith("_")]
