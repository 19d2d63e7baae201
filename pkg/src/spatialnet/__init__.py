"""spatialnet: spatial complex-network analysis for interregional road
and commuting systems.

Subpackage map:

* graph        validated spatial graphs, shortest paths with path counts
* measures     per-node and global topology/centrality measures
* null_models  degree-preserving randomized and latticeized ensembles
* small_world  the omega index and its classification
* communities  modularity and multi-level greedy detection
* fitting      degree-distribution and degree-scaling curve fits
* empirical    Pearson gating, representative selection, OLS regression
* io / cli     CSV formats, JSON reports, command-line entry point
"""

__version__ = "0.1.0"

from .graph import (  # noqa: F401
    EdgeRecord,
    NodeRecord,
    PathTable,
    SpatialGraph,
    build_graph,
    shortest_paths,
)
