"""Distance-based phylogenetic tree reconstruction on ranked spanning trees.

Builds phylogenies from tree-additive distance matrices by neighborhood
grouping over a minimum spanning tree, with rank-refined edge ordering that
makes the spanning tree unique, and a weight-class sweep that picks the
ranking whose spanning tree has the fewest leaves (that is, the most
independently reconstructable groups).
"""

from .dsu import DisjointSetForest
from .errors import (
    ClgrouperError,
    ContractViolationError,
    EdgeListFormatError,
    InvalidMatrixError,
    InvalidRankingError,
    InvalidTreeError,
    MatrixFormatError,
    NewickParseError,
    NonAdditivityWarning,
    SizeGuardError,
    TaxonMismatchError,
)
from .grouping import (
    ReconstructionState,
    clgrouping,
    extend_hidden_distance,
    nj_generally_labeled,
    vertex_groups,
)
from .min_leaf import (
    ComponentEdge,
    ComponentGraph,
    LaminarFamily,
    LaminarSet,
    MinLeafResult,
    SweepResult,
    laminar_family,
    min_leaf_vrmst,
    ranking_from_degrees,
    weight_class_sweep,
)
from .model import (
    DEFAULT_TOL,
    DistanceMatrix,
    PhyloTree,
    SpanningTree,
    VertexRanking,
    additive_distances,
    check_additivity,
    count_leaves,
    trees_equal,
    weight_classes,
)
from .oracle import (
    enumerate_msts,
    min_leaf_vrmst_bruteforce,
    mst_max_degrees_bruteforce,
)
from .ranked_mst import (
    EdgeOrderKey,
    SurrogateMap,
    edge_order_key,
    kruskal_plain,
    kruskal_vertex_ranked,
    surrogate_map,
)
from .simulate import gen_balanced, gen_caterpillar, gen_random
from .treeio import (
    format_edge_list,
    parse_edge_list,
    parse_newick,
    read_distance_matrix,
    spanning_tree_from_edges,
    write_distance_matrix,
    write_newick,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "ClgrouperError",
    "ComponentEdge",
    "ComponentGraph",
    "ContractViolationError",
    "DisjointSetForest",
    "DistanceMatrix",
    "EdgeListFormatError",
    "EdgeOrderKey",
    "InvalidMatrixError",
    "InvalidRankingError",
    "InvalidTreeError",
    "LaminarFamily",
    "LaminarSet",
    "MatrixFormatError",
    "MinLeafResult",
    "NewickParseError",
    "NonAdditivityWarning",
    "PhyloTree",
    "ReconstructionState",
    "SizeGuardError",
    "SpanningTree",
    "SurrogateMap",
    "SweepResult",
    "TaxonMismatchError",
    "VertexRanking",
    "additive_distances",
    "check_additivity",
    "clgrouping",
    "count_leaves",
    "edge_order_key",
    "enumerate_msts",
    "extend_hidden_distance",
    "format_edge_list",
    "gen_balanced",
    "gen_caterpillar",
    "gen_random",
    "kruskal_plain",
    "kruskal_vertex_ranked",
    "laminar_family",
    "min_leaf_vrmst",
    "min_leaf_vrmst_bruteforce",
    "mst_max_degrees_bruteforce",
    "nj_generally_labeled",
    "parse_edge_list",
    "parse_newick",
    "ranking_from_degrees",
    "read_distance_matrix",
    "spanning_tree_from_edges",
    "surrogate_map",
    "trees_equal",
    "vertex_groups",
    "weight_class_sweep",
    "weight_classes",
    "write_distance_matrix",
    "write_newick",
]
