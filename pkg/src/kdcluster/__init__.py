"""k-d tree nearest-neighbour search and kNN-graph spatial clustering."""
from .bruteforce import brute_knn, brute_knn_batch, brute_knn_join
from .clustering import (ClusterLabeling, ClusterParams, KnnGraph, build_knn_graph, cluster,
                         connected_components)
from .core import AxisBox, Neighbor, box_distance2, incremental_box_distance2, squared_euclidean
from .errors import (InternalInvariantError, InvalidInputError, InvalidParameterError,
                     KdClusterError, PointsParseError)
from .kdtree import (KdTree, SearchParams, SearchStats, TreeStats, approx_knn_search, build,
                     knn_search, nn_search, tree_stats)

__version__ = "0.1.0"
