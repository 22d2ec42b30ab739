"""Spatial clustering from approximate kNN graphs.

Every point is linked to its k (approximately) nearest other points, links
longer than an optional distance threshold are dropped, and the connected
components of what remains are the clusters.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bruteforce import brute_knn_join
from .core import Neighbor, as_dataset
from .errors import InvalidParameterError
from .kdtree import DEFAULT_BUCKET_SIZE, KdTree, SearchParams

LINKAGES = ("unilateral", "mutual")
ENGINES = ("kdtree", "brute")


@dataclass(frozen=True)
class ClusterParams:
    """``dist_threshold=None`` means unbounded; it is a true (not squared) distance."""
    k: int = 3
    epsilon: float = 0.0
    dist_threshold: float | None = None
    linkage: str = "unilateral"
    order: str = "standard"

    def __post_init__(self):
        # reuse SearchParams validation for k / epsilon / order
        SearchParams(self.k, self.epsilon, self.order)
        if self.dist_threshold is not None and not self.dist_threshold > 0:
            raise InvalidParameterError(
                f"dist_threshold must be > 0 or None, got {self.dist_threshold!r}")
        if self.linkage not in LINKAGES:
            raise InvalidParameterError(f"linkage must be one of {LINKAGES}, got {self.linkage!r}")


@dataclass(frozen=True)
class KnnGraph:
    n: int
    # (i, j) with i < j  ->  squared distance
    edges: dict[tuple[int, int], float]

    def __len__(self):
        return len(self.edges)


@dataclass(frozen=True)
class ClusterLabeling:
    labels: tuple[int, ...]
    cluster_count: int

    def sizes(self) -> list[int]:
        return np.bincount(self.labels, minlength=self.cluster_count).tolist()


def _check_join(n, k):
    if n < 2:
        raise InvalidParameterError(f"clustering needs at least 2 points, got {n}")
    if k > n - 1:
        raise InvalidParameterError(f"k={k} exceeds n-1={n - 1}")


def graph_from_neighbors(rows: list[list[Neighbor]], params: ClusterParams) -> KnnGraph:
    """Turn per-point neighbour lists into an undirected graph per ``params.linkage``."""
    n = len(rows)
    limit = math.inf if params.dist_threshold is None else params.dist_threshold
    arcs = {}
    for i, row in enumerate(rows):
        for nb in row:
            if nb.index != i and math.sqrt(nb.dist2) <= limit:
                arcs[i, nb.index] = nb.dist2
    edges = {}
    for (i, j), d2 in arcs.items():
        key = (i, j) if i < j else (j, i)
        if key in edges:
            continue
        if params.linkage == "mutual" and (j, i) not in arcs:
            continue
        edges[key] = d2
    return KnnGraph(n, edges)


def build_knn_graph(points, params: ClusterParams, index: KdTree | None = None) -> KnnGraph:
    points = as_dataset(points, allow_empty=True)
    n = len(points)
    _check_join(n, params.k)
    if index is None:
        index = KdTree(points)
    elif index.n != n or not np.array_equal(index.data, points):
        raise InvalidParameterError("index was built over a different dataset")
    search = SearchParams(params.k, params.epsilon, params.order)
    rows = [index.approx_knn_search(p, search, exclude=i) for i, p in enumerate(points)]
    return graph_from_neighbors(rows, params)


def connected_components(graph: KnnGraph) -> ClusterLabeling:
    """Label components; numbering follows each component's smallest point index."""
    parent = list(range(graph.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in graph.edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            # keep the smaller index as root
            if ri < rj:
                parent[rj] = ri
            else:
                parent[ri] = rj

    labels = []
    ids: dict[int, int] = {}
    for v in range(graph.n):
        root = find(v)
        if root not in ids:
            ids[root] = len(ids)
        labels.append(ids[root])
    return ClusterLabeling(tuple(labels), len(ids))


def cluster(points, params: ClusterParams = ClusterParams(), engine: str = "kdtree",
            bucket_size: int = DEFAULT_BUCKET_SIZE) -> ClusterLabeling:
    """Cluster ``points`` by kNN-graph connectivity.

    ``engine="brute"`` swaps the tree search for an exact brute-force kNN
    join (epsilon is then ignored); it exists as a reference pipeline.
    """
    points = as_dataset(points, allow_empty=True)
    _check_join(len(points), params.k)
    if engine == "kdtree":
        graph = build_knn_graph(points, params, KdTree(points, bucket_size))
    elif engine == "brute":
        graph = graph_from_neighbors(brute_knn_join(points, params.k), params)
    else:
        raise InvalidParameterError(f"engine must be one of {ENGINES}, got {engine!r}")
    return connected_components(graph)
