"""Median-split k-d tree with exact and (1+eps)-approximate kNN search.

Construction cycles the split dimension with depth and cuts each subset at
its median, so sibling subtrees differ in size by at most one point. Leaves
hold up to ``bucket_size`` points.

Two search orders are provided:

* ``standard``: depth-first, nearer child first, the farther child is
  visited on unwind only if its cell could still hold a better point.
* ``priority``: cells are visited globally in increasing distance from the
  query, using a heap, until the closest unvisited cell is too far.

Cell-to-query distances are tracked incrementally: cutting a cell changes
only the split dimension's term of the squared distance.
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Union

import numpy as np

from .core import AxisBox, Neighbor, as_dataset, as_point, box_distance2
from .errors import InvalidParameterError

DEFAULT_BUCKET_SIZE = 8
ORDERS = ("standard", "priority")


@dataclass(frozen=True, slots=True)
class LeafNode:
    point_indices: tuple[int, ...]
    # coordinates of the indexed points, parallel to point_indices
    points: tuple[tuple[float, ...], ...] = field(repr=False, compare=False)


@dataclass(frozen=True, slots=True)
class SplitNode:
    split_dim: int
    split_value: float
    # extent of this node's cell along split_dim
    cell_low: float
    cell_high: float
    left: "Node"
    right: "Node"


Node = Union[SplitNode, LeafNode]


@dataclass(frozen=True)
class SearchParams:
    k: int = 1
    epsilon: float = 0.0
    order: str = "standard"

    def __post_init__(self):
        if not isinstance(self.k, (int, np.integer)) or isinstance(self.k, bool) or self.k < 1:
            raise InvalidParameterError(f"k must be a positive integer, got {self.k!r}")
        if not (math.isfinite(self.epsilon) and self.epsilon >= 0):
            raise InvalidParameterError(f"epsilon must be finite and >= 0, got {self.epsilon!r}")
        if self.order not in ORDERS:
            raise InvalidParameterError(f"order must be one of {ORDERS}, got {self.order!r}")


@dataclass
class SearchStats:
    """Counters accumulated over one or more searches."""
    leaf_points: int = 0
    leaves: int = 0
    splits: int = 0
    queries: int = 0


@dataclass(frozen=True)
class TreeStats:
    node_count: int
    leaf_count: int
    depth: int
    bucket_size: int
    n: int
    dim: int


class KdTree:
    """Immutable k-d tree over a fixed dataset.

    Use :func:`build` (or ``KdTree(points, bucket_size)``). The tree keeps a
    reference to the float64 copy of the data in ``self.data``; indices in
    every answer are row offsets into it.
    """

    def __init__(self, points, bucket_size: int = DEFAULT_BUCKET_SIZE):
        if not isinstance(bucket_size, (int, np.integer)) or bucket_size < 1:
            raise InvalidParameterError(f"bucket_size must be >= 1, got {bucket_size!r}")
        data = as_dataset(points)
        data.setflags(write=False)
        self.data = data
        self.n, self.dim = data.shape
        self.bucket_size = int(bucket_size)
        self.bounds = AxisBox.bounding(data)
        coords = [tuple(row) for row in data.tolist()]
        self.root = self._build(np.arange(self.n), 0,
                                list(self.bounds.low), list(self.bounds.high), coords)

    def _build(self, idx, depth, cell_low, cell_high, coords) -> Node:
        m = len(idx)
        if m <= self.bucket_size:
            ids = tuple(idx.tolist())
            return LeafNode(ids, tuple(coords[i] for i in ids))
        dim = depth % self.dim
        order = idx[np.argsort(self.data[idx, dim], kind="stable")]
        # left gets ceil(m/2) points, so |left| - |right| is 0 or 1; ties at
        # the median may land on either side
        half = (m + 1) // 2
        value = float(self.data[order[m // 2], dim])
        left_high = cell_high.copy()
        left_high[dim] = value
        right_low = cell_low.copy()
        right_low[dim] = value
        left = self._build(order[:half], depth + 1, cell_low, left_high, coords)
        right = self._build(order[half:], depth + 1, right_low, cell_high, coords)
        return SplitNode(dim, value, cell_low[dim], cell_high[dim], left, right)

    # -- traversal helpers -------------------------------------------------

    def walk(self) -> Iterator[tuple[Node, int, AxisBox]]:
        """Yield ``(node, depth, cell)`` for every node, pre-order; root depth is 1."""
        stack = [(self.root, 1, self.bounds)]
        while stack:
            node, depth, cell = stack.pop()
            yield node, depth, cell
            if isinstance(node, SplitNode):
                lo, hi = cell.split(node.split_dim, node.split_value)
                stack.append((node.right, depth + 1, hi))
                stack.append((node.left, depth + 1, lo))

    def leaves(self) -> Iterator[LeafNode]:
        for node, _, _ in self.walk():
            if isinstance(node, LeafNode):
                yield node

    def stats(self) -> TreeStats:
        nodes = leaves = depth = 0
        for node, d, _ in self.walk():
            nodes += 1
            leaves += isinstance(node, LeafNode)
            depth = max(depth, d)
        return TreeStats(nodes, leaves, depth, self.bucket_size, self.n, self.dim)

    # -- queries -------------------------------------------------------------

    def nn_search(self, query) -> Neighbor:
        return self.approx_knn_search(query, SearchParams(1))[0]

    def knn_search(self, query, k: int) -> list[Neighbor]:
        return self.approx_knn_search(query, SearchParams(k))

    def approx_knn_search(self, query, params: SearchParams = SearchParams(),
                          stats: SearchStats | None = None,
                          exclude: int | None = None) -> list[Neighbor]:
        """The ``params.k`` (approximately) nearest points to ``query``.

        For every rank i the returned distance is within a factor
        ``1 + epsilon`` of the true i-th nearest distance (true, not squared,
        distance). ``exclude`` drops one point index from consideration,
        which is how a point's neighbours are found among the others.
        """
        q = as_point(query, self.dim)
        available = self.n - (exclude is not None and 0 <= exclude < self.n)
        if params.k > available:
            raise InvalidParameterError(
                f"k={params.k} exceeds the {available} searchable points")
        scale = (1.0 + params.epsilon) ** 2
        if stats is None:
            stats = SearchStats()
        stats.queries += 1
        excl = -1 if exclude is None else exclude
        if params.order == "standard":
            heap = self._standard(q, params.k, scale, excl, stats)
        else:
            heap = self._priority(q, params.k, scale, excl, stats)
        return [Neighbor(i, d) for d, i in sorted((-nd, i) for nd, i in heap)]

    def _standard(self, q, k, scale, exclude, stats):
        # heap holds (-dist2, index); worst is the current k-th best dist2
        heap: list[tuple[float, int]] = []
        worst = math.inf
        examined = leaves = splits = 0

        def visit(node, box_d2):
            nonlocal worst, examined, leaves, splits
            if node.__class__ is LeafNode:
                leaves += 1
                examined += len(node.point_indices)
                for i, p in zip(node.point_indices, node.points):
                    if i == exclude:
                        continue
                    d2 = 0.0
                    for a, b in zip(p, q):
                        t = a - b
                        d2 += t * t
                    if d2 < worst:
                        if len(heap) < k:
                            heapq.heappush(heap, (-d2, i))
                            if len(heap) == k:
                                worst = -heap[0][0]
                        else:
                            heapq.heapreplace(heap, (-d2, i))
                            worst = -heap[0][0]
                return
            splits += 1
            qc = q[node.split_dim]
            cut = qc - node.split_value
            if cut < 0:
                visit(node.left, box_d2)
                old = node.cell_low - qc
                far = node.right
            else:
                visit(node.right, box_d2)
                old = qc - node.cell_high
                far = node.left
            # inlined incremental_box_distance2
            rest = box_d2 - old * old if old > 0 else box_d2
            far_d2 = (rest if rest > 0 else 0.0) + cut * cut
            if far_d2 * scale < worst:
                visit(far, far_d2)

        visit(self.root, box_distance2(self.bounds, q))
        stats.leaf_points += examined
        stats.leaves += leaves
        stats.splits += splits
        return heap

    def _priority(self, q, k, scale, exclude, stats):
        heap: list[tuple[float, int]] = []
        worst = math.inf
        examined = leaves = splits = 0
        tiebreak = itertools.count()
        cells = [(box_distance2(self.bounds, q), 0, self.root)]
        while cells:
            box_d2, _, node = heapq.heappop(cells)
            if box_d2 * scale >= worst:
                break
            while node.__class__ is SplitNode:
                splits += 1
                qc = q[node.split_dim]
                cut = qc - node.split_value
                if cut < 0:
                    old = node.cell_low - qc
                    near, far = node.left, node.right
                else:
                    old = qc - node.cell_high
                    near, far = node.right, node.left
                rest = box_d2 - old * old if old > 0 else box_d2
                far_d2 = (rest if rest > 0 else 0.0) + cut * cut
                if far_d2 * scale < worst:
                    heapq.heappush(cells, (far_d2, next(tiebreak) + 1, far))
                node = near
            leaves += 1
            examined += len(node.point_indices)
            for i, p in zip(node.point_indices, node.points):
                if i == exclude:
                    continue
                d2 = 0.0
                for a, b in zip(p, q):
                    t = a - b
                    d2 += t * t
                if d2 < worst:
                    if len(heap) < k:
                        heapq.heappush(heap, (-d2, i))
                        if len(heap) == k:
                            worst = -heap[0][0]
                    else:
                        heapq.heapreplace(heap, (-d2, i))
                        worst = -heap[0][0]
        stats.leaf_points += examined
        stats.leaves += leaves
        stats.splits += splits
        return heap


def build(points, bucket_size: int = DEFAULT_BUCKET_SIZE) -> KdTree:
    return KdTree(points, bucket_size)


def nn_search(tree: KdTree, query) -> Neighbor:
    return tree.nn_search(query)


def knn_search(tree: KdTree, query, k: int) -> list[Neighbor]:
    return tree.knn_search(query, k)


def approx_knn_search(tree: KdTree, query, params: SearchParams,
                      stats: SearchStats | None = None) -> list[Neighbor]:
    return tree.approx_knn_search(query, params, stats)


def tree_stats(tree: KdTree) -> TreeStats:
    return tree.stats()
