"""Exhaustive kNN: the baseline engine and the correctness oracle."""
from __future__ import annotations

import numpy as np

from .core import Neighbor, as_dataset, as_point, squared_distances
from .errors import InvalidParameterError

STRATEGIES = ("select", "sort")


def _check_k(k, n, upper=None):
    upper = n if upper is None else upper
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool):
        raise InvalidParameterError(f"k must be an integer, got {k!r}")
    if not 1 <= k <= upper:
        raise InvalidParameterError(f"k={k} out of range [1, {upper}] for n={n}")


def select_smallest(d2: np.ndarray, k: int, strategy: str) -> list[Neighbor]:
    if strategy == "sort":
        order = np.argsort(d2, kind="stable")[:k]
    elif strategy == "select":
        if k < len(d2):
            part = np.argpartition(d2, k - 1)[:k]
        else:
            part = np.arange(len(d2))
        order = part[np.lexsort((part, d2[part]))]
    else:
        raise InvalidParameterError(f"unknown strategy {strategy!r}; use one of {STRATEGIES}")
    return [Neighbor(int(i), float(d2[i])) for i in order]


def brute_knn(refs, query, k: int, strategy: str = "select") -> list[Neighbor]:
    """The ``k`` reference points closest to ``query``, nearest first.

    A reference point identical to the query is *not* excluded. ``strategy``
    picks a full sort (``"sort"``) or a partial selection followed by sorting
    the selected ``k`` (``"select"``); both give the same answer up to ties.
    """
    refs = as_dataset(refs)
    q = as_point(query, refs.shape[1])
    _check_k(k, len(refs))
    return select_smallest(squared_distances(refs, q), k, strategy)


def brute_knn_batch(refs, queries, k: int, strategy: str = "select") -> list[list[Neighbor]]:
    refs = as_dataset(refs)
    queries = as_dataset(queries, allow_empty=True, d=refs.shape[1])
    if len(queries) == 0:
        return []
    return [brute_knn(refs, q, k, strategy) for q in queries]


def brute_knn_join(points, k: int) -> list[list[Neighbor]]:
    """For each point, its ``k`` nearest *other* points (self excluded by index)."""
    points = as_dataset(points, allow_empty=True)
    n = len(points)
    if n < 2:
        raise InvalidParameterError(f"a kNN join needs at least 2 points, got {n}")
    _check_k(k, n, upper=n - 1)
    rows = []
    for i in range(n):
        d2 = squared_distances(points, points[i])
        d2[i] = np.inf
        rows.append(select_smallest(d2, k, "select"))
    return rows
