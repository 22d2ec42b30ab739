"""Points, squared distances and axis-aligned boxes.

Coordinates are float64 throughout. Every comparison in the library is done
on squared Euclidean distances; square roots are only taken for display.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InternalInvariantError, InvalidInputError

# relative slack allowed when an incremental update subtracts slightly more
# than the parent total because of rounding
_INCREMENTAL_RTOL = 1e-12


class Neighbor(NamedTuple):
    index: int
    dist2: float

    @property
    def distance(self) -> float:
        return math.sqrt(self.dist2)


def as_point(p, d: int | None = None) -> tuple[float, ...]:
    """Validate ``p`` and return it as a tuple of floats."""
    try:
        coords = tuple(float(c) for c in p)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"not a point: {p!r}") from exc
    if not coords:
        raise InvalidInputError("a point needs at least one coordinate")
    if d is not None and len(coords) != d:
        raise InvalidInputError(f"point has dimension {len(coords)}, expected {d}")
    if not all(math.isfinite(c) for c in coords):
        raise InvalidInputError(f"point has non-finite coordinates: {coords}")
    return coords


def as_dataset(points, allow_empty: bool = False, d: int | None = None) -> np.ndarray:
    """Coerce ``points`` to a C-contiguous ``(n, d)`` float64 array.

    Raises :class:`InvalidInputError` on ragged input, NaN/inf coordinates or
    (unless ``allow_empty``) an empty set.
    """
    try:
        arr = np.asarray(points, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"cannot interpret points as a 2-d array: {exc}") from exc
    if arr.ndim == 1 and arr.size == 0:
        arr = arr.reshape(0, d or 0)
    if arr.ndim != 2:
        raise InvalidInputError(f"expected an (n, d) array, got shape {arr.shape}")
    if arr.shape[0] == 0 and not allow_empty:
        raise InvalidInputError("dataset is empty")
    if arr.shape[0] and arr.shape[1] == 0:
        raise InvalidInputError("points need at least one coordinate")
    if d is not None and arr.shape[0] and arr.shape[1] != d:
        raise InvalidInputError(f"dataset has dimension {arr.shape[1]}, expected {d}")
    if not np.isfinite(arr).all():
        raise InvalidInputError("dataset contains non-finite coordinates")
    return np.ascontiguousarray(arr)


def squared_euclidean(p: Sequence[float], q: Sequence[float]) -> float:
    """Sum of squared coordinate differences.

    Accumulates left to right starting from the first dimension; the
    vectorised path in :func:`squared_distances` uses the same order so the
    two agree bit for bit.
    """
    if len(p) != len(q):
        raise InvalidInputError(f"dimension mismatch: {len(p)} vs {len(q)}")
    s = 0.0
    for a, b in zip(p, q):
        t = a - b
        s += t * t
    return float(s)


def squared_distances(points: np.ndarray, q: Sequence[float]) -> np.ndarray:
    """Squared distances from every row of ``points`` to ``q``."""
    q = np.asarray(q, dtype=np.float64)
    if points.ndim != 2 or q.shape != (points.shape[1],):
        raise InvalidInputError(
            f"dimension mismatch: points {points.shape}, query {q.shape}")
    diff = points - q
    out = diff[:, 0] * diff[:, 0]
    for i in range(1, points.shape[1]):
        out += diff[:, i] * diff[:, i]
    return out


@dataclass(frozen=True)
class AxisBox:
    low: tuple[float, ...]
    high: tuple[float, ...]

    def __post_init__(self):
        if len(self.low) != len(self.high):
            raise InvalidInputError("box corners differ in dimension")
        if any(lo > hi for lo, hi in zip(self.low, self.high)):
            raise InvalidInputError(f"inverted box: {self.low} > {self.high}")

    @classmethod
    def bounding(cls, points: np.ndarray) -> "AxisBox":
        return cls(tuple(points.min(axis=0).tolist()), tuple(points.max(axis=0).tolist()))

    @property
    def dim(self) -> int:
        return len(self.low)

    def contains(self, q: Sequence[float]) -> bool:
        return all(lo <= c <= hi for lo, c, hi in zip(self.low, q, self.high))

    def split(self, dim: int, value: float) -> tuple["AxisBox", "AxisBox"]:
        """Cut the box by the plane ``x[dim] = value`` into (lower, upper)."""
        if not self.low[dim] <= value <= self.high[dim]:
            raise InvalidInputError(f"cut {value} outside box along dimension {dim}")
        lo_high = self.high[:dim] + (value,) + self.high[dim + 1:]
        hi_low = self.low[:dim] + (value,) + self.low[dim + 1:]
        return AxisBox(self.low, lo_high), AxisBox(hi_low, self.high)


def axis_offset(low: float, high: float, c: float) -> float:
    """Distance from coordinate ``c`` to the interval ``[low, high]``."""
    if c < low:
        return low - c
    if c > high:
        return c - high
    return 0.0


def box_distance2(box: AxisBox, q: Sequence[float]) -> float:
    """Squared distance from ``q`` to the closest point of ``box`` (0 inside)."""
    if len(q) != box.dim:
        raise InvalidInputError(f"dimension mismatch: box {box.dim}, point {len(q)}")
    s = 0.0
    for lo, hi, c in zip(box.low, box.high, q):
        t = axis_offset(lo, hi, c)
        s += t * t
    return s


def incremental_box_distance2(parent_dist2: float, old_offset2: float,
                              new_offset2: float) -> float:
    """Child-box squared distance from the parent's.

    Only the split dimension's contribution changes when a box is cut, so the
    child distance is the parent total with ``old_offset2`` swapped for
    ``new_offset2``.
    """
    rest = parent_dist2 - old_offset2
    if rest < 0.0:
        if rest < -_INCREMENTAL_RTOL * max(parent_dist2, old_offset2):
            raise InternalInvariantError(
                f"old offset {old_offset2} exceeds parent distance {parent_dist2}")
        rest = 0.0
    return rest + new_offset2
