"""Points files: one point per line, comma-separated decimal coordinates.

Lines starting with ``#`` are comments and blank lines are skipped. Writing
uses Python's shortest round-trip float repr, so reading back is lossless.
"""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from ..core import as_dataset
from ..errors import PointsParseError


def parse_points(text: str, path="<string>") -> np.ndarray:
    rows = []
    d = None
    lineno = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split(",")
        try:
            row = [float(f) for f in fields]
        except ValueError:
            raise PointsParseError(path, lineno, f"non-numeric field in {stripped!r}") from None
        if not all(math.isfinite(c) for c in row):
            raise PointsParseError(path, lineno, "non-finite coordinate")
        if d is None:
            d = len(row)
        elif len(row) != d:
            raise PointsParseError(path, lineno, f"expected {d} coordinates, found {len(row)}")
        rows.append(row)
    if not rows:
        raise PointsParseError(path, max(lineno, 1), "no points found")
    return np.array(rows, dtype=np.float64)


def read_points(path) -> np.ndarray:
    path = Path(path)
    return parse_points(path.read_text(), path)


def format_points(points) -> str:
    points = as_dataset(points, allow_empty=True)
    return "".join(",".join(repr(c) for c in row) + "\n" for row in points.tolist())


def write_points(points, path) -> None:
    Path(path).write_text(format_points(points))
