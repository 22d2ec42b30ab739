"""Seeded synthetic point sets (uniform boxes and Gaussian blobs)."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..errors import InvalidParameterError

BYTES_PER_COORD = 8
BYTES_PER_MB = 2 ** 20
RNG_ALGORITHM = "numpy PCG64 seeded by SeedSequence(seed, spawn_key=(stream,))"

# independent random streams derived from one seed
STREAM_DATA = 0
STREAM_QUERIES = 1
STREAM_CENTERS = 2

MODES = ("uniform", "blobs")


def points_for_size(size_mb: float, d: int) -> int:
    """Number of float64 points of dimension ``d`` that fit in ``size_mb`` MiB."""
    return math.floor(size_mb * BYTES_PER_MB / (BYTES_PER_COORD * d))


@dataclass(frozen=True)
class GenSpec:
    """What to generate. Set exactly one of ``n`` and ``size_mb``.

    ``bounds`` is a single ``(low, high)`` range applied to every dimension.
    In blobs mode ``centers`` may be given explicitly; otherwise
    ``n_centers`` centres are drawn uniformly inside ``bounds``.
    """
    mode: str = "uniform"
    d: int = 2
    seed: int = 0
    n: int | None = None
    size_mb: float | None = None
    bounds: tuple[float, float] = (0.0, 1.0)
    centers: tuple[tuple[float, ...], ...] | None = None
    n_centers: int = 2
    sigma: float = 1.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidParameterError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.d < 1:
            raise InvalidParameterError(f"dimension must be >= 1, got {self.d}")
        if (self.n is None) == (self.size_mb is None):
            raise InvalidParameterError("set exactly one of n and size_mb")
        if self.n is not None and self.n < 0:
            raise InvalidParameterError(f"n must be >= 0, got {self.n}")
        if self.size_mb is not None and not self.size_mb > 0:
            raise InvalidParameterError(f"size_mb must be > 0, got {self.size_mb}")
        lo, hi = self.bounds
        if not lo < hi:
            raise InvalidParameterError(f"empty bounds {self.bounds}")
        if self.mode == "blobs":
            if not self.sigma > 0:
                raise InvalidParameterError(f"sigma must be > 0, got {self.sigma}")
            if self.centers is not None:
                if not self.centers or any(len(c) != self.d for c in self.centers):
                    raise InvalidParameterError("centers must be non-empty and match d")
            elif self.n_centers < 1:
                raise InvalidParameterError("n_centers must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidParameterError("seed must fit in an unsigned 64-bit integer")

    @property
    def count(self) -> int:
        if self.n is not None:
            return self.n
        return points_for_size(self.size_mb, self.d)

    def with_count(self, n: int) -> "GenSpec":
        return replace(self, n=n, size_mb=None)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode, "d": self.d, "seed": self.seed, "n": self.n,
            "size_mb": self.size_mb, "bounds": list(self.bounds),
            "centers": None if self.centers is None else [list(c) for c in self.centers],
            "n_centers": self.n_centers, "sigma": self.sigma,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GenSpec":
        data = dict(data)
        data["bounds"] = tuple(data["bounds"])
        if data.get("centers") is not None:
            data["centers"] = tuple(tuple(c) for c in data["centers"])
        return cls(**data)


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


def blob_centers(spec: GenSpec) -> np.ndarray:
    if spec.centers is not None:
        return np.asarray(spec.centers, dtype=np.float64)
    lo, hi = spec.bounds
    return _rng(spec.seed, STREAM_CENTERS).uniform(lo, hi, size=(spec.n_centers, spec.d))


def generate(spec: GenSpec, stream: int = STREAM_DATA) -> np.ndarray:
    """Draw ``spec.count`` points; identical output for identical (spec, stream)."""
    n = spec.count
    rng = _rng(spec.seed, stream)
    if spec.mode == "uniform":
        lo, hi = spec.bounds
        return rng.uniform(lo, hi, size=(n, spec.d))
    centers = blob_centers(spec)
    c = len(centers)
    # equal shares; the first n % c blobs take one extra point
    counts = [n // c + (i < n % c) for i in range(c)]
    parts = [center + spec.sigma * rng.standard_normal((m, spec.d))
             for center, m in zip(centers, counts)]
    return np.concatenate(parts) if parts else np.empty((0, spec.d))
