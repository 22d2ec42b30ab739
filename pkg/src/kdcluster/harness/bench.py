"""k-d tree vs brute-force timing over an engine x k grid.

Each (engine, k) cell builds its index, runs the same query set
``repetitions`` times and keeps the fastest pass. Build time is measured
separately and never included in query time. A checksum (exactly rounded
sum of every returned squared distance) lets cells be compared for
agreement: with epsilon = 0 all engines must report the same value.
"""
from __future__ import annotations

import csv
import dataclasses
import datetime
import json
import math
import platform
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..bruteforce import STRATEGIES, select_smallest
from ..core import as_dataset, squared_distances
from ..errors import InvalidParameterError, KdClusterError
from ..kdtree import DEFAULT_BUCKET_SIZE, KdTree, SearchParams, SearchStats
from .datagen import BYTES_PER_COORD, BYTES_PER_MB, RNG_ALGORITHM, STREAM_QUERIES, GenSpec, generate

ENGINES = ("brute", "kdtree-standard", "kdtree-priority")

CSV_COLUMNS = [
    "engine", "k", "epsilon", "n", "d", "bucket_size", "build_seconds",
    "total_query_seconds", "mean_query_seconds", "leaf_points_examined", "checksum",
]


class BenchError(KdClusterError, RuntimeError):
    pass


@dataclass(frozen=True)
class BenchConfig:
    gen: GenSpec
    k_values: tuple[int, ...] = (1, 2, 3, 4, 5)
    epsilon: float = 0.0
    bucket_size: int = DEFAULT_BUCKET_SIZE
    query_count: int = 1000
    engines: tuple[str, ...] = ENGINES
    repetitions: int = 1
    brute_strategy: str = "select"

    def __post_init__(self):
        if not self.k_values:
            raise InvalidParameterError("k_values must not be empty")
        if any(k < 1 for k in self.k_values):
            raise InvalidParameterError(f"k values must be >= 1: {self.k_values}")
        if self.query_count < 1:
            raise InvalidParameterError("query_count must be >= 1")
        if self.repetitions < 1:
            raise InvalidParameterError("repetitions must be >= 1")
        if not self.engines or any(e not in ENGINES for e in self.engines):
            raise InvalidParameterError(f"engines must be a non-empty subset of {ENGINES}")
        if self.brute_strategy not in STRATEGIES:
            raise InvalidParameterError(f"brute_strategy must be one of {STRATEGIES}")
        if self.bucket_size < 1:
            raise InvalidParameterError("bucket_size must be >= 1")
        if not (math.isfinite(self.epsilon) and self.epsilon >= 0):
            raise InvalidParameterError("epsilon must be finite and >= 0")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["gen"] = self.gen.to_dict()
        d["k_values"] = list(self.k_values)
        d["engines"] = list(self.engines)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "BenchConfig":
        data = dict(data)
        data["gen"] = GenSpec.from_dict(data["gen"])
        data["k_values"] = tuple(data["k_values"])
        data["engines"] = tuple(data["engines"])
        return cls(**data)


@dataclass(frozen=True)
class BenchCell:
    engine: str
    k: int
    epsilon: float
    n: int
    d: int
    bucket_size: int
    build_seconds: float
    total_query_seconds: float
    mean_query_seconds: float
    leaf_points_examined: int | None  # None for brute force
    checksum: float


@dataclass
class BenchReport:
    cells: list[BenchCell]
    config: BenchConfig
    metadata: dict = field(default_factory=dict)

    def cell(self, engine: str, k: int) -> BenchCell:
        for c in self.cells:
            if c.engine == engine and c.k == k:
                return c
        raise KeyError((engine, k))

    def speedups(self, engine: str = "kdtree-standard") -> dict[int, float]:
        """brute-force query time divided by ``engine``'s, per k."""
        out = {}
        for k in self.config.k_values:
            tree = self.cell(engine, k).total_query_seconds
            out[k] = self.cell("brute", k).total_query_seconds / tree if tree > 0 else math.inf
        return out


def environment() -> dict:
    return {
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
        "machine": f"{platform.platform()} | {platform.machine()} | {platform.processor() or 'unknown cpu'}",
        "python": platform.python_version(),
        "numpy": np.__version__,
        "timer": "time.perf_counter (monotonic wall clock)",
        "rng": RNG_ALGORITHM,
        "size_conversion": f"n = floor(size_mb * {BYTES_PER_MB} / ({BYTES_PER_COORD} * d))",
    }


def _run_brute(data, queries, k, config):
    t0 = time.perf_counter()
    refs = as_dataset(data)
    build = time.perf_counter() - t0
    best = math.inf
    for _ in range(config.repetitions):
        t0 = time.perf_counter()
        results = [select_smallest(squared_distances(refs, q), k, config.brute_strategy) for q in queries]
        best = min(best, time.perf_counter() - t0)
    return build, best, None, results


def _run_tree(data, queries, k, config, order):
    t0 = time.perf_counter()
    tree = KdTree(data, config.bucket_size)
    build = time.perf_counter() - t0
    params = SearchParams(k, config.epsilon, order)
    best = math.inf
    for _ in range(config.repetitions):
        stats = SearchStats()
        t0 = time.perf_counter()
        results = [tree.approx_knn_search(q, params, stats) for q in queries]
        best = min(best, time.perf_counter() - t0)
    return build, best, stats.leaf_points, results


def run_benchmark(config: BenchConfig) -> BenchReport:
    data = generate(config.gen)
    n, d = data.shape
    queries = generate(config.gen.with_count(config.query_count), stream=STREAM_QUERIES)
    query_tuples = [tuple(q) for q in queries.tolist()]
    cells = []
    for engine in config.engines:
        for k in config.k_values:
            try:
                if k > n:
                    raise InvalidParameterError(f"k={k} exceeds n={n}")
                if engine == "brute":
                    build, total, examined, results = _run_brute(data, queries, k, config)
                else:
                    order = engine.split("-", 1)[1]
                    build, total, examined, results = _run_tree(data, query_tuples, k, config, order)
            except Exception as exc:
                raise BenchError(f"benchmark cell engine={engine} k={k} failed: {exc}") from exc
            checksum = math.fsum(nb.dist2 for row in results for nb in row)
            cells.append(BenchCell(engine, k, config.epsilon, n, d, config.bucket_size,
                                   build, total, total / len(queries), examined, checksum))
    meta = environment()
    meta["brute_strategy"] = config.brute_strategy
    meta["query_seed_stream"] = STREAM_QUERIES
    return BenchReport(cells, config, meta)


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def write_report(report: BenchReport, path) -> Path:
    """Write the CSV grid to ``path`` and config/metadata JSON next to it."""
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for c in report.cells:
                row = dataclasses.astuple(c)
                writer.writerow(["" if v is None else repr(v) if isinstance(v, float) else v
                                 for v in row])
        sidecar_path(path).write_text(json.dumps(
            {"config": report.config.to_dict(), "metadata": report.metadata}, indent=2) + "\n")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write report: {exc.strerror}", str(path)) from exc
    return path


def read_report(path) -> BenchReport:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_COLUMNS:
            raise BenchError(f"{path}: unexpected columns {reader.fieldnames}")
        cells = []
        for row in reader:
            cells.append(BenchCell(
                engine=row["engine"], k=int(row["k"]), epsilon=float(row["epsilon"]),
                n=int(row["n"]), d=int(row["d"]), bucket_size=int(row["bucket_size"]),
                build_seconds=float(row["build_seconds"]),
                total_query_seconds=float(row["total_query_seconds"]),
                mean_query_seconds=float(row["mean_query_seconds"]),
                leaf_points_examined=int(row["leaf_points_examined"]) if row["leaf_points_examined"] else None,
                checksum=float(row["checksum"]),
            ))
    side = json.loads(sidecar_path(path).read_text())
    return BenchReport(cells, BenchConfig.from_dict(side["config"]), side["metadata"])
