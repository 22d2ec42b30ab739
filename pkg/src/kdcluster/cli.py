"""Command line entry point: ``kdcluster {gen,bench,query,cluster,stats}``."""
from __future__ import annotations

import argparse
import contextlib
import math
import sys
from pathlib import Path

from .bruteforce import brute_knn
from .clustering import LINKAGES, ClusterParams, cluster
from .errors import InvalidInputError, KdClusterError
from .harness.bench import ENGINES, BenchConfig, run_benchmark, sidecar_path, write_report
from .harness.datagen import MODES, GenSpec, generate
from .harness.pointsio import format_points, read_points
from .kdtree import DEFAULT_BUCKET_SIZE, KdTree, SearchParams


def _int_list(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _engine_list(text):
    engines = tuple(e.strip() for e in text.split(",") if e.strip())
    bad = [e for e in engines if e not in ENGINES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown engine(s) {bad}; choose from {ENGINES}")
    return engines


def _threshold(text):
    if text.lower() in ("none", "inf", "unbounded"):
        return None
    return float(text)


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _add_gen_flags(p):
    size = p.add_mutually_exclusive_group()
    size.add_argument("--n", type=int, help="number of points")
    size.add_argument("--size-mb", type=float, help="dataset size in MiB of float64 coordinates")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=MODES, default="uniform")
    p.add_argument("--low", type=float, default=0.0, help="lower coordinate bound")
    p.add_argument("--high", type=float, default=1.0, help="upper coordinate bound")
    p.add_argument("--centers", type=int, default=2, help="blob count (blobs mode)")
    p.add_argument("--sigma", type=float, default=1.0, help="blob standard deviation")


def _gen_spec(args, default_n=1000):
    n = args.n
    if n is None and args.size_mb is None:
        n = default_n
    return GenSpec(mode=args.mode, d=args.dim, seed=args.seed, n=n, size_mb=args.size_mb,
                   bounds=(args.low, args.high), n_centers=args.centers, sigma=args.sigma)


def cmd_gen(args):
    points = generate(_gen_spec(args))
    with _output(args.out) as fh:
        fh.write(format_points(points))


def cmd_bench(args):
    config = BenchConfig(
        gen=_gen_spec(args, default_n=10000), k_values=args.k, epsilon=args.epsilon,
        bucket_size=args.bucket_size, query_count=args.queries, engines=args.engine,
        repetitions=args.reps, brute_strategy=args.strategy)
    report = run_benchmark(config)
    out = Path(args.out)
    write_report(report, out)
    print(f"wrote {out} and {sidecar_path(out)}")
    for c in report.cells:
        examined = "-" if c.leaf_points_examined is None else c.leaf_points_examined
        print(f"{c.engine:16s} k={c.k}  build={c.build_seconds:.4f}s  "
              f"query={c.total_query_seconds:.4f}s  examined={examined}  checksum={c.checksum!r}")
    if "brute" in config.engines:
        for engine in config.engines:
            if engine != "brute":
                ratios = ", ".join(f"k={k}: {r:.1f}x" for k, r in report.speedups(engine).items())
                print(f"speedup of {engine} over brute: {ratios}")


def cmd_query(args):
    points = read_points(args.points)
    queries = read_points(args.queries_file)
    if queries.shape[1] != points.shape[1]:
        raise InvalidInputError(
            f"query dimension {queries.shape[1]} does not match points dimension {points.shape[1]}")
    if args.engine == "brute":
        rows = [brute_knn(points, q, args.k) for q in queries]
    else:
        tree = KdTree(points, args.bucket_size)
        params = SearchParams(args.k, args.epsilon, args.engine.split("-", 1)[1])
        rows = [tree.approx_knn_search(q, params) for q in queries]
    with _output(args.out) as fh:
        fh.write("query_index,rank,point_index,dist2,distance\n")
        for qi, row in enumerate(rows):
            for rank, nb in enumerate(row, start=1):
                fh.write(f"{qi},{rank},{nb.index},{nb.dist2!r},{math.sqrt(nb.dist2)!r}\n")


def cmd_cluster(args):
    points = read_points(args.points)
    params = ClusterParams(k=args.k, epsilon=args.epsilon, dist_threshold=args.threshold,
                           linkage=args.linkage)
    labeling = cluster(points, params, bucket_size=args.bucket_size)
    with _output(args.out) as fh:
        fh.write("point_index,label\n")
        for i, label in enumerate(labeling.labels):
            fh.write(f"{i},{label}\n")
    print(f"{labeling.cluster_count} clusters over {len(labeling.labels)} points", file=sys.stderr)


def cmd_stats(args):
    stats = KdTree(read_points(args.points), args.bucket_size).stats()
    with _output(args.out) as fh:
        for name in ("n", "dim", "bucket_size", "node_count", "leaf_count", "depth"):
            fh.write(f"{name},{getattr(stats, name)}\n")


def build_parser():
    parser = argparse.ArgumentParser(prog="kdcluster", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a points file")
    _add_gen_flags(p)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="time k-d tree engines against brute force")
    _add_gen_flags(p)
    p.add_argument("--k", type=_int_list, default=(1, 2, 3, 4, 5), help="e.g. 1,2,3,4,5")
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--bucket-size", type=int, default=DEFAULT_BUCKET_SIZE)
    p.add_argument("--engine", type=_engine_list, default=ENGINES,
                   help="comma-separated subset of " + ",".join(ENGINES))
    p.add_argument("--queries", type=int, default=1000)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--strategy", choices=("select", "sort"), default="select",
                   help="brute-force ranking: partial selection or full sort")
    p.add_argument("--out", default="bench.csv", help="report CSV; a .json sidecar is written next to it")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("query", help="kNN of each query point")
    p.add_argument("points")
    p.add_argument("queries_file", metavar="queries")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--engine", choices=ENGINES, default="kdtree-standard")
    p.add_argument("--bucket-size", type=int, default=DEFAULT_BUCKET_SIZE)
    p.add_argument("--out")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("cluster", help="kNN-graph clustering, writes point_index,label")
    p.add_argument("points")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--threshold", type=_threshold, default=None,
                   help="max edge length (true distance); default unbounded")
    p.add_argument("--linkage", choices=LINKAGES, default="unilateral")
    p.add_argument("--bucket-size", type=int, default=DEFAULT_BUCKET_SIZE)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("stats", help="structural statistics of the k-d tree")
    p.add_argument("points")
    p.add_argument("--bucket-size", type=int, default=DEFAULT_BUCKET_SIZE)
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (KdClusterError, OSError) as exc:
        print(f"kdcluster {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0
