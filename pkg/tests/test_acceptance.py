"""Exit criteria. Each test records one PASS/FAIL line in the terminal summary."""
import math
import time

import numpy as np
import pytest

from kdcluster.bruteforce import brute_knn
from kdcluster.clustering import ClusterParams, cluster
from kdcluster.harness import (BenchConfig, GenSpec, format_points, generate, parse_points,
                               points_for_size, run_benchmark, write_points, read_points)
from kdcluster.harness.datagen import STREAM_QUERIES
from kdcluster.kdtree import SearchParams, SearchStats, build

from conftest import ACCEPTANCE_RESULTS
from oracles import same_partition, tree_violations

pytestmark = pytest.mark.acceptance

ORDERS = ("standard", "priority")


def record(name, passed, detail=""):
    ACCEPTANCE_RESULTS[name] = (bool(passed), detail)
    assert passed, f"{name}: {detail}"


def random_instance(rng, n_low=10, n_high=2000):
    """A seeded (points, queries) pair from a uniform box or a Gaussian-blob mixture."""
    n = int(rng.integers(n_low, n_high + 1))
    d = int(rng.choice([2, 3]))
    seed = int(rng.integers(2 ** 32))
    if rng.uniform() < 0.5:
        spec = GenSpec(mode="uniform", n=n, d=d, seed=seed, bounds=(0.0, 100.0))
    else:
        spec = GenSpec(mode="blobs", n=n, d=d, seed=seed, bounds=(0.0, 100.0),
                       n_centers=int(rng.integers(2, 6)), sigma=float(rng.uniform(0.5, 5)))
    return spec, generate(spec), generate(spec.with_count(20), stream=STREAM_QUERIES)


def dists(row):
    return [nb.dist2 for nb in row]


@pytest.fixture(scope="module")
def exact_instances():
    rng = np.random.default_rng(20260101)
    out = []
    for _ in range(200):
        spec, pts, queries = random_instance(rng)
        out.append((pts, queries, int(rng.choice([1, 8, 32]))))
    return out


def test_exact_search_oracle_equivalence(exact_instances):
    t0 = time.perf_counter()
    mismatches = checked = 0
    for pts, queries, bucket in exact_instances:
        tree = build(pts, bucket)
        for q in queries:
            for k in range(1, 6):
                checked += 1
                mismatches += dists(tree.knn_search(q, k)) != dists(brute_knn(pts, q, k))
    elapsed = time.perf_counter() - t0
    record("exact kNN == brute force (bitwise), 200 instances",
           mismatches == 0 and elapsed < 60,
           f"{checked} queries, {mismatches} mismatches, {elapsed:.1f}s (limit 60s)")


def test_epsilon_zero_exactness(exact_instances):
    mismatches = checked = 0
    for pts, queries, bucket in exact_instances:
        tree = build(pts, bucket)
        for q in queries:
            for k in range(1, 6):
                exact = dists(tree.knn_search(q, k))
                for order in ORDERS:
                    checked += 1
                    got = tree.approx_knn_search(q, SearchParams(k, 0.0, order))
                    mismatches += dists(got) != exact
    record("eps=0 approximate search == exact search, both orders",
           mismatches == 0, f"{checked} searches, {mismatches} mismatches")


def test_epsilon_bound():
    rng = np.random.default_rng(777)
    t0 = time.perf_counter()
    violations = checked = 0
    for inst in range(50):
        _, pts, queries = random_instance(rng)
        tree = build(pts, int(rng.choice([1, 8, 32])))
        k = 1 + inst % 5
        for q in queries:
            exact = dists(brute_knn(pts, q, k))
            for eps in (0.1, 0.5, 1.0, 2.0):
                for order in ORDERS:
                    got = dists(tree.approx_knn_search(q, SearchParams(k, eps, order)))
                    for g, e in zip(got, exact):
                        checked += 1
                        violations += math.sqrt(g) > (1 + eps) * math.sqrt(e)
    elapsed = time.perf_counter() - t0
    record("(1+eps) distance bound per rank, eps in {0.1,0.5,1,2}",
           violations == 0 and elapsed < 60,
           f"{checked} rank checks, {violations} violations, {elapsed:.1f}s (limit 60s)")


def test_tree_structural_invariants():
    rng = np.random.default_rng(4242)
    bad = []
    for i in range(100):
        n = int(rng.integers(1, 3000))
        d = int(rng.integers(1, 5))
        bucket = int(rng.choice([1, 2, 5, 8, 32]))
        if i % 4 == 0:
            pts = rng.integers(0, 4, size=(n, d)).astype(float)  # many duplicate medians
        else:
            pts = rng.normal(size=(n, d))
        problems = tree_violations(build(pts, bucket))
        if problems:
            bad.append((i, problems[:3]))
    record("tree split / balance / occupancy / union / depth invariants, 100 builds",
           not bad, f"{len(bad)} failing builds {bad[:2]}")


def test_clustering_oracle_equivalence():
    rng = np.random.default_rng(99)
    differing = []
    for i in range(50):
        _, pts, _ = random_instance(rng, n_low=10, n_high=1000)
        params = ClusterParams(k=int(rng.integers(1, 6)),
                               dist_threshold=None if i % 3 == 0 else float(rng.uniform(0.5, 10)),
                               linkage=str(rng.choice(["unilateral", "mutual"])),
                               order=str(rng.choice(ORDERS)))
        tree_labels = cluster(pts, params).labels
        brute_labels = cluster(pts, params, engine="brute").labels
        if not same_partition(tree_labels, brute_labels):
            differing.append(i)
    blob_rng = np.random.default_rng(5)
    blobs = np.concatenate([blob_rng.normal(size=(50, 2)),
                            blob_rng.normal(size=(50, 2)) + (100.0, 0.0)])
    two = cluster(blobs, ClusterParams(k=3, dist_threshold=10)).cluster_count
    record("clustering tree pipeline == brute-force join pipeline; two blobs -> 2",
           not differing and two == 2,
           f"{len(differing)}/50 partitions differ, two-blob clusters={two}")


def test_pruning_effectiveness():
    t0 = time.perf_counter()
    n = 50_000
    cfg = BenchConfig(gen=GenSpec(mode="uniform", n=n, d=2, seed=2024), k_values=(5,),
                      epsilon=0.0, bucket_size=8, query_count=2000,
                      engines=("brute", "kdtree-standard"))
    report = run_benchmark(cfg)
    brute, tree = report.cell("brute", 5), report.cell("kdtree-standard", 5)
    ratio = tree.total_query_seconds / brute.total_query_seconds
    examined = tree.leaf_points_examined / cfg.query_count
    elapsed = time.perf_counter() - t0
    record("k-d tree query time <= 1/2 brute force and examines < 5% of n (n=50k, k=5)",
           ratio <= 0.5 and examined < 0.05 * n and brute.checksum == tree.checksum
           and elapsed < 120,
           f"tree {tree.total_query_seconds:.2f}s vs brute {brute.total_query_seconds:.2f}s "
           f"(ratio {ratio:.3f}), {examined:.1f} points/query ({examined / n:.3%}), "
           f"{elapsed:.1f}s total (limit 120s)")


def test_examined_points_monotone_in_epsilon():
    spec = GenSpec(mode="blobs", n=5000, d=3, seed=31, bounds=(0, 100), n_centers=4, sigma=8)
    pts, queries = generate(spec), generate(spec.with_count(200), stream=STREAM_QUERIES)
    tree = build(pts)
    counts = {}
    for order in ORDERS:
        row = []
        for eps in (0.0, 0.5, 1.0, 2.0):
            stats = SearchStats()
            for q in queries:
                tree.approx_knn_search(q, SearchParams(5, eps, order), stats)
            row.append(stats.leaf_points)
        counts[order] = row
    ok = all(all(a >= b for a, b in zip(r, r[1:])) for r in counts.values())
    record("leaf points examined non-increasing as eps rises 0 -> 0.5 -> 1 -> 2",
           ok, f"{counts}")


def test_harness_determinism_and_format(tmp_path):
    spec = GenSpec(mode="blobs", n=1000, d=3, seed=123456789, n_centers=3)
    write_points(generate(spec), tmp_path / "a.csv")
    write_points(generate(spec), tmp_path / "b.csv")
    same_bytes = (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    lossless = True
    for fixture in (GenSpec(n=500, d=2, seed=1), GenSpec(mode="blobs", n=300, d=3, seed=2)):
        pts = generate(fixture)
        text = format_points(pts)
        back = parse_points(text)
        lossless &= np.array_equal(back, pts) and format_points(back) == text
    lossless &= np.array_equal(read_points(tmp_path / "a.csv"), generate(spec))

    sizes = (points_for_size(0.5, 2), points_for_size(1, 3))
    record("same seed -> identical bytes; points round-trip; MB sizing 32768 / 43690",
           same_bytes and lossless and sizes == (32768, 43690),
           f"identical={same_bytes} lossless={lossless} sizes={sizes}")
