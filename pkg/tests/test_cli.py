import subprocess
import sys

import numpy as np

from kdcluster.cli import main
from kdcluster.harness import read_points, read_report


def test_gen_is_reproducible(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["gen", "--n", "500", "--dim", "3", "--seed", "9", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert read_points(a).shape == (500, 3)


def test_gen_size_mb(tmp_path):
    out = tmp_path / "p.csv"
    assert main(["gen", "--size-mb", "0.5", "--dim", "2", "--out", str(out)]) == 0
    assert len(read_points(out)) == 32768


def test_query_brute_and_tree_agree(tmp_path):
    pts, qs = tmp_path / "p.csv", tmp_path / "q.csv"
    main(["gen", "--n", "300", "--seed", "1", "--out", str(pts)])
    main(["gen", "--n", "10", "--seed", "2", "--out", str(qs)])
    outputs = {}
    for engine in ("brute", "kdtree-standard", "kdtree-priority"):
        out = tmp_path / f"{engine}.csv"
        assert main(["query", str(pts), str(qs), "--k", "3", "--engine", engine, "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "query_index,rank,point_index,dist2,distance"
        outputs[engine] = [line.split(",")[3] for line in lines[1:]]
    assert len(outputs["brute"]) == 30
    assert outputs["brute"] == outputs["kdtree-standard"] == outputs["kdtree-priority"]


def test_cluster_command(tmp_path):
    pts = tmp_path / "p.csv"
    rng = np.random.default_rng(0)
    data = np.concatenate([rng.normal(size=(30, 2)), rng.normal(size=(30, 2)) + 100])
    pts.write_text("".join(f"{x!r},{y!r}\n" for x, y in data.tolist()))
    out = tmp_path / "labels.csv"
    assert main(["cluster", str(pts), "--k", "3", "--threshold", "10", "--linkage", "unilateral",
                 "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "point_index,label" and len(lines) == 61
    labels = [int(line.split(",")[1]) for line in lines[1:]]
    assert labels == [0] * 30 + [1] * 30


def test_stats_command(tmp_path, capsys):
    pts = tmp_path / "p.csv"
    main(["gen", "--n", "1024", "--out", str(pts)])
    assert main(["stats", str(pts), "--bucket-size", "1"]) == 0
    stats = dict(line.split(",") for line in capsys.readouterr().out.splitlines())
    assert stats["n"] == "1024" and stats["leaf_count"] == "1024" and int(stats["depth"]) <= 11


def test_bench_command(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    assert main(["bench", "--n", "2000", "--k", "1,3", "--queries", "20",
                 "--engine", "brute,kdtree-standard", "--out", str(out)]) == 0
    report = read_report(out)
    assert len(report.cells) == 4
    assert report.cell("brute", 3).checksum == report.cell("kdtree-standard", 3).checksum
    assert "speedup of kdtree-standard over brute" in capsys.readouterr().out


def test_errors_exit_nonzero_with_one_line(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3\n")
    proc = subprocess.run([sys.executable, "-m", "kdcluster", "stats", str(bad)],
                          capture_output=True, text=True)
    assert proc.returncode != 0
    assert proc.stderr.strip().count("\n") == 0
    assert "bad.csv:2" in proc.stderr
    assert main(["query", str(tmp_path / "missing.csv"), str(bad)]) != 0
