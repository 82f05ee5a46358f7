import csv
import io
import json

import pytest

from misgnn import bench
from misgnn.bench import (
    BenchError, Dataset, bench_run, drop_pct, label_dataset, load_dataset, parse_methods,
    random_dataset, read_labels, write_dataset, write_labels,
)
from misgnn.graph import erdos_renyi, new_graph
from misgnn.pipelines import SolveConfig

FAST = SolveConfig(epochs_unsup=100, warmup_epochs=20)


def test_drop_pct_examples():
    assert drop_pct(3.877, 3.714) == pytest.approx(4.20, abs=0.005)
    assert drop_pct(403, 384.33) == pytest.approx(4.63, abs=0.005)
    assert drop_pct(5, 5) == 0.0
    with pytest.raises(ValueError):
        drop_pct(0, 1)


def test_parse_methods():
    assert parse_methods("dga, exact") == ["dga", "exact"]
    with pytest.raises(ValueError, match="gurobi"):
        parse_methods("dga,gurobi")
    with pytest.raises(ValueError):
        parse_methods(" , ")


def test_dataset_round_trip(tmp_path):
    ds = random_dataset("er", 8, 0.4, 5, 11)
    assert [gid for gid, _ in ds.graphs] == ["g0000", "g0001", "g0002", "g0003", "g0004"]
    write_dataset(ds, tmp_path / "a")
    write_dataset(random_dataset("er", 8, 0.4, 5, 11), tmp_path / "b")
    for f in (tmp_path / "a").iterdir():
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()
    back = load_dataset(tmp_path / "a")
    assert back.name == "er8" and back.graphs == ds.graphs
    with pytest.raises(FileNotFoundError):
        load_dataset(tmp_path / "missing")
    with pytest.raises(ValueError):
        random_dataset("ba", 8, 0.4, 1, 0)


def test_labels_round_trip(tmp_path):
    ds = random_dataset("confusion", 6, 0.5, 4, 2)
    labels = label_dataset(ds, time_limit=10)
    path = tmp_path / "labels.jsonl"
    write_labels(labels, path)
    back = read_labels(path)
    assert list(back) == [gid for gid, _ in ds.graphs]
    for gid, g in ds.graphs:
        assert back[gid]["alpha"] == labels[gid].alpha
        assert bench.label_vector(back[gid]).sum() == labels[gid].alpha
    assert label_dataset(ds, 10, jobs=2).keys() == labels.keys()


def test_edgeless_dataset_every_method_is_exact():
    ds = Dataset("empty5", [(f"g{i}", new_graph(5, [])) for i in range(3)])
    report = bench_run(ds, ["dga", "ga", "qubo-g", "exact"], FAST)
    assert len(report.rows) == 4
    for row in report.rows:
        assert row.avg_size == 5 and row.drop_pct == 0.0
    assert report.rows[-1].method == "exact-bnb"


def test_report_outputs(tmp_path):
    ds = random_dataset("er", 10, 0.5, 6, 3)
    report = bench_run(ds, "dga,ga,exact", FAST)
    exact = report.rows[-1]
    assert exact.drop_pct == 0
    for row in report.rows:
        assert row.avg_size <= exact.avg_size
    report.write(tmp_path / "r.csv")
    rows = list(csv.reader(io.StringIO((tmp_path / "r.csv").read_text())))
    assert rows[0] == list(bench.CSV_COLUMNS)
    assert [r[1] for r in rows[1:]] == ["dga", "ga", "exact-bnb"]
    witnesses = [json.loads(line) for line in (tmp_path / "r.witness.jsonl").read_text().splitlines()]
    assert len(witnesses) == 3 * 6
    graphs = dict(ds.graphs)
    for w in witnesses:
        assert graphs[w["graph_id"]].is_independent(w["members"])
    dga_sizes = [w["size"] for w in witnesses if w["method"] == "dga"]
    assert sum(dga_sizes) / 6 == pytest.approx(report.rows[0].avg_size)
    assert "| dga |" in (tmp_path / "r.md").read_text()


def test_bench_is_deterministic_apart_from_time():
    ds = random_dataset("er", 10, 0.5, 4, 8)
    a = bench_run(ds, "qubo-g,ga", FAST)
    b = bench_run(ds, "qubo-g,ga", FAST)
    assert a.witnesses == b.witnesses
    assert [(r.avg_size, r.drop_pct) for r in a.rows] == [(r.avg_size, r.drop_pct) for r in b.rows]


def test_parallel_matches_serial():
    ds = random_dataset("er", 9, 0.5, 4, 1)
    assert bench_run(ds, "dga,qubo-g", FAST, jobs=2).witnesses == bench_run(ds, "dga,qubo-g", FAST).witnesses


def test_failing_method_names_graph(monkeypatch):
    ds = Dataset("x", [("bad", erdos_renyi(5, 0.5, 0))])

    def boom(g, method, cfg, model):
        raise RuntimeError("kaput")
    monkeypatch.setattr(bench, "solve", boom)
    with pytest.raises(BenchError, match="bad"):
        bench_run(ds, "dga", FAST)


def test_empty_dataset():
    with pytest.raises(BenchError):
        bench_run(Dataset("none", []), "dga")
