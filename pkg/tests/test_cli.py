import json
import subprocess
import sys

import pytest

from misgnn.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def p3(tmp_path):
    path = tmp_path / "p3.dimacs"
    path.write_text("p edge 3 2\ne 1 2\ne 2 3\n")
    return path


def test_solve_p3_dga(capsys, p3):
    code, out, _ = run(capsys, "solve", "--graph", p3, "--method", "dga")
    assert code == 0
    doc = json.loads(out)
    assert (doc["size"], doc["members"], doc["valid"]) == (2, [0, 2], True)
    assert "elapsed_s" not in doc


def test_solve_exact_label_and_timing(capsys, p3):
    code, out, _ = run(capsys, "solve", "--graph", p3, "--method", "exact", "--timing")
    doc = json.loads(out)
    assert doc["method"] == "exact-bnb" and "elapsed_s" in doc


def test_full_workflow(capsys, tmp_path):
    data, labels = tmp_path / "data", tmp_path / "labels.jsonl"
    assert run(capsys, "gen", "--model", "er", "--n", 8, "--p", 0.5, "--count", 6, "--seed", 1,
               "--out", data)[0] == 0
    assert run(capsys, "label", "--in", data, "--time-limit", 10, "--out", labels)[0] == 0
    assert len(labels.read_text().splitlines()) == 6
    model = tmp_path / "model.json"
    code, out, _ = run(capsys, "train", "--data", data, "--labels", labels, "--epochs", 5,
                       "--out", model)
    assert code == 0 and json.loads(out)["epochs"] == 5
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"epochs_unsup": 50, "epochs_sup_predictor_refine": 30,
                               "warmup_epochs": 10}))
    code, out, _ = run(capsys, "bench", "--data", data, "--labels", labels, "--methods",
                       "dga,sup-g,sup-qubo-g,exact", "--config", cfg, "--model", model,
                       "--out", tmp_path / "report.csv")
    assert code == 0 and "| exact-bnb |" in out
    assert (tmp_path / "report.csv").read_text().startswith("dataset,method,avg_size,drop_pct,time_s\n")


def test_gen_is_reproducible(capsys, tmp_path):
    for d in ("a", "b"):
        run(capsys, "gen", "--model", "confusion", "--n", 5, "--p", 0.4, "--count", 3,
            "--seed", 9, "--out", tmp_path / d)
    for f in (tmp_path / "a").iterdir():
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_convert(capsys, tmp_path):
    cnf = tmp_path / "f.cnf"
    cnf.write_text("p cnf 2 2\n1 2 0\n-1 2 0\n")
    code, out, _ = run(capsys, "convert", "--cnf", cnf, "--out", tmp_path / "f.dimacs")
    assert code == 0 and json.loads(out) == {"n": 4, "m": 3, "clauses": 2}
    code, out, _ = run(capsys, "solve", "--graph", tmp_path / "f.dimacs", "--method", "exact")
    assert json.loads(out)["size"] == 2


def test_capacity(capsys, tmp_path):
    c5 = tmp_path / "c5.dimacs"
    c5.write_text("p edge 5 5\ne 1 2\ne 2 3\ne 3 4\ne 4 5\ne 1 5\n")
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"epochs_unsup": 30, "epochs_sup_predictor_refine": 30,
                               "warmup_epochs": 5}))
    model = tmp_path / "m.json"
    data, labels = tmp_path / "d", tmp_path / "l.jsonl"
    run(capsys, "gen", "--model", "er", "--n", 6, "--p", 0.5, "--count", 3, "--seed", 0, "--out", data)
    run(capsys, "label", "--in", data, "--out", labels)
    run(capsys, "train", "--data", data, "--labels", labels, "--epochs", 2, "--out", model)
    code, out, _ = run(capsys, "capacity", "--graph", c5, "--kmax", 2, "--model", model,
                       "--config", cfg, "--out", tmp_path / "cap.csv")
    assert code == 0
    assert json.loads(out)["exact-bnb"] == pytest.approx(5 ** 0.5)
    code, out, _ = run(capsys, "capacity", "--random", "4,0.5,3", "--kmax", 1, "--model", model,
                       "--config", cfg, "--out", tmp_path / "cap2.csv")
    assert code == 0 and (tmp_path / "cap2.md").exists()


def test_unknown_bench_method(capsys, tmp_path):
    code, _, err = run(capsys, "bench", "--data", tmp_path, "--labels", tmp_path / "x",
                       "--methods", "dga,gurobi", "--out", tmp_path / "r.csv")
    assert code != 0
    doc = json.loads(err)
    assert doc["error"] == "unknown_method" and "gurobi" in doc["message"]


@pytest.mark.parametrize("argv,kind", [
    (["solve", "--graph", "x"], "usage"),
    (["solve", "--graph", "missing.dimacs", "--method", "dga"], "not_found"),
    (["solve", "--graph", "x", "--method", "sup-g"], "usage"),
    (["capacity", "--random", "5,0.5", "--kmax", "1", "--out", "c.csv"], "usage"),
    (["frobnicate"], "usage"),
])
def test_errors_are_single_json_lines(capsys, argv, kind):
    code, _, err = run(capsys, *argv)
    assert code != 0
    assert len(err.strip().splitlines()) == 1
    assert json.loads(err)["error"] == kind


def test_bad_graph_file(capsys, tmp_path):
    bad = tmp_path / "bad.dimacs"
    bad.write_text("p edge 2 1\ne 1 3\n")
    code, _, err = run(capsys, "solve", "--graph", bad, "--method", "dga")
    assert code == 1 and json.loads(err)["error"] == "invalid_input"


def test_module_entry_point(p3):
    proc = subprocess.run([sys.executable, "-m", "misgnn", "solve", "--graph", str(p3),
                           "--method", "ga", "--seed", "3"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["valid"] is True
