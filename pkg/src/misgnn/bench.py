"""Datasets, exact labels, metrics and the benchmark runner."""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exact import ExactResult, exact_mis
from .graph import Graph, derive_seed, erdos_renyi, load_graph, random_confusion_graph, write_dimacs
from .pipelines import METHODS, SolveConfig, solve

log = logging.getLogger(__name__)

CSV_COLUMNS = ("dataset", "method", "avg_size", "drop_pct", "time_s")
GRAPH_SUFFIXES = (".dimacs", ".col", ".clq", ".txt", ".edges")
METHOD_LABELS = {"exact": "exact-bnb"}


class BenchError(RuntimeError):
    pass


@dataclass
class Dataset:
    name: str
    graphs: list[tuple[str, Graph]]
    params: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.graphs)


def random_dataset(model: str, n: int, p: float, count: int, seed: int,
                   name: str | None = None) -> Dataset:
    """``count`` seeded random graphs; graph ``i`` uses ``derive_seed(seed, i)``."""
    gen = {"er": erdos_renyi, "confusion": random_confusion_graph}.get(model)
    if gen is None:
        raise ValueError(f"unknown generator model {model!r}")
    graphs = [(f"g{i:04d}", gen(n, p, derive_seed(seed, i))) for i in range(count)]
    name = name or f"{model}{n}"
    return Dataset(name, graphs, {"model": model, "n": n, "p": p, "count": count, "seed": seed})


def write_dataset(ds: Dataset, directory) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    for gid, g in ds.graphs:
        (d / f"{gid}.dimacs").write_text(write_dimacs(g), encoding="utf-8")
    manifest = {"name": ds.name, "params": ds.params, "graphs": [gid for gid, _ in ds.graphs]}
    (d / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n", encoding="utf-8")


def load_dataset(directory) -> Dataset:
    d = Path(directory)
    if not d.is_dir():
        raise FileNotFoundError(f"dataset directory {d} does not exist")
    manifest = d / "manifest.json"
    meta = json.loads(manifest.read_text(encoding="utf-8")) if manifest.exists() else {}
    files = sorted(f for f in d.iterdir() if f.suffix in GRAPH_SUFFIXES)
    graphs = [(f.stem, load_graph(f)) for f in files]
    return Dataset(meta.get("name", d.name), graphs, meta.get("params", {}))


# -- exact labels -------------------------------------------------------------------

def _label_one(args):
    gid, g, time_limit = args
    return gid, exact_mis(g, time_limit)


def label_dataset(ds: Dataset, time_limit: float = 60.0, jobs: int = 1) -> dict[str, ExactResult]:
    cells = [(gid, g, time_limit) for gid, g in ds.graphs]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            results = dict(pool.map(_label_one, cells))
    else:
        results = dict(map(_label_one, cells))
    for gid, res in results.items():
        if not res.optimal:
            log.warning("exact solve of %s timed out; label is a lower bound", gid)
    return {gid: results[gid] for gid, _ in ds.graphs}


def write_labels(results: dict[str, ExactResult], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for gid, res in results.items():
            f.write(json.dumps(res.to_record(gid)) + "\n")


def read_labels(path) -> dict[str, dict]:
    labels = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                rec = json.loads(line)
                labels[rec["graph_id"]] = rec
    return labels


def label_vector(rec: dict) -> np.ndarray:
    y = np.zeros(rec["n"])
    y[rec["members"]] = 1.0
    return y


# -- metrics and reports ----------------------------------------------------------------

def drop_pct(exact_avg: float, method_avg: float) -> float:
    """Percentage shortfall of ``method_avg`` relative to ``exact_avg``."""
    if exact_avg <= 0:
        raise ValueError(f"exact average must be positive, got {exact_avg}")
    return 100.0 * (exact_avg - method_avg) / exact_avg


@dataclass
class BenchRow:
    method: str
    avg_size: float
    drop_pct: float
    total_time_s: float


@dataclass
class BenchReport:
    dataset: dict
    rows: list[BenchRow]
    witnesses: list[dict] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([self.dataset["name"], r.method, f"{r.avg_size:.6f}",
                        f"{r.drop_pct:.4f}", f"{r.total_time_s:.6f}"])
        return buf.getvalue()

    def to_markdown(self) -> str:
        lines = [f"### {self.dataset['name']} ({self.dataset.get('num_graphs', '?')} graphs)", "",
                 "| Method | Avg Size | Drop (%) | Time (s) |", "|---|---:|---:|---:|"]
        for r in self.rows:
            lines.append(f"| {r.method} | {r.avg_size:.3f} | {r.drop_pct:.2f} | {r.total_time_s:.3f} |")
        return "\n".join(lines) + "\n"

    def write(self, csv_path) -> None:
        """Write the CSV plus ``.md`` and ``.witness.jsonl`` siblings."""
        p = Path(csv_path)
        p.write_text(self.to_csv(), encoding="utf-8")
        p.with_suffix(".md").write_text(self.to_markdown(), encoding="utf-8")
        with open(p.with_suffix(".witness.jsonl"), "w", encoding="utf-8") as f:
            for rec in self.witnesses:
                f.write(json.dumps(rec) + "\n")


def _solve_cell(args):
    gid, g, method, cfg, model = args
    try:
        res = solve(g, method, cfg, model)
    except Exception as exc:  # re-raised with context by the caller
        return gid, method, None, f"{type(exc).__name__}: {exc}"
    if not res.set.is_valid(g):
        return gid, method, None, "returned an invalid independent set"
    return gid, method, res, None


def parse_methods(methods: str | list[str]) -> list[str]:
    tokens = methods.split(",") if isinstance(methods, str) else list(methods)
    tokens = [t.strip() for t in tokens if t.strip()]
    for t in tokens:
        if t not in METHODS:
            raise ValueError(f"unknown method {t!r}; expected one of {', '.join(METHODS)}")
    if not tokens:
        raise ValueError("no methods given")
    return tokens


def bench_run(ds: Dataset, methods, cfg: SolveConfig | None = None, labels: dict | None = None,
              model=None, jobs: int = 1, exact_time_limit: float | None = None) -> BenchReport:
    """Run every method on every graph and aggregate Avg Size, Drop% and total time.

    ``labels`` maps graph id to an exact label record (``alpha`` key) or an
    :class:`ExactResult`; missing labels are computed with the exact solver.
    """
    cfg = cfg or SolveConfig()
    methods = parse_methods(methods)
    if not ds.graphs:
        raise BenchError("dataset is empty")
    labels = dict(labels or {})
    alphas = {}
    for gid, g in ds.graphs:
        lab = labels.get(gid)
        if lab is None:
            lab = exact_mis(g, exact_time_limit or cfg.exact_time_limit)
        alphas[gid] = lab["alpha"] if isinstance(lab, dict) else lab.alpha
    exact_avg = float(np.mean([alphas[gid] for gid, _ in ds.graphs]))

    cells = [(gid, g, m, cfg, model) for m in methods for gid, g in ds.graphs]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            outcomes = list(pool.map(_solve_cell, cells))
    else:
        outcomes = [_solve_cell(c) for c in cells]

    by_method: dict[str, list] = {m: [] for m in methods}
    witnesses = []
    for gid, method, res, err in outcomes:
        if err is not None:
            raise BenchError(f"method {method} failed on graph {gid}: {err}")
        by_method[method].append(res)
        witnesses.append({"graph_id": gid, "method": METHOD_LABELS.get(method, method),
                          "size": res.size, "members": list(res.set.members)})

    rows = []
    for m in methods:
        sizes = [r.size for r in by_method[m]]
        avg = float(np.mean(sizes))
        drop = 0.0 if m == "exact" else drop_pct(exact_avg, avg) if exact_avg > 0 else 0.0
        rows.append(BenchRow(METHOD_LABELS.get(m, m), avg, drop,
                             float(sum(r.elapsed for r in by_method[m]))))
    desc = {"name": ds.name, "num_graphs": len(ds), "params": ds.params, "seed": cfg.seed,
            "exact_avg": exact_avg}
    return BenchReport(desc, rows, witnesses)
