"""Lower bounds on the Shannon capacity of a confusion graph.

Words of length k over the alphabet ``V(G)`` are the vertices of the strong
power ``G^k``; an independent set there is a code of mutually unconfusable
words, and ``alpha(G^k) ** (1/k)`` bounds the capacity from below for every k.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

from .bench import CSV_COLUMNS, drop_pct, random_dataset
from .decode import IndependentSet
from .exact import exact_mis
from .graph import (DEFAULT_VERTEX_BUDGET, Graph, decode_product_vertex, graph_power,
                    random_confusion_graph)
from .pipelines import SolveConfig, TrainedModel, solve, train_supervised

log = logging.getLogger(__name__)

DEFAULT_EXACT_THRESHOLD = 200
EXPERIMENT_METHODS = ("exact", "dga", "sup-qubo-g")


@dataclass
class PowerRecord:
    k: int
    num_vertices: int
    alpha_lower: int
    solver: str
    optimal: bool
    witness: tuple[int, ...]
    elapsed: float = 0.0


@dataclass
class CapacityEstimate:
    alphabet_size: int
    records: list[PowerRecord] = field(default_factory=list)
    truncated_at: int | None = None  # first k skipped because of the vertex budget

    @property
    def capacity_lb(self) -> float:
        return max(r.alpha_lower ** (1.0 / r.k) for r in self.records)

    def words(self, k: int) -> list[tuple[int, ...]]:
        """The witness code for words of length ``k``, one letter tuple per word."""
        rec = next(r for r in self.records if r.k == k)
        return [decode_product_vertex(v, self.alphabet_size, k) for v in rec.witness]


def product_witness(left: tuple[int, ...], right: tuple[int, ...], right_n: int) -> tuple[int, ...]:
    """``I x J`` in ``G [x] H`` under the flat index ``u * |V(H)| + x``; independent
    whenever ``I`` and ``J`` are."""
    return tuple(sorted(u * right_n + x for u in left for x in right))


def _solve_power(gk: Graph, solver: str, cfg: SolveConfig, model, exact_threshold: int):
    t0 = time.perf_counter()
    method = solver
    if solver == "auto":
        if gk.n <= exact_threshold:
            method = "exact"
        else:
            method = "sup-qubo-g" if model is not None else "qubo-g"
    if method == "exact":
        res = exact_mis(gk, cfg.exact_time_limit)
        return res.set, "exact-bnb", res.optimal, time.perf_counter() - t0
    return solve(gk, method, cfg, model).set, method, False, time.perf_counter() - t0


def estimate_capacity(g: Graph, k_max: int, solver: str = "auto", cfg: SolveConfig | None = None,
                      model=None, exact_threshold: int = DEFAULT_EXACT_THRESHOLD,
                      vertex_budget: int = DEFAULT_VERTEX_BUDGET) -> CapacityEstimate:
    """Independent sets in ``G^1 .. G^k_max`` and the best k-th-root bound.

    ``solver`` is "auto" (exact up to ``exact_threshold`` vertices, then the
    pipeline heuristic) or any method name accepted by
    :func:`misgnn.pipelines.solve`. Each power's set is never smaller than the
    product of the previous power's witness with the k=1 witness.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    if g.n < 1:
        raise ValueError("confusion graph has no letters")
    cfg = cfg or SolveConfig()
    est = CapacityEstimate(g.n)
    for k in range(1, k_max + 1):
        if g.n ** k > vertex_budget:
            log.warning("stopping at k=%d: %d vertices exceed the budget", k, g.n ** k)
            est.truncated_at = k
            break
        gk = graph_power(g, k, vertex_budget)
        found, name, optimal, elapsed = _solve_power(gk, solver, cfg, model, exact_threshold)
        members = found.members
        if k > 1:
            prev, first = est.records[-1], est.records[0]
            prod = product_witness(prev.witness, first.witness, g.n)
            if len(prod) > len(members):
                members, name = prod, f"{name}+product"
        if not gk.is_independent(members):
            raise RuntimeError(f"solver {name} returned a dependent set on G^{k}")
        est.records.append(PowerRecord(k, gk.n, len(members), name, optimal,
                                       tuple(members), elapsed))
    return est


# -- confusion-graph experiment -------------------------------------------------------

@dataclass
class ExperimentCell:
    k: int
    method: str
    size: int
    drop_pct: float
    time_s: float
    optimal: bool
    witness: tuple[int, ...]


@dataclass
class ConfusionReport:
    graph: Graph
    k_max: int
    cells: list[ExperimentCell]
    params: dict = field(default_factory=dict)

    def capacity_lb(self, method: str) -> float:
        return max(c.size ** (1.0 / c.k) for c in self.cells if c.method == method)

    def cell(self, method: str, k: int) -> ExperimentCell:
        return next(c for c in self.cells if c.method == method and c.k == k)

    def methods(self) -> list[str]:
        seen = []
        for c in self.cells:
            if c.method not in seen:
                seen.append(c.method)
        return seen

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for c in self.cells:
            w.writerow([f"confusion-{c.k}letter", c.method, f"{c.size:.6f}",
                        f"{c.drop_pct:.4f}", f"{c.time_s:.6f}"])
        return buf.getvalue()

    def to_markdown(self) -> str:
        ks = range(1, self.k_max + 1)
        head = "| Method | " + " | ".join(f"{k}-letter Size | Drop (%) | Time (s)" for k in ks) + " |"
        sep = "|---|" + "---:|---:|---:|" * self.k_max
        lines = [head, sep]
        for m in self.methods():
            parts = []
            for k in ks:
                c = self.cell(m, k)
                parts.append(f"{c.size} | {c.drop_pct:.2f} | {c.time_s:.3f}")
            lines.append(f"| {m} | " + " | ".join(parts) + " |")
        return "\n".join(lines) + "\n"

    def summary(self) -> dict:
        return {
            "alphabet_size": self.graph.n,
            "edges": [list(e) for e in self.graph.edges],
            "params": self.params,
            "capacity_lb": {m: self.capacity_lb(m) for m in self.methods()},
            "witness_words": {
                m: {str(c.k): [list(decode_product_vertex(v, self.graph.n, c.k)) for v in c.witness]
                    for c in self.cells if c.method == m}
                for m in self.methods()
            },
        }

    def write(self, csv_path) -> None:
        p = Path(csv_path)
        p.write_text(self.to_csv(), encoding="utf-8")
        p.with_suffix(".md").write_text(self.to_markdown(), encoding="utf-8")
        p.with_suffix(".json").write_text(json.dumps(self.summary(), indent=1) + "\n",
                                          encoding="utf-8")


def default_model(cfg: SolveConfig, count: int = 200) -> TrainedModel:
    """Supervised model trained on seeded ER(10, 0.5) graphs with exact labels."""
    ds = random_dataset("er", 10, 0.5, count, cfg.seed, name="er10-train")
    graphs = [g for _, g in ds.graphs]
    labels = [exact_mis(g, cfg.exact_time_limit).set for g in graphs]
    return train_supervised(graphs, labels, cfg, dataset_id=ds.name)


def confusion_experiment(alphabet_size: int = 5, p: float = 0.5, seed: int = 0, k_max: int = 3,
                         cfg: SolveConfig | None = None, model=None, graph: Graph | None = None,
                         methods=EXPERIMENT_METHODS,
                         vertex_budget: int = DEFAULT_VERTEX_BUDGET) -> ConfusionReport:
    """Exact, DGA and Supervised+QUBO+G on the powers of a random confusion graph.

    Pass ``graph`` to use a fixed confusion graph instead of a random one.
    Without ``model`` a default supervised model is trained first.
    """
    cfg = cfg or SolveConfig(seed=seed)
    g = graph if graph is not None else random_confusion_graph(alphabet_size, p, seed)
    if "sup-qubo-g" in methods and model is None:
        model = default_model(cfg)
    cells = []
    for k in range(1, k_max + 1):
        if g.n ** k > vertex_budget:
            log.warning("stopping at k=%d: %d vertices exceed the budget", k, g.n ** k)
            k_max = k - 1
            break
        gk = graph_power(g, k, vertex_budget)
        results = {}
        for m in methods:
            t0 = time.perf_counter()
            if m == "exact":
                ex = exact_mis(gk, cfg.exact_time_limit)
                found, optimal = ex.set, ex.optimal
            else:
                found, optimal = solve(gk, m, cfg, model).set, False
            results[m] = (found, optimal, time.perf_counter() - t0)
        ref = results["exact"][0].size if "exact" in results else max(r[0].size for r in results.values())
        for m, (found, optimal, elapsed) in results.items():
            drop = drop_pct(ref, found.size) if ref > 0 else 0.0
            label = "exact-bnb" if m == "exact" else m
            cells.append(ExperimentCell(k, label, found.size, drop, elapsed, optimal, found.members))
    params = {"alphabet_size": g.n, "p": p, "seed": seed, "k_max": k_max,
              "random": graph is None}
    return ConfusionReport(g, k_max, cells, params)


def witness_set(est: CapacityEstimate, k: int) -> IndependentSet:
    rec = next(r for r in est.records if r.k == k)
    return IndependentSet(rec.num_vertices, rec.witness)

