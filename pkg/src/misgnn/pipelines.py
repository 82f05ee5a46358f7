"""Solver pipelines: QUBO+G, Supervised+G and Supervised+QUBO+G, plus baselines.

All pipelines finish with greedy decoding of ``c1 * p + c2 * features``, so
their output is always a valid, maximal independent set.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import gcn
from .decode import IndependentSet, combined_score, dga, greedy_decode, greedy_random
from .exact import DEFAULT_TIME_LIMIT, exact_mis
from .features import degree_init
from .graph import Graph, derive_seed
from .qubo import build_qubo, penalty_term, qubo_grad, qubo_loss

log = logging.getLogger(__name__)

METHODS = ("dga", "ga", "qubo-g", "sup-g", "sup-qubo-g", "exact")
MODEL_METHODS = ("sup-g", "sup-qubo-g")

# seed-derivation streams
_UNSUP_STREAM = 1
_SUP_INIT_STREAM = 2
_SUP_SHUFFLE_STREAM = 3


@dataclass
class SolveConfig:
    epochs_unsup: int = 2000
    epochs_sup_predictor_refine: int = 200
    epochs_sup_train: int = 60
    penalty_threshold: float | None = None  # None means 0.5 * penalty
    max_reinits: int = 5
    max_reruns: int = 3
    warmup_epochs: int = 100
    c1: float = 2.0
    c2: float = 3.0
    penalty: float = 2.0
    n_exp: float = 1.0
    k_exponent: float = 1.0
    hidden: int = 64
    lr_unsup: float = 1e-2
    lr_sup: float = 1e-3
    unsup_activation: str = "relu"
    exact_time_limit: float = DEFAULT_TIME_LIMIT
    seed: int = 0

    def __post_init__(self):
        for name in ("epochs_unsup", "epochs_sup_predictor_refine", "epochs_sup_train", "hidden"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        for name in ("max_reinits", "max_reruns", "warmup_epochs"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.penalty_threshold is not None and self.penalty_threshold < 0:
            raise ValueError("penalty_threshold must be nonnegative")
        if self.unsup_activation not in ("relu", "none"):
            raise ValueError("unsup_activation must be 'relu' or 'none'")

    @property
    def threshold(self) -> float:
        if self.penalty_threshold is None:
            return 0.5 * self.penalty
        return self.penalty_threshold

    @classmethod
    def from_dict(cls, doc: dict) -> "SolveConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise ValueError(f"unknown config field(s): {', '.join(unknown)}")
        return cls(**doc)

    @classmethod
    def load(cls, path) -> "SolveConfig":
        with open(path, encoding="utf-8") as f:
            return cls.from_dict(json.load(f))


@dataclass
class SolveResult:
    set: IndependentSet
    method: str
    loss_trace: list[float] = field(default_factory=list)
    reinit_count: int = 0
    rerun_count: int = 0
    elapsed: float = 0.0
    probabilities: np.ndarray | None = None
    final_loss: float | None = None

    @property
    def size(self) -> int:
        return self.set.size

    def to_dict(self, graph_id: str, g: Graph | None = None, timing: bool = True) -> dict:
        doc = {
            "graph_id": graph_id,
            "method": self.method,
            "size": self.size,
            "members": list(self.set.members),
            "valid": self.set.is_valid(g) if g is not None else True,
        }
        if timing:
            doc["elapsed_s"] = self.elapsed
        doc.update(reinits=self.reinit_count, reruns=self.rerun_count, final_loss=self.final_loss)
        return doc


@dataclass
class TrainedModel:
    model: gcn.GcnModel
    dataset_id: str = ""
    epochs: int = 0
    final_bce: float = float("nan")

    def save(self, path) -> None:
        m = self.model.copy()
        m.metadata.update(dataset_id=self.dataset_id, epochs=self.epochs, final_bce=self.final_bce)
        gcn.save_model(m, path)

    @classmethod
    def load(cls, path) -> "TrainedModel":
        m = gcn.load_model(path)
        meta = m.metadata
        return cls(m, meta.get("dataset_id", ""), int(meta.get("epochs", 0)),
                   float(meta.get("final_bce", float("nan"))))


# -- unsupervised QUBO training ---------------------------------------------------

class _Restart(Exception):
    pass


def _train_attempt(g, a_hat, x, inst, epochs, cfg, seed, can_reinit):
    """One training run. Returns (trace, p_final, loss_final, warmup_loss).

    Raises _Restart when the reinit rule fires (and ``can_reinit``) or the
    optimization diverges.
    """
    model = gcn.init_params(1, cfg.hidden, seed, cfg.unsup_activation)
    opt = gcn.Adam(lr=cfg.lr_unsup)
    trace = []
    warmup_loss = None
    try:
        for epoch in range(epochs):
            p, cache = gcn.forward(model, a_hat, x, epoch=epoch)
            loss = qubo_loss(inst, p)
            if not np.isfinite(loss):
                raise gcn.DivergenceError("non-finite loss", epoch)
            trace.append(loss)
            if epoch == cfg.warmup_epochs:
                warmup_loss = loss
                if loss > 0 and can_reinit:
                    raise _Restart(f"loss {loss:.4g} > 0 at warmup epoch {epoch}")
            opt.step(model, gcn.backward(model, cache, qubo_grad(inst, p)))
        p, _ = gcn.forward(model, a_hat, x, epoch=epochs)
        final = qubo_loss(inst, p)
    except gcn.DivergenceError as exc:
        raise _Restart(str(exc)) from exc
    if final > 0 and can_reinit:
        raise _Restart(f"final loss {final:.4g} > 0")
    return trace, p, final, warmup_loss


def _run_qubo(g: Graph, x: np.ndarray, epochs: int, cfg: SolveConfig, method: str) -> SolveResult:
    """Train the sigmoid-head GCN on the QUBO built from features ``x`` and decode.

    Reinit rule: loss > 0 at the warmup checkpoint or at the end restarts with
    fresh parameters (at most ``max_reinits`` times per solve). Rerun rule: a
    finished run whose penalty term exceeds the threshold is repeated with a
    fresh seed (at most ``max_reruns`` times). If the last run still fails the
    penalty check, the lowest-energy finished run is decoded instead.
    """
    t0 = time.perf_counter()
    a_hat = gcn.propagation_operator(g)
    inst = build_qubo(g, x, cfg.penalty, cfg.n_exp)
    reinits = reruns = attempt = 0
    trace: list[float] = []
    best = None  # (energy, p)
    chosen = None
    while True:
        seed = derive_seed(cfg.seed, _UNSUP_STREAM, attempt)
        attempt += 1
        try:
            run_trace, p, energy, _ = _train_attempt(
                g, a_hat, x, inst, epochs, cfg, seed, can_reinit=reinits < cfg.max_reinits)
        except _Restart as exc:
            if reinits < cfg.max_reinits:
                reinits += 1
                log.debug("reinitializing (%s)", exc)
                continue
            # diverged with no reinit budget left
            p = energy = None
            run_trace = []
        trace.extend(run_trace)
        if p is not None and (best is None or energy < best[0]):
            best = (energy, p)
        if p is not None and penalty_term(inst, p) <= cfg.threshold:
            chosen = (energy, p)
            break
        if reruns < cfg.max_reruns:
            reruns += 1
            continue
        break
    if chosen is None:
        chosen = best if best is not None else (None, np.zeros(g.n))
    energy, p = chosen
    members = greedy_decode(g, combined_score(p, x, cfg.c1, cfg.c2))
    return SolveResult(members, method, trace, reinits, reruns, time.perf_counter() - t0,
                       p, energy)


def solve_qubo_unsup(g: Graph, cfg: SolveConfig | None = None) -> SolveResult:
    """QUBO+G: degree features, reward-weighted QUBO, GCN minimization, greedy decode."""
    cfg = cfg or SolveConfig()
    if g.n < 1:
        raise ValueError("graph has no vertices")
    x = degree_init(g, cfg.k_exponent)
    return _run_qubo(g, x, cfg.epochs_unsup, cfg, "qubo-g")


# -- supervised ---------------------------------------------------------------------

def _labels_to_array(label, n: int) -> np.ndarray:
    if hasattr(label, "members"):
        y = np.zeros(n)
        y[list(label.members)] = 1.0
        return y
    y = np.asarray(label, dtype=np.float64)
    if y.shape != (n,):
        raise ValueError(f"label length {y.shape} does not match {n} vertices")
    return y


def train_supervised(graphs: Sequence[Graph], labels: Sequence, cfg: SolveConfig | None = None,
                     epochs: int | None = None, dataset_id: str = "") -> TrainedModel:
    """Fit the tanh-hidden GCN to MIS indicators with BCE.

    ``labels`` holds, per graph, either a 0/1 vector or an object with a
    ``members`` attribute (an :class:`IndependentSet`). Each epoch visits every
    graph once in a seeded shuffled order with one optimizer step per graph.
    """
    cfg = cfg or SolveConfig()
    epochs = cfg.epochs_sup_train if epochs is None else epochs
    if not graphs:
        raise ValueError("empty training set")
    if len(graphs) != len(labels):
        raise ValueError(f"{len(graphs)} graphs but {len(labels)} labels")
    data = []
    for g, lab in zip(graphs, labels):
        data.append((gcn.propagation_operator(g), degree_init(g, cfg.k_exponent),
                     _labels_to_array(lab, g.n)))
    model = gcn.init_params(1, cfg.hidden, derive_seed(cfg.seed, _SUP_INIT_STREAM), "tanh")
    opt = gcn.Adam(lr=cfg.lr_sup)
    rng = np.random.default_rng(derive_seed(cfg.seed, _SUP_SHUFFLE_STREAM))
    for epoch in range(epochs):
        for i in rng.permutation(len(data)):
            a_hat, x, y = data[i]
            p, cache = gcn.forward(model, a_hat, x, epoch=epoch)
            _, dp = gcn.bce_loss(p, y)
            opt.step(model, gcn.backward(model, cache, dp))
    final = bce_dataset(model, data)
    return TrainedModel(model, dataset_id, epochs, final)


def bce_dataset(model: gcn.GcnModel, data) -> float:
    """Node-weighted mean BCE over ``(a_hat, features, labels)`` triples."""
    total, count = 0.0, 0
    for a_hat, x, y in data:
        p, _ = gcn.forward(model, a_hat, x)
        loss, _ = gcn.bce_loss(p, y)
        total += loss * y.size
        count += y.size
    return total / count


def evaluate_bce(model, graphs: Sequence[Graph], labels: Sequence, k_exponent: float = 1.0) -> float:
    model = getattr(model, "model", model)
    data = [(gcn.propagation_operator(g), degree_init(g, k_exponent), _labels_to_array(lab, g.n))
            for g, lab in zip(graphs, labels)]
    return bce_dataset(model, data)


def predict_supervised(model, g: Graph, k_exponent: float = 1.0) -> np.ndarray:
    model = getattr(model, "model", model)
    p, _ = gcn.forward(model, gcn.propagation_operator(g), degree_init(g, k_exponent))
    return p


def solve_supervised_g(g: Graph, model, cfg: SolveConfig | None = None) -> SolveResult:
    cfg = cfg or SolveConfig()
    t0 = time.perf_counter()
    p = predict_supervised(model, g, cfg.k_exponent)
    x = degree_init(g, cfg.k_exponent)
    members = greedy_decode(g, combined_score(p, x, cfg.c1, cfg.c2))
    return SolveResult(members, "sup-g", elapsed=time.perf_counter() - t0, probabilities=p)


def solve_supervised_qubo_g(g: Graph, model, cfg: SolveConfig | None = None) -> SolveResult:
    """Supervised predictions replace the degree features in the QUBO pipeline:
    as GCN input, in the rewards and in the decoding mix.
    """
    cfg = cfg or SolveConfig()
    t0 = time.perf_counter()
    x_sup = predict_supervised(model, g, cfg.k_exponent)
    res = _run_qubo(g, x_sup, cfg.epochs_sup_predictor_refine, cfg, "sup-qubo-g")
    res.elapsed = time.perf_counter() - t0
    return res


# -- dispatch -------------------------------------------------------------------------

def _wrap(members: IndependentSet, method: str, t0: float) -> SolveResult:
    return SolveResult(members, method, elapsed=time.perf_counter() - t0)


def solve(g: Graph, method: str, cfg: SolveConfig | None = None, model=None) -> SolveResult:
    """Run one of :data:`METHODS` on ``g``."""
    cfg = cfg or SolveConfig()
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if method in MODEL_METHODS and model is None:
        raise ValueError(f"method {method!r} needs a trained model")
    t0 = time.perf_counter()
    if method == "dga":
        return _wrap(dga(g, cfg.k_exponent), method, t0)
    if method == "ga":
        return _wrap(greedy_random(g, cfg.seed), method, t0)
    if method == "exact":
        return _wrap(exact_mis(g, cfg.exact_time_limit).set, method, t0)
    if g.n == 0:
        return _wrap(IndependentSet(0, ()), method, t0)
    if method == "qubo-g":
        return solve_qubo_unsup(g, cfg)
    if method == "sup-g":
        return solve_supervised_g(g, model, cfg)
    return solve_supervised_qubo_g(g, model, cfg)
