"""Greedy decoding of node scores into maximal independent sets, plus greedy baselines."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .features import DEFAULT_K_EXPONENT, degree_init
from .graph import Graph


@dataclass(frozen=True)
class IndependentSet:
    """Vertex subset of a graph on ``n`` vertices, members sorted ascending."""

    n: int
    members: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.n, dtype=bool)
        m[list(self.members)] = True
        return m

    def is_valid(self, g: Graph) -> bool:
        return g.n == self.n and g.is_independent(self.members)

    def is_maximal(self, g: Graph) -> bool:
        """True iff every non-member has a neighbor inside the set."""
        inside = self.mask
        covered = inside.copy()
        e = g.edge_array
        if e.size:
            covered[e[:, 0][inside[e[:, 1]]]] = True
            covered[e[:, 1][inside[e[:, 0]]]] = True
        return bool(covered.all())


def combined_score(p_gnn, x_init, c1: float, c2: float) -> np.ndarray:
    """Decoding scores ``c1 * p_gnn + c2 * x_init``."""
    p = np.asarray(p_gnn, dtype=np.float64)
    x = np.asarray(x_init, dtype=np.float64)
    if p.shape != x.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {x.shape}")
    return c1 * p + c2 * x


def greedy_decode(g: Graph, scores) -> IndependentSet:
    """Visit vertices by descending score (ties: ascending index) and keep each
    vertex none of whose neighbors has been kept already.
    """
    s = np.asarray(scores, dtype=np.float64)
    if s.shape != (g.n,):
        raise ValueError(f"expected {g.n} scores, got shape {s.shape}")
    order = np.argsort(-s, kind="stable")
    adj = g.adjacency
    blocked = [False] * g.n
    chosen = []
    for v in order.tolist():
        if blocked[v]:
            continue
        chosen.append(v)
        blocked[v] = True
        for w in adj[v]:
            blocked[w] = True
    return IndependentSet(g.n, tuple(sorted(chosen)))


def greedy_random(g: Graph, seed: int) -> IndependentSet:
    """Greedy algorithm (GA): greedy decoding in a seeded random vertex order."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(g.n)
    scores = np.empty(g.n)
    scores[order] = np.arange(g.n, 0, -1, dtype=np.float64)
    return greedy_decode(g, scores)


def dga(g: Graph, k_exponent: float = DEFAULT_K_EXPONENT) -> IndependentSet:
    """Degree-based greedy algorithm: ascending static degree, ties by index.

    Identical to decoding the combined score with ``c1 = 0``.
    """
    if g.n == 0:
        return IndependentSet(0, ())
    return greedy_decode(g, degree_init(g, k_exponent))


def dynamic_degree_greedy(g: Graph) -> IndependentSet:
    """Min-degree greedy that recomputes degrees in the residual graph after every pick."""
    alive = set(range(g.n))
    adj = [set(a) for a in g.adjacency]
    chosen = []
    while alive:
        v = min(alive, key=lambda u: (len(adj[u]), u))
        chosen.append(v)
        removed = adj[v] | {v}
        alive -= removed
        for u in removed:
            for w in adj[u]:
                adj[w].discard(u)
    return IndependentSet(g.n, tuple(sorted(chosen)))
