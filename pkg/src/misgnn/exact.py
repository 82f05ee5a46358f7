"""Exact maximum independent set: exhaustive enumeration and branch-and-bound."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .decode import IndependentSet, dga
from .graph import Graph

BRUTE_FORCE_MAX_N = 25
DEFAULT_TIME_LIMIT = 60.0


@dataclass
class ExactResult:
    set: IndependentSet
    optimal: bool
    nodes_explored: int
    elapsed: float

    @property
    def alpha(self) -> int:
        return self.set.size

    def to_record(self, graph_id: str) -> dict:
        """Label-file record (one JSON object per graph)."""
        return {
            "graph_id": graph_id,
            "n": self.set.n,
            "alpha": self.alpha,
            "members": list(self.set.members),
            "optimal": self.optimal,
        }


def brute_force_mis(g: Graph, chunk: int = 1 << 20) -> ExactResult:
    """Check all 2^n vertex subsets; ties go to the numerically smallest subset mask."""
    if g.n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force is limited to n <= {BRUTE_FORCE_MAX_N}, got {g.n}")
    t0 = time.perf_counter()
    e = g.edge_array
    best_size, best_mask = -1, 0
    total = 1 << g.n
    for start in range(0, total, chunk):
        masks = np.arange(start, min(total, start + chunk), dtype=np.int64)
        ok = np.ones(masks.size, dtype=bool)
        for u, v in e:
            ok &= ((masks >> u) & (masks >> v) & 1) == 0
        if not ok.any():
            continue
        sizes = np.where(ok, np.bitwise_count(masks).astype(np.int64), -1)
        i = int(np.argmax(sizes))
        if sizes[i] > best_size:
            best_size, best_mask = int(sizes[i]), int(masks[i])
    members = [v for v in range(g.n) if best_mask >> v & 1]
    return ExactResult(IndependentSet(g.n, tuple(members)), True, total,
                       time.perf_counter() - t0)


def _clique_cover_bound(cand: int, nbr: tuple[int, ...]) -> int:
    """Number of cliques in a greedy clique cover of ``cand`` (an upper bound on alpha)."""
    count = 0
    while cand:
        low = cand & -cand
        v = low.bit_length() - 1
        cand ^= low
        pool = cand & nbr[v]
        while pool:
            low = pool & -pool
            w = low.bit_length() - 1
            cand ^= low
            pool &= nbr[w]
        count += 1
    return count


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def exact_mis(g: Graph, time_limit: float | None = DEFAULT_TIME_LIMIT,
              clique_cover: bool = True) -> ExactResult:
    """Branch-and-bound MIS.

    Each node first takes every vertex of degree <= 1 in the remaining graph
    (there is always a maximum set containing it), then branches on a
    maximum-degree vertex: include it (drop its closed neighborhood) or exclude
    it (drop the vertex). A node is pruned when ``|current| + bound <= best``,
    where the bound is the remaining vertex count, tightened by a greedy clique
    cover unless ``clique_cover`` is False.

    On timeout the best set found so far is returned with ``optimal=False``.
    """
    t0 = time.perf_counter()
    deadline = None if time_limit is None else t0 + time_limit
    nbr = g.neighbor_masks
    incumbent = dga(g)
    best_size = incumbent.size
    best_mask = sum(1 << v for v in incumbent.members)

    nodes = 0
    optimal = True
    stack = [((1 << g.n) - 1, 0, 0)]
    while stack:
        cand, chosen, size = stack.pop()
        nodes += 1
        if deadline is not None and nodes % 256 == 0 and time.perf_counter() > deadline:
            optimal = False
            break
        # degree-0/1 reductions
        changed = True
        while changed and cand:
            changed = False
            for v in _bits(cand):
                if not cand >> v & 1:
                    continue
                if (nbr[v] & cand).bit_count() <= 1:
                    chosen |= 1 << v
                    size += 1
                    cand &= ~(nbr[v] | (1 << v))
                    changed = True
        if not cand:
            if size > best_size:
                best_size, best_mask = size, chosen
            continue
        remaining = cand.bit_count()
        if size + remaining <= best_size:
            continue
        if clique_cover and size + _clique_cover_bound(cand, nbr) <= best_size:
            continue
        pivot, pivot_deg = -1, -1
        for v in _bits(cand):
            d = (nbr[v] & cand).bit_count()
            if d > pivot_deg:
                pivot, pivot_deg = v, d
        bit = 1 << pivot
        stack.append((cand & ~bit, chosen, size))
        stack.append((cand & ~(nbr[pivot] | bit), chosen | bit, size + 1))

    members = tuple(v for v in range(g.n) if best_mask >> v & 1)
    return ExactResult(IndependentSet(g.n, members), optimal, nodes,
                       time.perf_counter() - t0)
