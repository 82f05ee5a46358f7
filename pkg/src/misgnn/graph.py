"""Simple undirected graphs, random generators, strong products and file I/O.

Vertices are 0-indexed everywhere; the DIMACS formats are 1-indexed and are
converted at the parsing/writing boundary.

Randomness comes from numpy's PCG64 bit generator (``numpy.random.default_rng``),
whose output stream is fixed by the seed and identical across platforms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

DEFAULT_VERTEX_BUDGET = 10**6


def derive_seed(seed: int, *keys: int) -> int:
    """Deterministically derive a 64-bit child seed from ``seed`` and ``keys``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph.

    ``edges`` holds normalized pairs ``(u, v)`` with ``u < v``, sorted and
    without duplicates. Build instances with :func:`new_graph` (or
    :meth:`Graph.from_edges`), which normalizes and validates the input.
    """

    n: int
    edges: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError(f"vertex count must be nonnegative, got {self.n}")
        for u, v in self.edges:
            if not (0 <= u < v < self.n):
                raise ValueError(f"edge ({u}, {v}) is not normalized for n={self.n}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        return new_graph(n, edges)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def degree(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        if self.edges:
            e = self.edge_array
            np.add.at(deg, e[:, 0], 1)
            np.add.at(deg, e[:, 1], 1)
        deg.setflags(write=False)
        return deg

    @cached_property
    def edge_array(self) -> np.ndarray:
        """Edges as an ``(m, 2)`` integer array."""
        arr = np.array(self.edges, dtype=np.int64).reshape(-1, 2)
        arr.setflags(write=False)
        return arr

    @cached_property
    def neighbor_masks(self) -> tuple[int, ...]:
        """Adjacency as Python-int bitsets: bit ``v`` of entry ``u`` is set iff uv is an edge."""
        masks = [0] * self.n
        for u, v in self.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return tuple(masks)

    def adjacency_matrix(self) -> sp.csr_matrix:
        """Symmetric 0/1 adjacency as a sparse CSR matrix."""
        e = self.edge_array
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        data = np.ones(rows.size, dtype=np.float64)
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.neighbor_masks[u] >> v & 1)

    def is_independent(self, members: Iterable[int]) -> bool:
        mask = np.zeros(self.n, dtype=bool)
        mask[list(members)] = True
        if not self.edges:
            return True
        e = self.edge_array
        return not bool(np.any(mask[e[:, 0]] & mask[e[:, 1]]))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges})"


def new_graph(n: int, edges: Iterable[Sequence[int]]) -> Graph:
    """Build a graph on ``n`` vertices, collapsing duplicate and reversed pairs.

    Raises:
        ValueError: on a self-loop or an endpoint outside ``[0, n)``.
    """
    if n < 0:
        raise ValueError(f"vertex count must be nonnegative, got {n}")
    norm = set()
    for pair in edges:
        u, v = (int(t) for t in pair)
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) has an endpoint outside [0, {n})")
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        norm.add((u, v) if u < v else (v, u))
    return Graph(n, tuple(sorted(norm)))


def _graph_from_sparse(n: int, mat: sp.spmatrix) -> Graph:
    upper = sp.triu(mat, k=1).tocoo()
    pairs = np.stack([upper.row, upper.col], axis=1)
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    pairs = pairs[order]
    return Graph(n, tuple((int(u), int(v)) for u, v in pairs))


# -- generators ---------------------------------------------------------------

def erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """G(n, p): every one of the C(n, 2) pairs is kept independently with probability p.

    Pairs are visited in lexicographic order ``(0,1), (0,2), ..., (n-2,n-1)``
    and pair ``i`` is kept iff the ``i``-th uniform draw of ``default_rng(seed)``
    is below ``p``.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    if n < 0:
        raise ValueError(f"vertex count must be nonnegative, got {n}")
    rng = np.random.default_rng(seed)
    rows, cols = np.triu_indices(n, k=1)
    keep = rng.random(rows.size) < p
    return Graph(n, tuple(zip(rows[keep].tolist(), cols[keep].tolist())))


def random_confusion_graph(alphabet_size: int, p: float, seed: int) -> Graph:
    """Random confusion graph over an alphabet: letters are vertices, confusable pairs are edges."""
    return erdos_renyi(alphabet_size, p, seed)


def complete_graph(n: int) -> Graph:
    return erdos_renyi(n, 1.0, 0)


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return new_graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return new_graph(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(leaves: int) -> Graph:
    """Star with center 0 and leaves 1..leaves."""
    return new_graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


# -- strong products ----------------------------------------------------------

def strong_product(g: Graph, h: Graph) -> Graph:
    """Strong product of ``g`` and ``h``.

    Vertex ``(u, x)`` gets flat index ``u * h.n + x``. Two distinct vertices are
    adjacent iff each coordinate is equal or adjacent, which is
    ``(A_g + I) kron (A_h + I) - I`` in matrix form.
    """
    ag = g.adjacency_matrix() + sp.identity(g.n, format="csr")
    ah = h.adjacency_matrix() + sp.identity(h.n, format="csr")
    prod = sp.kron(ag, ah, format="csr")
    prod.setdiag(0)
    prod.eliminate_zeros()
    return _graph_from_sparse(g.n * h.n, prod)


def graph_power(g: Graph, k: int, vertex_budget: int = DEFAULT_VERTEX_BUDGET) -> Graph:
    """k-th strong power: ``G^1 = G`` and ``G^k = G^(k-1) [x] G``."""
    if k < 1:
        raise ValueError(f"power must be a positive integer, got {k}")
    if g.n ** k > vertex_budget:
        raise ValueError(
            f"G^{k} would have {g.n ** k} vertices, above the budget of {vertex_budget}"
        )
    out = g
    for _ in range(k - 1):
        out = strong_product(out, g)
    return out


def decode_product_vertex(index: int, base: int, k: int) -> tuple[int, ...]:
    """Inverse of the flat product index: the k letters of word ``index`` in ``G^k``."""
    digits = []
    for _ in range(k):
        index, d = divmod(index, base)
        digits.append(d)
    if index:
        raise ValueError("index out of range for the given base and power")
    return tuple(reversed(digits))


def encode_product_vertex(word: Sequence[int], base: int) -> int:
    index = 0
    for letter in word:
        index = index * base + int(letter)
    return index


# -- DIMACS edge format -------------------------------------------------------

class DimacsError(ValueError):
    """Malformed DIMACS graph or CNF input."""


def parse_dimacs(text: str) -> Graph:
    """Parse the DIMACS edge format (``p edge n m`` header, 1-indexed ``e u v`` lines)."""
    n = None
    declared_m = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise DimacsError(f"line {lineno}: duplicate problem line")
            if len(parts) != 4 or parts[1] not in ("edge", "col"):
                raise DimacsError(f"line {lineno}: malformed header {line!r}")
            try:
                n, declared_m = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"line {lineno}: malformed header {line!r}") from None
            if n < 0 or declared_m < 0:
                raise DimacsError(f"line {lineno}: negative counts in header")
        elif parts[0] == "e":
            if n is None:
                raise DimacsError(f"line {lineno}: edge before problem line")
            if len(parts) != 3:
                raise DimacsError(f"line {lineno}: malformed edge {line!r}")
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise DimacsError(f"line {lineno}: malformed edge {line!r}") from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise DimacsError(f"line {lineno}: vertex index out of range in {line!r}")
            if u == v:
                raise DimacsError(f"line {lineno}: self-loop in {line!r}")
            edges.append((u - 1, v - 1))
        else:
            raise DimacsError(f"line {lineno}: unexpected line {line!r}")
    if n is None:
        raise DimacsError("missing 'p edge n m' problem line")
    g = new_graph(n, edges)
    if declared_m != g.num_edges:
        warnings.warn(
            f"header declares {declared_m} edges but {g.num_edges} distinct edges were read",
            stacklevel=2,
        )
    return g


def write_dimacs(g: Graph, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"c {c}" for c in comment.splitlines())
    lines.append(f"p edge {g.n} {g.num_edges}")
    lines.extend(f"e {u + 1} {v + 1}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def parse_edgelist(text: str, n: int | None = None) -> Graph:
    """Parse 0-indexed ``u v`` lines; ``#`` starts a comment. ``n`` defaults to max index + 1."""
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise DimacsError(f"line {lineno}: expected 'u v', got {raw!r}")
        edges.append((int(parts[0]), int(parts[1])))
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    return new_graph(n, edges)


def load_graph(path) -> Graph:
    """Read a graph file, detecting DIMACS (has a ``p`` line) vs. plain edge list."""
    with open(path, encoding="utf-8") as f:
        text = f.read()
    if any(line.lstrip().startswith("p ") for line in text.splitlines()):
        return parse_dimacs(text)
    return parse_edgelist(text)


# -- SAT -> MIS ---------------------------------------------------------------

def parse_cnf(text: str) -> tuple[int, list[list[int]]]:
    """Parse DIMACS CNF into ``(num_vars, clauses)``. Clauses may span lines.

    A ``%`` line (as in the SATLIB files) ends the formula.
    """
    num_vars = None
    declared = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if num_vars is not None or len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: malformed header {line!r}")
            try:
                num_vars, declared = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"line {lineno}: malformed header {line!r}") from None
            continue
        if num_vars is None:
            raise DimacsError(f"line {lineno}: clause before problem line")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                if not current:
                    raise DimacsError(f"line {lineno}: empty clause")
                clauses.append(current)
                current = []
            else:
                if abs(lit) > num_vars:
                    raise DimacsError(f"line {lineno}: variable {abs(lit)} exceeds {num_vars}")
                current.append(lit)
    if num_vars is None:
        raise DimacsError("missing 'p cnf' problem line")
    if current:
        clauses.append(current)
    if declared != len(clauses):
        warnings.warn(f"header declares {declared} clauses but {len(clauses)} were read",
                      stacklevel=2)
    return num_vars, clauses


def cnf_to_mis_graph(text: str) -> tuple[Graph, int]:
    """Standard SAT -> MIS reduction.

    One vertex per literal occurrence (in file order), a clique on each clause,
    and an edge between every pair of complementary occurrences. The formula is
    satisfiable iff the independence number equals the returned clause count.
    """
    _, clauses = parse_cnf(text)
    edges = []
    occurrences: dict[int, list[int]] = {}
    vid = 0
    for clause in clauses:
        ids = list(range(vid, vid + len(clause)))
        for i in range(len(ids)):
            for j in range(i + 1, len(ids)):
                edges.append((ids[i], ids[j]))
        for lit, v in zip(clause, ids):
            occurrences.setdefault(lit, []).append(v)
        vid += len(clause)
    for lit, vs in occurrences.items():
        if lit > 0:
            for u in vs:
                for v in occurrences.get(-lit, ()):
                    edges.append((u, v))
    return new_graph(vid, edges), len(clauses)
