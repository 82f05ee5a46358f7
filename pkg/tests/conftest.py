import itertools

import numpy as np
import pytest

from misgnn.graph import Graph, new_graph

_ACCEPTANCE_LINES: list[str] = []


def three_clause_product(g: Graph, h: Graph) -> set[tuple[int, int]]:
    """Strong product edges by direct enumeration of the adjacency rule."""
    edges = set()
    verts = [(u, x) for u in range(g.n) for x in range(h.n)]
    for (u, x), (v, y) in itertools.combinations(verts, 2):
        uv = g.has_edge(u, v)
        xy = h.has_edge(x, y)
        if (uv and x == y) or (u == v and xy) or (uv and xy):
            a, b = u * h.n + x, v * h.n + y
            edges.add((min(a, b), max(a, b)))
    return edges


def independent_subsets(g: Graph):
    for r in range(g.n + 1):
        for s in itertools.combinations(range(g.n), r):
            if g.is_independent(s):
                yield s


def enum_alpha(g: Graph) -> int:
    return max(len(s) for s in independent_subsets(g))


def all_labeled_graphs(n: int):
    pairs = list(itertools.combinations(range(n), 2))
    for bits in range(1 << len(pairs)):
        yield new_graph(n, [pairs[i] for i in range(len(pairs)) if bits >> i & 1])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def acceptance_log():
    def record(criterion: str, passed: bool, detail: str = "") -> None:
        line = f"[{'PASS' if passed else 'FAIL'}] {criterion}" + (f" :: {detail}" if detail else "")
        _ACCEPTANCE_LINES.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def numeric_param_grads(model, loss_of_model, h: float = 1e-5) -> dict:
    """Central differences of ``loss_of_model(model)`` with respect to every parameter."""
    grads = {}
    for name, param in model.params().items():
        g = np.zeros_like(param)
        flat, gflat = param.reshape(-1), g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up = loss_of_model(model)
            flat[i] = orig - h
            down = loss_of_model(model)
            flat[i] = orig
            gflat[i] = (up - down) / (2 * h)
        grads[name] = g
    return grads


def max_rel_error(analytic: dict, numeric: dict, floor: float = 1e-8) -> float:
    worst = 0.0
    for name, a in analytic.items():
        n = numeric[name]
        err = np.abs(a - n) / np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
        worst = max(worst, float(err.max()))
    return worst
