import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from misgnn.decode import (
    combined_score, dga, dynamic_degree_greedy, greedy_decode, greedy_random,
)
from misgnn.features import degree_init
from misgnn.graph import complete_graph, cycle_graph, erdos_renyi, new_graph, path_graph, star_graph


def test_combined_score_examples():
    np.testing.assert_allclose(combined_score([0.9, 0.1], [0.5, 1], 2, 3), [3.3, 3.2])
    np.testing.assert_allclose(combined_score([0.9, 0.1], [0.5, 1], 0, 3), [1.5, 3.0])
    np.testing.assert_allclose(combined_score([0.9, 0.1], [0.5, 1], 1, 0), [0.9, 0.1])
    with pytest.raises(ValueError):
        combined_score([0.1], [0.1, 0.2], 1, 1)


def test_greedy_decode_examples():
    assert greedy_decode(path_graph(3), [3, 1.5, 3]).members == (0, 2)
    assert greedy_decode(new_graph(4, []), [0.3, 0.1, 0.2, 0.0]).members == (0, 1, 2, 3)
    assert greedy_decode(complete_graph(4), [0.2, 0.9, 0.9, 0.1]).members == (1,)


def test_greedy_decode_rejects_bad_length():
    with pytest.raises(ValueError):
        greedy_decode(path_graph(3), [1, 2])


def test_greedy_random():
    assert greedy_random(new_graph(5, []), 3).size == 5
    g = erdos_renyi(30, 0.2, 1)
    assert greedy_random(g, 8) == greedy_random(g, 8)
    assert {greedy_random(cycle_graph(4), s).size for s in range(50)} == {2}


def test_every_order_on_c4_gives_two():
    c4 = cycle_graph(4)
    for order in itertools.permutations(range(4)):
        scores = np.empty(4)
        scores[list(order)] = [4, 3, 2, 1]
        assert greedy_decode(c4, scores).size == 2


def test_dga_examples():
    assert dga(star_graph(3)).members == (1, 2, 3)
    c6 = cycle_graph(6)
    assert dga(c6) == greedy_decode(c6, -np.arange(6.0))
    g = erdos_renyi(25, 0.3, 2)
    p = np.random.default_rng(0).random(25)
    assert dga(g, 2) == greedy_decode(g, combined_score(p, degree_init(g, 2), 0, 1))


def test_dynamic_degree_greedy():
    g = erdos_renyi(40, 0.2, 6)
    s = dynamic_degree_greedy(g)
    assert s.is_valid(g) and s.is_maximal(g)
    assert dynamic_degree_greedy(star_graph(4)).members == (1, 2, 3, 4)


def test_is_maximal_detects_non_maximal():
    from misgnn.decode import IndependentSet
    g = path_graph(4)
    assert not IndependentSet(4, (0,)).is_maximal(g)
    assert IndependentSet(4, (0, 2)).is_maximal(g)
    assert not IndependentSet(4, (0, 1)).is_valid(g)


@settings(max_examples=100, deadline=None)
@given(n=st.integers(1, 60), p=st.floats(0, 1), seed=st.integers(0, 10**6),
       scores=st.lists(st.floats(-5, 5), min_size=60, max_size=60))
def test_decode_valid_maximal_deterministic(n, p, seed, scores):
    g = erdos_renyi(n, p, seed)
    s = np.array(scores[:n])
    out = greedy_decode(g, s)
    assert out.is_valid(g) and out.is_maximal(g)
    assert out == greedy_decode(g, s.copy())
