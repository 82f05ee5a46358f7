import pytest

from misgnn.decode import dga
from misgnn.exact import brute_force_mis, exact_mis
from misgnn.graph import (
    complete_graph, cycle_graph, erdos_renyi, graph_power, new_graph, path_graph, strong_product,
)

from conftest import enum_alpha


def test_brute_force_examples():
    assert brute_force_mis(cycle_graph(5)).alpha == 2
    res = brute_force_mis(path_graph(3))
    assert res.alpha == 2 and res.set.members == (0, 2) and res.optimal
    assert brute_force_mis(complete_graph(6)).alpha == 1
    assert brute_force_mis(new_graph(0, [])).alpha == 0
    with pytest.raises(ValueError):
        brute_force_mis(new_graph(26, []))


def test_brute_force_matches_enumeration():
    for seed in range(20):
        g = erdos_renyi(9, 0.35, seed)
        assert brute_force_mis(g).alpha == enum_alpha(g)


def test_exact_small_cases():
    assert exact_mis(new_graph(0, [])).alpha == 0
    assert exact_mis(new_graph(7, [])).alpha == 7
    assert exact_mis(complete_graph(9)).alpha == 1
    assert exact_mis(cycle_graph(5)).alpha == 2
    assert exact_mis(cycle_graph(9)).alpha == 4


def test_exact_c5_squared():
    res = exact_mis(strong_product(cycle_graph(5), cycle_graph(5)))
    assert res.optimal and res.alpha == 5
    assert res.set.is_valid(strong_product(cycle_graph(5), cycle_graph(5)))


@pytest.mark.parametrize("clique_cover", [True, False])
def test_exact_matches_brute_force(clique_cover):
    for seed in range(60):
        g = erdos_renyi(5 + seed % 12, (seed % 9 + 1) / 10, seed)
        res = exact_mis(g, clique_cover=clique_cover)
        assert res.optimal and res.set.is_valid(g)
        assert res.alpha == brute_force_mis(g).alpha
        assert res.alpha >= dga(g).size


def test_timeout_returns_valid_incumbent():
    g = erdos_renyi(150, 0.1, 3)
    res = exact_mis(g, time_limit=0.0)
    assert not res.optimal
    assert res.set.is_valid(g)
    assert res.alpha >= dga(g).size


def test_power_lower_bound():
    g = erdos_renyi(4, 0.5, 2)
    a1 = exact_mis(g).alpha
    for k in (2, 3):
        assert exact_mis(graph_power(g, k)).alpha >= a1 ** k


def test_label_record():
    rec = exact_mis(path_graph(3)).to_record("p3")
    assert rec == {"graph_id": "p3", "n": 3, "alpha": 2, "members": [0, 2], "optimal": True}
