"""GNN-assisted maximum independent set solvers with degree-based QUBO rewards."""

from .decode import IndependentSet, combined_score, dga, greedy_decode, greedy_random
from .exact import brute_force_mis, exact_mis
from .features import degree_init
from .graph import Graph, erdos_renyi, graph_power, new_graph, strong_product
from .pipelines import (SolveConfig, SolveResult, TrainedModel, predict_supervised, solve,
                        solve_qubo_unsup, solve_supervised_g, solve_supervised_qubo_g,
                        train_supervised)

__version__ = "0.1.0"
