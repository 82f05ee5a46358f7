"""Reward-weighted MIS Hamiltonian in QUBO form.

The energy of a (relaxed) assignment ``x in [0, 1]^n`` is

    H(x) = -sum_i r_i x_i + P * sum_{ij in E} x_i x_j

with per-node rewards ``r = R * features`` and ``R = P |E| / |V|^n_exp``.
Instances are stored sparsely as (rewards, penalty, edge list).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph

DEFAULT_PENALTY = 2.0
DEFAULT_REWARD_EXPONENT = 1.0


@dataclass(frozen=True)
class QuboInstance:
    rewards: np.ndarray
    penalty: float
    edges: np.ndarray
    reward_exponent: float = DEFAULT_REWARD_EXPONENT
    reward_factor: float = 1.0

    @property
    def n(self) -> int:
        return self.rewards.shape[0]

    def dense_q(self) -> np.ndarray:
        """Upper-triangular Q with ``x^T Q x == H(x)`` for binary x."""
        q = np.diag(-self.rewards)
        if self.edges.size:
            q[self.edges[:, 0], self.edges[:, 1]] = self.penalty
        return q


def reward_factor(g: Graph, penalty: float = DEFAULT_PENALTY,
                  n_exp: float = DEFAULT_REWARD_EXPONENT) -> float:
    if g.n < 1:
        raise ValueError("reward factor needs at least one vertex")
    if not penalty > 0:
        raise ValueError(f"penalty must be positive, got {penalty}")
    return penalty * g.num_edges / g.n ** n_exp


def node_rewards(r_factor: float, features) -> np.ndarray:
    return r_factor * np.asarray(features, dtype=np.float64)


def build_qubo(g: Graph, features, penalty: float = DEFAULT_PENALTY,
               n_exp: float = DEFAULT_REWARD_EXPONENT) -> QuboInstance:
    x = np.asarray(features, dtype=np.float64)
    if x.shape != (g.n,):
        raise ValueError(f"expected {g.n} features, got shape {x.shape}")
    r_factor = reward_factor(g, penalty, n_exp)
    return QuboInstance(node_rewards(r_factor, x), float(penalty), g.edge_array,
                        float(n_exp), r_factor)


def constant_reward_qubo(g: Graph, penalty: float = DEFAULT_PENALTY) -> QuboInstance:
    """The unmodified Hamiltonian: every node has reward 1."""
    return QuboInstance(np.ones(g.n), float(penalty), g.edge_array)


def _check(inst: QuboInstance, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (inst.n,):
        raise ValueError(f"expected {inst.n} values, got shape {x.shape}")
    return x


def penalty_term(inst: QuboInstance, x) -> float:
    """``P * sum_{ij in E} x_i x_j``."""
    x = _check(inst, x)
    if not inst.edges.size:
        return 0.0
    return float(inst.penalty * np.dot(x[inst.edges[:, 0]], x[inst.edges[:, 1]]))


def qubo_loss(inst: QuboInstance, x) -> float:
    x = _check(inst, x)
    return float(-np.dot(inst.rewards, x)) + penalty_term(inst, x)


def qubo_grad(inst: QuboInstance, x) -> np.ndarray:
    """``dH/dx_i = -r_i + P * sum_{j ~ i} x_j``."""
    x = _check(inst, x)
    grad = -inst.rewards.copy()
    if inst.edges.size:
        u, v = inst.edges[:, 0], inst.edges[:, 1]
        grad += inst.penalty * (np.bincount(u, weights=x[v], minlength=inst.n)
                                + np.bincount(v, weights=x[u], minlength=inst.n))
    return grad


def classic_hamiltonian(g: Graph, penalty: float, x) -> float:
    """``-sum_i x_i + P * sum_{ij in E} x_i x_j``."""
    return qubo_loss(constant_reward_qubo(g, penalty), x)
