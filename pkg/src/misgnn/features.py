"""Degree-based node feature initialization."""

from __future__ import annotations

import numpy as np

from .graph import Graph

DEFAULT_K_EXPONENT = 1.0


def degree_init(g: Graph, k_exponent: float = DEFAULT_K_EXPONENT) -> np.ndarray:
    """Per-node features ``1 / (d_norm + 1) ** k`` from min-max normalized degrees.

    Low-degree vertices get features near 1, the highest-degree vertices
    ``0.5 ** k``. When every vertex has the same degree the normalized degree
    is taken as 0, so all features are 1.
    """
    if g.n == 0:
        raise ValueError("degree features need at least one vertex")
    if not k_exponent > 0:
        raise ValueError(f"k_exponent must be positive, got {k_exponent}")
    d = g.degree.astype(np.float64)
    d_min, d_max = d.min(), d.max()
    if d_max == d_min:
        d_norm = np.zeros(g.n)
    else:
        d_norm = (d - d_min) / (d_max - d_min)
    return 1.0 / (d_norm + 1.0) ** k_exponent
