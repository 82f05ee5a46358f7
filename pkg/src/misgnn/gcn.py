"""Two-layer graph convolutional network with hand-written backward pass.

    H1 = act(A_hat @ X @ W1 + b1)
    p  = sigmoid(A_hat @ H1 @ W2 + b2)

where ``A_hat = D^-1/2 (A + I) D^-1/2`` is the symmetrically normalized
adjacency with self loops. Everything is float64.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.special import expit

from .graph import Graph

FORMAT_VERSION = 1
ACTIVATIONS = ("relu", "tanh", "none")
BCE_EPS = 1e-7


class DivergenceError(FloatingPointError):
    """A forward pass or gradient produced a non-finite value."""

    def __init__(self, message: str, epoch: int | None = None):
        if epoch is not None:
            message = f"epoch {epoch}: {message}"
        super().__init__(message)
        self.epoch = epoch


DENSE_OPERATOR_MAX_N = 512


def normalize_adjacency(g: Graph) -> sp.csr_matrix:
    if g.n < 1:
        raise ValueError("normalized adjacency needs at least one vertex")
    a = g.adjacency_matrix() + sp.identity(g.n, format="csr")
    inv_sqrt = 1.0 / np.sqrt(np.asarray(a.sum(axis=1)).ravel())
    d = sp.diags(inv_sqrt)
    return (d @ a @ d).tocsr()


def propagation_operator(g: Graph):
    """Normalized adjacency in the cheapest form to multiply with: dense for small graphs."""
    a_hat = normalize_adjacency(g)
    return a_hat.toarray() if g.n <= DENSE_OPERATOR_MAX_N else a_hat


@dataclass
class GcnModel:
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    hidden_act: str = "relu"
    seed: int | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.hidden_act not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.hidden_act!r}; expected one of {ACTIVATIONS}")
        h = self.W1.shape[1]
        if self.b1.shape != (h,) or self.W2.shape != (h, 1) or self.b2.shape != (1,):
            raise ValueError("inconsistent parameter shapes")

    @property
    def input_dim(self) -> int:
        return self.W1.shape[0]

    @property
    def hidden(self) -> int:
        return self.W1.shape[1]

    def params(self) -> dict[str, np.ndarray]:
        return {"W1": self.W1, "b1": self.b1, "W2": self.W2, "b2": self.b2}

    def copy(self) -> "GcnModel":
        return GcnModel(self.W1.copy(), self.b1.copy(), self.W2.copy(), self.b2.copy(),
                        self.hidden_act, self.seed, dict(self.metadata))


def init_params(input_dim: int, hidden: int, seed: int, hidden_act: str = "relu") -> GcnModel:
    """Glorot-uniform weights drawn from ``default_rng(seed)``; zero biases."""
    if input_dim < 1:
        raise ValueError(f"input_dim must be >= 1, got {input_dim}")
    if hidden < 1:
        raise ValueError(f"hidden size must be >= 1, got {hidden}")
    rng = np.random.default_rng(seed)
    lim1 = np.sqrt(6.0 / (input_dim + hidden))
    lim2 = np.sqrt(6.0 / (hidden + 1))
    w1 = rng.uniform(-lim1, lim1, size=(input_dim, hidden))
    w2 = rng.uniform(-lim2, lim2, size=(hidden, 1))
    return GcnModel(w1, np.zeros(hidden), w2, np.zeros(1), hidden_act, seed)


def _act(name, z):
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "tanh":
        return np.tanh(z)
    return z


def _act_grad(name, z, h):
    if name == "relu":
        return (z > 0).astype(np.float64)
    if name == "tanh":
        return 1.0 - h * h
    return np.ones_like(z)


def _as_matrix(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] != n:
        raise ValueError(f"feature rows {x.shape[0]} do not match {n} vertices")
    return x


def forward(model: GcnModel, a_hat, x, epoch: int | None = None):
    """Node probabilities and the cache needed by :func:`backward`."""
    x = _as_matrix(x, a_hat.shape[0])
    if x.shape[1] != model.input_dim:
        raise ValueError(f"expected {model.input_dim} input features, got {x.shape[1]}")
    ax = a_hat @ x
    z1 = ax @ model.W1 + model.b1
    h1 = _act(model.hidden_act, z1)
    ah = a_hat @ h1
    z2 = ah @ model.W2 + model.b2
    p = expit(z2[:, 0])
    if not np.isfinite(z2).all():
        raise DivergenceError("non-finite output logits", epoch)
    return p, (a_hat, ax, z1, h1, ah, p)


def backward(model: GcnModel, cache, dl_dp) -> dict[str, np.ndarray]:
    a_hat, ax, z1, h1, ah, p = cache
    dl_dp = np.asarray(dl_dp, dtype=np.float64)
    if dl_dp.shape != p.shape:
        raise ValueError(f"gradient shape {dl_dp.shape} does not match output {p.shape}")
    dz2 = (dl_dp * p * (1.0 - p))[:, None]
    d_w2 = ah.T @ dz2
    d_b2 = dz2.sum(axis=0)
    # a_hat is symmetric
    d_h1 = a_hat @ (dz2 @ model.W2.T)
    dz1 = d_h1 * _act_grad(model.hidden_act, z1, h1)
    d_w1 = ax.T @ dz1
    d_b1 = dz1.sum(axis=0)
    return {"W1": d_w1, "b1": d_b1, "W2": d_w2, "b2": d_b2}


def bce_loss(p, y, eps: float = BCE_EPS) -> tuple[float, np.ndarray]:
    """Mean binary cross-entropy and its gradient with respect to ``p``."""
    p = np.asarray(p, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if p.shape != y.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {y.shape}")
    pc = np.clip(p, eps, 1.0 - eps)
    loss = -np.mean(y * np.log(pc) + (1.0 - y) * np.log1p(-pc))
    grad = (pc - y) / (pc * (1.0 - pc)) / p.size
    return float(loss), grad


class Adam:
    """Adaptive-moment optimizer that updates a model's parameters in place.

    Moments are kept as one flat vector over all parameters, in
    ``GcnModel.params()`` order.
    """

    def __init__(self, lr: float = 1e-2, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m: np.ndarray | None = None
        self.v: np.ndarray | None = None

    def step(self, model: GcnModel, grads: dict[str, np.ndarray]) -> GcnModel:
        params = model.params()
        g = np.concatenate([grads[name].ravel() for name in params])
        if not np.isfinite(g).all():
            bad = [name for name in params if not np.isfinite(grads[name]).all()]
            raise DivergenceError(f"non-finite gradient for {', '.join(bad)}")
        if self.m is None:
            self.m = np.zeros_like(g)
            self.v = np.zeros_like(g)
        if self.m.shape != g.shape:
            raise ValueError("moment shape does not match the parameter count")
        self.t += 1
        self.m *= self.beta1
        self.m += (1.0 - self.beta1) * g
        self.v *= self.beta2
        self.v += (1.0 - self.beta2) * (g * g)
        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t
        delta = (self.lr / bc1) * self.m / (np.sqrt(self.v / bc2) + self.eps)
        start = 0
        for param in params.values():
            stop = start + param.size
            param -= delta[start:stop].reshape(param.shape)
            start = stop
        return model


# -- persistence ----------------------------------------------------------------

def model_to_dict(model: GcnModel) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "input_dim": model.input_dim,
        "hidden": model.hidden,
        "activation": model.hidden_act,
        "W1": model.W1.ravel().tolist(),
        "b1": model.b1.tolist(),
        "W2": model.W2.ravel().tolist(),
        "b2": model.b2.tolist(),
        "seed": model.seed,
        "metadata": model.metadata,
    }


def model_from_dict(doc: dict) -> GcnModel:
    if doc.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported model format_version {doc.get('format_version')!r}")
    d, h = int(doc["input_dim"]), int(doc["hidden"])
    return GcnModel(
        np.array(doc["W1"], dtype=np.float64).reshape(d, h),
        np.array(doc["b1"], dtype=np.float64).reshape(h),
        np.array(doc["W2"], dtype=np.float64).reshape(h, 1),
        np.array(doc["b2"], dtype=np.float64).reshape(1),
        doc["activation"],
        doc.get("seed"),
        dict(doc.get("metadata", {})),
    )


def save_model(model: GcnModel, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(model_to_dict(model), f, indent=1)
        f.write("\n")


def load_model(path) -> GcnModel:
    with open(path, encoding="utf-8") as f:
        return model_from_dict(json.load(f))
