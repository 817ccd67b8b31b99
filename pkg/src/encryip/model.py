"""Small numpy classifier with a block-softmax head.

The output layer is split into ``n_blocks`` blocks of ``block`` logits each,
and softmax is applied per block. An encrypted-label model uses three blocks
of width ``q``; the plaintext baseline is the same network with a single
block of width ``z``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .codec import phi_batch
from .data import EncryptedDataset
from .errors import BadLength, DimensionMismatch


@dataclass
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 50
    batch_size: int = 32
    seed: int = 0
    hidden: int = 0
    weight_init_scale: float = 0.1

    def __post_init__(self):
        if self.learning_rate <= 0 or self.batch_size < 1 or self.weight_init_scale <= 0:
            raise ValueError("learning_rate, batch_size and weight_init_scale must be positive")
        if self.epochs < 0 or self.hidden < 0:
            raise ValueError("epochs and hidden must be non-negative")


@dataclass
class Model:
    d: int
    n_blocks: int
    block: int
    hidden: int
    weights: Dict[str, np.ndarray]
    history: List[float] = field(default_factory=list, compare=False)

    @property
    def out_dim(self) -> int:
        return self.n_blocks * self.block

    @property
    def arch(self) -> str:
        return "mlp" if self.hidden else "linear"

    def copy(self) -> "Model":
        return Model(self.d, self.n_blocks, self.block, self.hidden,
                     {k: v.copy() for k, v in self.weights.items()}, list(self.history))

    def to_record(self) -> dict:
        return {
            "arch": self.arch,
            "d": self.d,
            "n_blocks": self.n_blocks,
            "block": self.block,
            "hidden": self.hidden,
            "weights": {k: {"shape": list(v.shape), "data": [repr(float(x)) for x in v.ravel()]}
                        for k, v in self.weights.items()},
        }

    @classmethod
    def from_record(cls, rec) -> "Model":
        weights = {k: np.array([float(x) for x in w["data"]]).reshape(w["shape"])
                   for k, w in rec["weights"].items()}
        return cls(int(rec["d"]), int(rec["n_blocks"]), int(rec["block"]), int(rec["hidden"]), weights)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_record(), fh)

    @classmethod
    def load(cls, path) -> "Model":
        with open(path) as fh:
            return cls.from_record(json.load(fh))


def init_model(d: int, n_blocks: int, block: int, hidden: int = 0, scale: float = 0.1,
               rng: Optional[np.random.Generator] = None) -> Model:
    """Uniform weights in ``[-scale, scale]``, zero biases."""
    rng = rng if rng is not None else np.random.default_rng(0)
    out = n_blocks * block
    if hidden:
        weights = {
            "W1": rng.uniform(-scale, scale, (d, hidden)),
            "b1": np.zeros(hidden),
            "W2": rng.uniform(-scale, scale, (hidden, out)),
            "b2": np.zeros(out),
        }
    else:
        weights = {"W": rng.uniform(-scale, scale, (d, out)), "b": np.zeros(out)}
    return Model(d, n_blocks, block, hidden, weights)


def block_softmax(logits: np.ndarray, n_blocks: int, block: int) -> np.ndarray:
    z = logits.reshape(*logits.shape[:-1], n_blocks, block)
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return (e / e.sum(axis=-1, keepdims=True)).reshape(logits.shape)


def _logits(model: Model, X: np.ndarray) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    w = model.weights
    if model.hidden:
        H = np.maximum(X @ w["W1"] + w["b1"], 0.0)
        return H @ w["W2"] + w["b2"], H
    return X @ w["W"] + w["b"], None


def forward(model: Model, X: np.ndarray) -> np.ndarray:
    """Block-softmax probabilities for one input (1-d) or a batch (2-d)."""
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != model.d:
        raise DimensionMismatch(f"model expects {model.d} features, got {X.shape[1]}")
    P = block_softmax(_logits(model, X)[0], model.n_blocks, model.block)
    return P[0] if single else P


def loss(pred: np.ndarray, target: np.ndarray, n_blocks: int = 3) -> float:
    """Mean over blocks (and rows) of cross-entropy against the hot entry."""
    pred = np.atleast_2d(pred)
    target = np.atleast_2d(target)
    if pred.shape != target.shape or pred.shape[-1] % n_blocks:
        raise BadLength(f"pred {pred.shape} and target {target.shape} incompatible with {n_blocks} blocks")
    hot = target > 0
    # only hot entries contribute; log is never taken of a cold entry
    with np.errstate(divide="ignore"):
        ce = -np.where(hot, target * np.log(np.where(hot, pred, 1.0)), 0.0).sum(axis=-1)
    return float(ce.mean() / n_blocks)


def gradient(model: Model, X: np.ndarray, T: np.ndarray) -> Dict[str, np.ndarray]:
    """Gradient of the mean block cross-entropy over the batch ``(X, T)``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    T = np.atleast_2d(T)
    n = X.shape[0]
    logits, H = _logits(model, X)
    P = block_softmax(logits, model.n_blocks, model.block)
    dZ = (P - T) / (model.n_blocks * n)
    w = model.weights
    if not model.hidden:
        return {"W": X.T @ dZ, "b": dZ.sum(axis=0)}
    dH = (dZ @ w["W2"].T) * (H > 0)
    return {"W1": X.T @ dH, "b1": dH.sum(axis=0), "W2": H.T @ dZ, "b2": dZ.sum(axis=0)}


def batch_loss(model: Model, X: np.ndarray, T: np.ndarray) -> float:
    return loss(forward(model, np.atleast_2d(X)), T, model.n_blocks)


def fit(model: Model, X: np.ndarray, T: np.ndarray, cfg: TrainConfig) -> Model:
    """Mini-batch SGD from ``model``'s current weights; returns a new model.

    Shuffling uses ``cfg.seed`` only, so runs are bit-reproducible.
    """
    model = model.copy()
    X = np.asarray(X, dtype=float)
    if X.shape[1] != model.d:
        raise DimensionMismatch(f"model expects {model.d} features, got {X.shape[1]}")
    if T.shape != (len(X), model.out_dim):
        raise BadLength(f"targets have shape {T.shape}, expected {(len(X), model.out_dim)}")
    rng = np.random.default_rng([cfg.seed, 1])
    n = len(X)
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, cfg.batch_size):
            rows = order[start:start + cfg.batch_size]
            total += batch_loss(model, X[rows], T[rows]) * len(rows)
            for k, g in gradient(model, X[rows], T[rows]).items():
                model.weights[k] -= cfg.learning_rate * g
        model.history.append(total / n)
    return model


def train(ed: EncryptedDataset, cfg: TrainConfig, init: Optional[Model] = None) -> Model:
    """Train (or keep training ``init``) on the confused labels of ``ed``."""
    if len(ed) == 0:
        raise ValueError("empty dataset")
    q = ed.params.q
    if init is None:
        init = init_model(ed.d, 3, q, cfg.hidden, cfg.weight_init_scale, np.random.default_rng([cfg.seed, 0]))
    elif init.n_blocks != 3 or init.block != q:
        raise DimensionMismatch(f"model head {init.n_blocks}x{init.block} does not match 3x{q}")
    return fit(init, ed.X, phi_batch(ed.params, ed.C), cfg)


def train_plain(X: np.ndarray, y: np.ndarray, z: int, cfg: TrainConfig) -> Model:
    """Baseline: same network and schedule, one softmax block over the ``z`` plain labels."""
    X = np.asarray(X, dtype=float)
    model = init_model(X.shape[1], 1, z, cfg.hidden, cfg.weight_init_scale, np.random.default_rng([cfg.seed, 0]))
    return fit(model, X, np.eye(z)[np.asarray(y)], cfg)
