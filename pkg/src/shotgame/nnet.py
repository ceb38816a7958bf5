"""From-scratch MLP outcome classifiers and the reference baselines.

The classifiers embed the shooter role, concatenate the standardized numeric
features, pass them through a small dense stack and emit one sigmoid
probability. Training is mini-batch Adam on inverse-class-weighted
cross-entropy, fully deterministic for a given seed. Baselines: the
historical positive-class frequency and an elastic-net linear model fitted
by coordinate descent.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .features import FeatureRow, RoleVocab, Standardizer, stack_rows

MODEL_SCHEMA_VERSION = 1
PROB_CLAMP = 1e-7

ACTIVATIONS = ("relu", "sigmoid", "tanh")

# Hyperparameter search space for both outcome models.
SEARCH_GRID: dict[str, tuple] = {
    "num_layers": (1, 2, 3),
    "hidden_dim": (32, 64, 128),
    "dropout_rate": (0.0, 0.1, 0.2),
    "activation": ACTIVATIONS,
    "emb_dim": (1, 2, 3),
}


@dataclass(frozen=True)
class TrainConfig:
    num_layers: int = 1
    hidden_dim: int = 64
    dropout_rate: float = 0.0
    activation: str = "relu"
    emb_dim: int = 2
    learning_rate: float = 1e-3
    epochs: int = 300
    batch_size: int = 32
    seed: int = 0

    def grid_key(self) -> tuple:
        return (self.num_layers, self.hidden_dim, self.dropout_rate,
                self.activation, self.emb_dim)


# Best searched hyperparameters for each model, shipped as defaults.
OFF_MODEL_CONFIG = TrainConfig(num_layers=1, hidden_dim=128, dropout_rate=0.0,
                               activation="tanh", emb_dim=2)
BLOCK_MODEL_CONFIG = TrainConfig(num_layers=2, hidden_dim=64, dropout_rate=0.0,
                                 activation="sigmoid", emb_dim=1)


def expand_grid(grid: dict[str, tuple] | None = None,
                base: TrainConfig = TrainConfig()) -> list[TrainConfig]:
    """Every combination of the grid values, applied over a base config."""
    grid = SEARCH_GRID if grid is None else grid
    keys = list(grid)
    configs = []
    for combo in itertools.product(*(grid[k] for k in keys)):
        configs.append(replace(base, **dict(zip(keys, combo))))
    return configs


def _act(name: str, z: np.ndarray) -> np.ndarray:
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "sigmoid":
        return 1.0 / (1.0 + np.exp(-z))
    if name == "tanh":
        return np.tanh(z)
    raise ValueError(f"unknown activation {name!r}")


def _act_grad(name: str, z: np.ndarray, h: np.ndarray) -> np.ndarray:
    if name == "relu":
        return (z > 0.0).astype(float)
    if name == "sigmoid":
        return h * (1.0 - h)
    if name == "tanh":
        return 1.0 - h * h
    raise ValueError(f"unknown activation {name!r}")


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class MlpModel:
    """One trained classifier with everything needed to score new rows."""

    embedding: np.ndarray
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    activation: str
    dropout_rate: float
    vocab: RoleVocab
    scaler: Standardizer
    config: TrainConfig

    def parameters(self) -> list[np.ndarray]:
        return [self.embedding, *self.weights, *self.biases]

    def copy_parameters(self) -> list[np.ndarray]:
        return [p.copy() for p in self.parameters()]

    def set_parameters(self, params: list[np.ndarray]) -> None:
        self.embedding = params[0]
        n_w = len(self.weights)
        self.weights = list(params[1:1 + n_w])
        self.biases = list(params[1 + n_w:])

    def to_json(self, path: str | Path) -> None:
        doc = {
            "version": MODEL_SCHEMA_VERSION,
            "activation": self.activation,
            "dropout_rate": self.dropout_rate,
            "roles": list(self.vocab.names),
            "scaler_mean": self.scaler.mean.tolist(),
            "scaler_std": self.scaler.std.tolist(),
            "embedding": self.embedding.tolist(),
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
            "config": {
                "num_layers": self.config.num_layers,
                "hidden_dim": self.config.hidden_dim,
                "dropout_rate": self.config.dropout_rate,
                "activation": self.config.activation,
                "emb_dim": self.config.emb_dim,
                "learning_rate": self.config.learning_rate,
                "epochs": self.config.epochs,
                "batch_size": self.config.batch_size,
                "seed": self.config.seed,
            },
        }
        Path(path).write_text(json.dumps(doc, sort_keys=True))

    @classmethod
    def from_json(cls, path: str | Path) -> "MlpModel":
        doc = json.loads(Path(path).read_text())
        if doc.get("version") != MODEL_SCHEMA_VERSION:
            raise ValueError(f"model file {path} has unsupported version "
                             f"{doc.get('version')}")
        return cls(
            embedding=np.array(doc["embedding"]),
            weights=[np.array(w) for w in doc["weights"]],
            biases=[np.array(b) for b in doc["biases"]],
            activation=doc["activation"],
            dropout_rate=doc["dropout_rate"],
            vocab=RoleVocab(names=tuple(doc["roles"])),
            scaler=Standardizer(mean=np.array(doc["scaler_mean"]),
                                std=np.array(doc["scaler_std"])),
            config=TrainConfig(**doc["config"]),
        )


def init_model(config: TrainConfig, vocab: RoleVocab, n_numeric: int,
               scaler: Standardizer, rng: np.random.Generator) -> MlpModel:
    """Glorot-uniform dense layers, small-normal embedding."""
    dims = [config.emb_dim + n_numeric] + [config.hidden_dim] * config.num_layers + [1]
    weights, biases = [], []
    for d_in, d_out in zip(dims[:-1], dims[1:]):
        limit = math.sqrt(6.0 / (d_in + d_out))
        weights.append(rng.uniform(-limit, limit, size=(d_in, d_out)))
        biases.append(np.zeros(d_out))
    embedding = 0.1 * rng.standard_normal((len(vocab), config.emb_dim))
    return MlpModel(embedding=embedding, weights=weights, biases=biases,
                    activation=config.activation, dropout_rate=config.dropout_rate,
                    vocab=vocab, scaler=scaler, config=config)


def _forward(model: MlpModel, role_ids: np.ndarray, numeric_std: np.ndarray,
             train_mode: bool, rng: np.random.Generator | None):
    """Batch forward pass; returns probabilities and the backprop cache."""
    emb = model.embedding[role_ids]
    h = np.concatenate([emb, numeric_std], axis=1)
    cache = {"h": [h], "z": [], "masks": []}
    n_hidden = len(model.weights) - 1
    for i in range(n_hidden):
        z = h @ model.weights[i] + model.biases[i]
        h = _act(model.activation, z)
        if train_mode and model.dropout_rate > 0.0:
            if rng is None:
                raise ValueError("dropout in train mode needs an rng")
            mask = (rng.random(h.shape) >= model.dropout_rate) / (1.0 - model.dropout_rate)
            h = h * mask
        else:
            mask = None
        cache["z"].append(z)
        cache["masks"].append(mask)
        cache["h"].append(h)
    logits = (h @ model.weights[-1] + model.biases[-1]).ravel()
    probs = _sigmoid(logits)
    cache["probs"] = probs
    return probs, cache


def mlp_forward(model: MlpModel, row: FeatureRow, train_mode: bool = False,
                rng: np.random.Generator | None = None) -> float:
    """Probability for a single feature row."""
    for p in model.parameters():
        if np.any(np.isnan(p)):
            raise ValueError("model parameters contain NaN")
    numeric = model.scaler.transform(row.numeric[None, :])
    probs, _ = _forward(model, np.array([row.role_id]), numeric, train_mode, rng)
    return float(probs[0])


def predict(model: MlpModel, rows: list[FeatureRow]) -> np.ndarray:
    """Eval-mode probabilities for a list of rows."""
    role_ids, numeric, _ = stack_rows(rows)
    probs, _ = _forward(model, role_ids, model.scaler.transform(numeric),
                        train_mode=False, rng=None)
    return probs


def class_weights_inverse(labels: np.ndarray) -> tuple[float, float]:
    """w_c = N / (2 * N_c) for c in {0, 1}."""
    n = labels.size
    n1 = float(labels.sum())
    n0 = n - n1
    if n0 == 0 or n1 == 0:
        raise ValueError("both classes must be present to weight them")
    return n / (2.0 * n0), n / (2.0 * n1)


def weighted_cel(probs: np.ndarray, labels: np.ndarray,
                 class_weights: tuple[float, float] = (1.0, 1.0)) -> float:
    """Inverse-class-weighted binary cross-entropy with clamped probabilities."""
    p = np.clip(probs, PROB_CLAMP, 1.0 - PROB_CLAMP)
    y = np.asarray(labels, dtype=float)
    w = np.where(y == 1.0, class_weights[1], class_weights[0])
    return float(-np.mean(w * (y * np.log(p) + (1.0 - y) * np.log(1.0 - p))))


def _backward(model: MlpModel, role_ids: np.ndarray, cache: dict,
              labels: np.ndarray, weights_per_row: np.ndarray):
    """Gradients of the weighted CEL w.r.t. every parameter."""
    b = labels.size
    probs = cache["probs"]
    dz = (weights_per_row * (probs - labels) / b)[:, None]
    h_last = cache["h"][-1]
    grad_w = [None] * len(model.weights)
    grad_b = [None] * len(model.biases)
    grad_w[-1] = h_last.T @ dz
    grad_b[-1] = dz.sum(axis=0)
    dh = dz @ model.weights[-1].T
    for i in range(len(model.weights) - 2, -1, -1):
        mask = cache["masks"][i]
        if mask is not None:
            dh = dh * mask
        # h stored post-dropout; activation gradient needs pre-dropout values.
        h_act = _act(model.activation, cache["z"][i])
        dzi = dh * _act_grad(model.activation, cache["z"][i], h_act)
        grad_w[i] = cache["h"][i].T @ dzi
        grad_b[i] = dzi.sum(axis=0)
        dh = dzi @ model.weights[i].T
    grad_emb = np.zeros_like(model.embedding)
    np.add.at(grad_emb, role_ids, dh[:, :model.embedding.shape[1]])
    return [grad_emb, *grad_w, *grad_b]


class _Adam:
    def __init__(self, params: list[np.ndarray], lr: float,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        self.t += 1
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            mhat = m / (1.0 - self.beta1 ** self.t)
            vhat = v / (1.0 - self.beta2 ** self.t)
            p -= self.lr * mhat / (np.sqrt(vhat) + self.eps)


class TrainingDiverged(Exception):
    pass


def train_mlp(rows: list[FeatureRow], config: TrainConfig, vocab: RoleVocab,
              valid_rows: list[FeatureRow] | None = None) -> MlpModel:
    """Train one classifier; deterministic for a fixed (rows, config, vocab).

    The standardizer is fitted on ``rows`` only, so supplying validation rows
    never leaks their statistics. With validation rows the returned model is
    the checkpoint with the lowest validation loss, otherwise the final epoch.
    """
    role_ids, numeric, labels = stack_rows(rows)
    if labels.min() == labels.max():
        raise ValueError("training rows must contain both classes")
    scaler = Standardizer.fit(numeric)
    numeric_std = scaler.transform(numeric)
    cw = class_weights_inverse(labels)
    row_w = np.where(labels == 1.0, cw[1], cw[0])

    rng = np.random.default_rng(config.seed)
    model = init_model(config, vocab, numeric.shape[1], scaler, rng)
    adam = _Adam(model.parameters(), lr=config.learning_rate)

    if valid_rows is not None:
        v_roles, v_numeric, v_labels = stack_rows(valid_rows)
        v_numeric_std = scaler.transform(v_numeric)
        best_loss = math.inf
        best_params = model.copy_parameters()

    n = len(rows)
    for epoch in range(config.epochs):
        perm = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            idx = perm[start:start + config.batch_size]
            probs, cache = _forward(model, role_ids[idx], numeric_std[idx],
                                    train_mode=True, rng=rng)
            grads = _backward(model, role_ids[idx], cache, labels[idx], row_w[idx])
            params = model.parameters()
            adam.step(params, grads)
            model.set_parameters(params)
        train_probs, _ = _forward(model, role_ids, numeric_std, False, None)
        train_loss = weighted_cel(train_probs, labels, cw)
        if math.isnan(train_loss):
            raise TrainingDiverged(f"loss became NaN at epoch {epoch}")
        if valid_rows is not None:
            v_probs, _ = _forward(model, v_roles, v_numeric_std, False, None)
            v_loss = weighted_cel(v_probs, v_labels, cw)
            if v_loss < best_loss:
                best_loss = v_loss
                best_params = model.copy_parameters()
    if valid_rows is not None:
        model.set_parameters(best_params)
    return model


@dataclass
class GridResult:
    config: TrainConfig
    mean_cel: float
    std_cel: float
    fold_cels: list[float] = field(default_factory=list)


def evaluate_config_cv(rows: list[FeatureRow], folds, config: TrainConfig,
                       vocab: RoleVocab) -> GridResult:
    """Per-fold validation weighted CEL for one configuration."""
    fold_cels = []
    for k, (train_idx, valid_idx) in enumerate(folds):
        fold_train = [rows[i] for i in train_idx]
        fold_valid = [rows[i] for i in valid_idx]
        cfg = replace(config, seed=config.seed * 1000 + k)
        model = train_mlp(fold_train, cfg, vocab, valid_rows=fold_valid)
        cw = class_weights_inverse(np.array([r.label for r in fold_train], float))
        probs = predict(model, fold_valid)
        fold_cels.append(weighted_cel(
            probs, np.array([r.label for r in fold_valid], float), cw))
    return GridResult(config=config, mean_cel=float(np.mean(fold_cels)),
                      std_cel=float(np.std(fold_cels)), fold_cels=fold_cels)


def grid_search_cv(rows: list[FeatureRow], folds, configs: list[TrainConfig],
                   vocab: RoleVocab) -> tuple[TrainConfig, list[GridResult]]:
    """Exhaustive CV over the given configs; best = minimal mean weighted CEL."""
    results = [evaluate_config_cv(rows, folds, cfg, vocab) for cfg in configs]
    best = min(results, key=lambda r: r.mean_cel)
    return best.config, results


@dataclass(frozen=True)
class HistoricalBaseline:
    """Predicts the training positive-class frequency for every input."""

    rate: float

    @classmethod
    def fit(cls, train_labels: np.ndarray) -> "HistoricalBaseline":
        labels = np.asarray(train_labels, dtype=float)
        if labels.size == 0:
            raise ValueError("cannot fit on empty labels")
        rate = float(np.clip(labels.mean(), PROB_CLAMP, 1.0 - PROB_CLAMP))
        return cls(rate=rate)

    def predict(self, n: int) -> np.ndarray:
        return np.full(n, self.rate)


def soft_threshold(z: float, threshold: float) -> float:
    return math.copysign(max(abs(z) - threshold, 0.0), z)


def elastic_net_cd(X: np.ndarray, y: np.ndarray, l1_ratio: float, strength: float,
                   tol: float = 1e-8, max_sweeps: int = 2000) -> tuple[np.ndarray, float]:
    """Coordinate descent for (1/2n)||y - Xw - b||^2 + strength * penalty.

    The penalty is l1_ratio * ||w||_1 + (1 - l1_ratio)/2 * ||w||_2^2; the
    intercept b is unpenalized. Returns (w, b) or raises on non-convergence.
    """
    n, d = X.shape
    w = np.zeros(d)
    b = float(y.mean())
    col_sq = (X * X).sum(axis=0) / n
    resid = y - b - X @ w
    lam1 = strength * l1_ratio
    lam2 = strength * (1.0 - l1_ratio)
    for _ in range(max_sweeps):
        max_delta = 0.0
        for j in range(d):
            if col_sq[j] == 0.0:
                continue
            z = (X[:, j] @ resid) / n + col_sq[j] * w[j]
            w_new = soft_threshold(z, lam1) / (col_sq[j] + lam2)
            if w_new != w[j]:
                resid += X[:, j] * (w[j] - w_new)
                max_delta = max(max_delta, abs(w_new - w[j]))
                w[j] = w_new
        b_new = b + float(resid.mean())
        resid -= b_new - b
        max_delta = max(max_delta, abs(b_new - b))
        b = b_new
        if max_delta < tol:
            return w, b
    raise RuntimeError(f"coordinate descent did not converge in {max_sweeps} sweeps")


@dataclass
class ElasticNetModel:
    """Linear baseline over one-hot roles plus standardized numerics."""

    w: np.ndarray
    b: float
    scaler: Standardizer
    vocab: RoleVocab

    def _design(self, rows: list[FeatureRow]) -> np.ndarray:
        role_ids, numeric, _ = stack_rows(rows)
        onehot = np.zeros((len(rows), len(self.vocab)))
        onehot[np.arange(len(rows)), role_ids] = 1.0
        return np.concatenate([onehot, self.scaler.transform(numeric)], axis=1)

    def predict(self, rows: list[FeatureRow]) -> np.ndarray:
        raw = self._design(rows) @ self.w + self.b
        return np.clip(raw, PROB_CLAMP, 1.0 - PROB_CLAMP)


def baseline_elastic_net(rows: list[FeatureRow], l1_ratio: float, strength: float,
                         vocab: RoleVocab, tol: float = 1e-8,
                         max_sweeps: int = 2000) -> ElasticNetModel:
    role_ids, numeric, labels = stack_rows(rows)
    scaler = Standardizer.fit(numeric)
    model = ElasticNetModel(w=np.zeros(0), b=0.0, scaler=scaler, vocab=vocab)
    X = model._design(rows)
    w, b = elastic_net_cd(X, labels, l1_ratio, strength, tol=tol,
                          max_sweeps=max_sweeps)
    model.w, model.b = w, b
    return model
