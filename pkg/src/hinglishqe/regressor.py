"""From-scratch MLP regressor with Adam, adaptive learning rate, and grid search.

Hidden layers use ReLU, the output is a single linear unit, and the loss is
plain MSE on raw targets. Everything is deterministic given (data, config,
seed): initialization, batch shuffling, and the train/validation split all
draw from generators derived from the config seed.
"""

from __future__ import annotations

import base64
import hashlib
import json
import math
import os
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .features import ScalerParams, N_METRIC_FEATURES

MODEL_FORMAT_VERSION = 1


class NumericError(RuntimeError):
    """Raised when training produces a non-finite loss or parameter."""


class ModelFileError(ValueError):
    """Raised on corrupt, truncated, or incompatible model files."""


@dataclass(frozen=True)
class MlpConfig:
    input_dim: int
    hidden_dims: tuple[int, ...] = (1000, 100, 10)
    learning_rate: float = 0.001
    lr_grid: tuple[float, ...] = (0.01, 0.001, 0.0001)
    batch_size: Optional[int] = None   # None -> min(200, n_samples)
    max_epochs: int = 200
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    lr_patience: int = 2
    lr_decay_factor: float = 5.0
    improvement_tol: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.input_dim < 1:
            raise ValueError("input_dim must be positive")
        if not self.hidden_dims or any(d < 1 for d in self.hidden_dims):
            raise ValueError("hidden_dims must be non-empty positive integers")
        if self.learning_rate <= 0 or any(lr <= 0 for lr in self.lr_grid):
            raise ValueError("learning rates must be positive")

    def effective_batch_size(self, n_samples: int) -> int:
        if self.batch_size is not None:
            return min(self.batch_size, n_samples)
        return min(200, n_samples)


@dataclass
class MlpModel:
    weights: list        # weights[i]: (fan_in, fan_out)
    biases: list         # biases[i]: (fan_out,)
    config: MlpConfig
    scaler: Optional[ScalerParams] = None
    feature_dim: Optional[int] = None
    task: Optional[str] = None  # {quality, disagreement}, set by the CLI

    def layer_dims(self) -> list[tuple[int, int]]:
        return [(w.shape[0], w.shape[1]) for w in self.weights]


@dataclass
class TrainReport:
    losses: list          # per-epoch training loss (full-data MSE at epoch end)
    final_learning_rate: float
    epochs_run: int
    seed: int


def init_model(config: MlpConfig) -> MlpModel:
    """Glorot-uniform weights, zero biases, seeded by config.seed."""
    rng = np.random.default_rng(config.seed)
    dims = [config.input_dim, *config.hidden_dims, 1]
    weights, biases = [], []
    for fan_in, fan_out in zip(dims, dims[1:]):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(weights=weights, biases=biases, config=config)


def _forward_batch(model: MlpModel, x: np.ndarray) -> tuple[np.ndarray, list]:
    """Returns (predictions, per-layer activations incl. input)."""
    activations = [x]
    h = x
    n_layers = len(model.weights)
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = h @ w + b
        h = np.maximum(0.0, z) if i < n_layers - 1 else z
        activations.append(h)
    return h[:, 0], activations


def forward(model: MlpModel, x) -> float:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.config.input_dim,):
        raise ValueError(
            f"input has shape {x.shape}, expected ({model.config.input_dim},)"
        )
    preds, _ = _forward_batch(model, x[None, :])
    return float(preds[0])


def predict_batch(model: MlpModel, xs: np.ndarray) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 2 or xs.shape[1] != model.config.input_dim:
        raise ValueError(
            f"batch has shape {xs.shape}, expected (n, {model.config.input_dim})"
        )
    preds, _ = _forward_batch(model, xs)
    return preds


def loss_mse(predictions, targets) -> float:
    predictions = np.asarray(predictions, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if predictions.shape != targets.shape:
        raise ValueError("predictions and targets must have equal length")
    if predictions.size == 0:
        raise ValueError("loss_mse requires at least one pair")
    return float(np.mean((predictions - targets) ** 2))


def gradients(model: MlpModel, xs: np.ndarray, targets: np.ndarray) -> tuple[list, list]:
    """Exact gradients of batch-mean MSE w.r.t. weights and biases.

    ReLU subgradient at 0 is taken as 0.
    """
    xs = np.asarray(xs, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if xs.ndim != 2 or xs.shape[0] == 0:
        raise ValueError("gradients requires a non-empty 2-D batch")
    preds, activations = _forward_batch(model, xs)
    n = xs.shape[0]
    # dL/dz for the output layer; loss = mean((pred - t)^2)
    delta = (2.0 / n) * (preds - targets)[:, None]
    grad_w = [None] * len(model.weights)
    grad_b = [None] * len(model.biases)
    for i in range(len(model.weights) - 1, -1, -1):
        grad_w[i] = activations[i].T @ delta
        grad_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ model.weights[i].T) * (activations[i] > 0)
    return grad_w, grad_b


@dataclass
class AdamState:
    m: list
    v: list
    t: int = 0

    @classmethod
    def zeros_like(cls, params: list) -> "AdamState":
        return cls(m=[np.zeros_like(p) for p in params],
                   v=[np.zeros_like(p) for p in params])


def adam_step(params: list, state: AdamState, grads: list, learning_rate: float,
              beta1: float = 0.9, beta2: float = 0.999, epsilon: float = 1e-8
              ) -> tuple[list, AdamState]:
    """One Adam update with bias correction; returns new params and state."""
    t = state.t + 1
    new_params, new_m, new_v = [], [], []
    for p, m, v, g in zip(params, state.m, state.v, grads):
        m = beta1 * m + (1 - beta1) * g
        v = beta2 * v + (1 - beta2) * g ** 2
        m_hat = m / (1 - beta1 ** t)
        v_hat = v / (1 - beta2 ** t)
        new_params.append(p - learning_rate * m_hat / (np.sqrt(v_hat) + epsilon))
        new_m.append(m)
        new_v.append(v)
    return new_params, AdamState(m=new_m, v=new_v, t=t)


def train(model: MlpModel, xs: np.ndarray, targets: np.ndarray,
          config: Optional[MlpConfig] = None) -> tuple[MlpModel, TrainReport]:
    """Mini-batch Adam training with the adaptive learning-rate schedule.

    The learning rate is divided by lr_decay_factor after lr_patience
    consecutive epochs without an improvement of at least improvement_tol
    in the epoch training loss.
    """
    config = config or model.config
    xs = np.asarray(xs, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if xs.ndim != 2 or xs.shape[0] == 0 or xs.shape[0] != targets.shape[0]:
        raise ValueError("train requires a non-empty aligned dataset")
    if xs.shape[1] != config.input_dim:
        raise ValueError(f"data dim {xs.shape[1]} != input_dim {config.input_dim}")

    n = xs.shape[0]
    batch_size = config.effective_batch_size(n)
    rng = np.random.default_rng([config.seed, 1])
    params = [w.copy() for w in model.weights] + [b.copy() for b in model.biases]
    n_w = len(model.weights)
    state = AdamState.zeros_like(params)
    lr = config.learning_rate

    losses = []
    best_loss = math.inf
    stale = 0
    # overflow is surfaced as NumericError via the loss check, not as warnings
    errstate = np.errstate(over="ignore", invalid="ignore")
    with errstate:
        return _train_loop(config, xs, targets, model, params, state, lr,
                           batch_size, rng, losses, best_loss, stale, n, n_w)


def _train_loop(config, xs, targets, model, params, state, lr, batch_size, rng,
                losses, best_loss, stale, n, n_w):
    for _ in range(config.max_epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            idx = order[start:start + batch_size]
            batch_model = MlpModel(weights=params[:n_w], biases=params[n_w:],
                                   config=config)
            gw, gb = gradients(batch_model, xs[idx], targets[idx])
            params, state = adam_step(params, state, gw + gb, lr,
                                      config.adam_beta1, config.adam_beta2,
                                      config.adam_epsilon)
        epoch_model = MlpModel(weights=params[:n_w], biases=params[n_w:], config=config)
        preds = predict_batch(epoch_model, xs)
        loss = loss_mse(preds, targets)
        if not math.isfinite(loss):
            raise NumericError(
                f"non-finite training loss at epoch {len(losses) + 1} (lr={lr})"
            )
        losses.append(loss)
        if loss < best_loss - config.improvement_tol:
            best_loss = loss
            stale = 0
        else:
            stale += 1
            if stale >= config.lr_patience:
                lr = lr / config.lr_decay_factor
                stale = 0

    trained = MlpModel(weights=params[:n_w], biases=params[n_w:], config=config,
                       scaler=model.scaler, feature_dim=model.feature_dim,
                       task=model.task)
    report = TrainReport(losses=losses, final_learning_rate=lr,
                         epochs_run=len(losses), seed=config.seed)
    return trained, report


HIDDEN_DIM_CHOICES = (10, 100, 1000)


def grid_search(xs: np.ndarray, targets: np.ndarray, config: MlpConfig,
                search_hidden_dims: bool = False) -> tuple[MlpConfig, list]:
    """Train one model per grid point; select minimum validation MSE.

    The split is a deterministic 80/20 seeded shuffle. A diverging point is
    scored +inf. Ties break toward the smaller learning rate, then the
    smaller hidden layout.
    """
    if not config.lr_grid:
        raise ValueError("learning-rate grid must be non-empty")
    xs = np.asarray(xs, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    n = xs.shape[0]
    if n < 2:
        raise ValueError("grid search needs at least 2 samples to split")
    rng = np.random.default_rng([config.seed, 2])
    order = rng.permutation(n)
    n_train = max(1, int(round(n * 0.8)))
    if n_train == n:
        n_train = n - 1
    train_idx, val_idx = order[:n_train], order[n_train:]

    if search_hidden_dims:
        hidden_grid = [(a, b, c) for a in HIDDEN_DIM_CHOICES
                       for b in HIDDEN_DIM_CHOICES for c in HIDDEN_DIM_CHOICES]
    else:
        hidden_grid = [tuple(config.hidden_dims)]

    scores = []
    for hidden in hidden_grid:
        for lr in config.lr_grid:
            point = replace(config, learning_rate=lr, hidden_dims=hidden)
            try:
                trained, _ = train(init_model(point), xs[train_idx], targets[train_idx])
                val_mse = loss_mse(predict_batch(trained, xs[val_idx]), targets[val_idx])
                if not math.isfinite(val_mse):
                    val_mse = math.inf
            except NumericError:
                val_mse = math.inf
            scores.append({"learning_rate": lr, "hidden_dims": list(hidden),
                           "val_mse": val_mse})

    best = min(scores, key=lambda s: (s["val_mse"], s["learning_rate"],
                                      tuple(s["hidden_dims"])))
    best_config = replace(config, learning_rate=best["learning_rate"],
                          hidden_dims=tuple(best["hidden_dims"]))
    return best_config, scores


def _encode_array(a: np.ndarray) -> dict:
    data = np.ascontiguousarray(a, dtype="<f8")
    return {"shape": list(a.shape),
            "data": base64.b64encode(data.tobytes()).decode("ascii")}


def _decode_array(obj: dict) -> np.ndarray:
    raw = base64.b64decode(obj["data"])
    a = np.frombuffer(raw, dtype="<f8").astype(np.float64)
    return a.reshape(obj["shape"])


def _model_payload(model: MlpModel) -> dict:
    c = model.config
    return {
        "config": {
            "input_dim": c.input_dim,
            "hidden_dims": list(c.hidden_dims),
            "learning_rate": c.learning_rate,
            "lr_grid": list(c.lr_grid),
            "batch_size": c.batch_size,
            "max_epochs": c.max_epochs,
            "adam_beta1": c.adam_beta1,
            "adam_beta2": c.adam_beta2,
            "adam_epsilon": c.adam_epsilon,
            "lr_patience": c.lr_patience,
            "lr_decay_factor": c.lr_decay_factor,
            "improvement_tol": c.improvement_tol,
            "seed": c.seed,
        },
        "scaler": None if model.scaler is None else {
            "mean": _encode_array(model.scaler.mean),
            "stddev": _encode_array(model.scaler.stddev),
        },
        "feature_dim": model.feature_dim,
        "task": model.task,
        "weights": [_encode_array(w) for w in model.weights],
        "biases": [_encode_array(b) for b in model.biases],
    }


def save_model(model: MlpModel, path: str) -> None:
    """Versioned, checksummed JSON container; parameters as little-endian f64."""
    payload = _model_payload(model)
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "checksum": hashlib.sha256(blob.encode("utf-8")).hexdigest(),
        "payload": payload,
    }
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")
    os.replace(tmp, path)


def load_model(path: str) -> MlpModel:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ModelFileError(f"{path}: corrupt model file ({e})") from e
    if not isinstance(doc, dict) or doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise ModelFileError(
            f"{path}: unsupported model format version {doc.get('format_version')!r}"
            if isinstance(doc, dict) else f"{path}: corrupt model file"
        )
    payload = doc.get("payload")
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    if hashlib.sha256(blob.encode("utf-8")).hexdigest() != doc.get("checksum"):
        raise ModelFileError(f"{path}: checksum mismatch, file corrupted or edited")
    try:
        cfg = payload["config"]
        config = MlpConfig(
            input_dim=cfg["input_dim"],
            hidden_dims=tuple(cfg["hidden_dims"]),
            learning_rate=cfg["learning_rate"],
            lr_grid=tuple(cfg["lr_grid"]),
            batch_size=cfg["batch_size"],
            max_epochs=cfg["max_epochs"],
            adam_beta1=cfg["adam_beta1"],
            adam_beta2=cfg["adam_beta2"],
            adam_epsilon=cfg["adam_epsilon"],
            lr_patience=cfg["lr_patience"],
            lr_decay_factor=cfg["lr_decay_factor"],
            improvement_tol=cfg["improvement_tol"],
            seed=cfg["seed"],
        )
        scaler = None
        if payload["scaler"] is not None:
            scaler = ScalerParams(
                mean=_decode_array(payload["scaler"]["mean"]),
                stddev=_decode_array(payload["scaler"]["stddev"]),
            )
        weights = [_decode_array(w) for w in payload["weights"]]
        biases = [_decode_array(b) for b in payload["biases"]]
    except (KeyError, TypeError, ValueError) as e:
        raise ModelFileError(f"{path}: invalid model payload ({e})") from e
    dims = [config.input_dim, *config.hidden_dims, 1]
    expected = list(zip(dims, dims[1:]))
    if [w.shape for w in weights] != [tuple(s) for s in expected]:
        raise ModelFileError(f"{path}: weight shapes inconsistent with config dims")
    if [b.shape for b in biases] != [(d,) for _, d in expected]:
        raise ModelFileError(f"{path}: bias shapes inconsistent with config dims")
    for arr in weights + biases:
        if not np.all(np.isfinite(arr)):
            raise ModelFileError(f"{path}: non-finite parameter values")
    return MlpModel(weights=weights, biases=biases, config=config, scaler=scaler,
                    feature_dim=payload["feature_dim"], task=payload["task"])
