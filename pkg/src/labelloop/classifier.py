"""Multi-label probabilistic classifier: frozen feature stage + trainable head.

The head is a per-label logistic model (optionally with one hidden layer),
trained by mini-batch SGD with momentum on sigmoid cross-entropy. The frozen
stage stands in for a pre-trained backbone and is never updated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .core import LabelCombination, LabelSchema, Sample, StateMatrix

_CLAMP = 1e-12


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 2e-3
    momentum: float = 0.9
    batch_size: int = 32
    epochs: int = 5
    weight_decay: float = 0.0  # L2 penalty on weight matrices (not biases)
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError("momentum must lie in [0, 1)")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.weight_decay < 0:
            raise ValueError("weight_decay must be >= 0")


@dataclass(frozen=True)
class ClassifierModel:
    """Immutable parameter bundle; training returns a new model."""

    schema: LabelSchema
    feature_dim: int
    frozen_projection: np.ndarray | None  # fixed transform, never trained
    head: dict[str, np.ndarray]  # W1/b1 (optional hidden) and W2/b2

    def __post_init__(self):
        if self.frozen_projection is not None:
            proj = np.asarray(self.frozen_projection, dtype=np.float64)
            proj.setflags(write=False)
            object.__setattr__(self, "frozen_projection", proj)
        head = {}
        for name, arr in self.head.items():
            arr = np.array(arr, dtype=np.float64)  # private copy
            arr.setflags(write=False)
            head[name] = arr
        object.__setattr__(self, "head", head)

    @property
    def hidden_dim(self) -> int | None:
        return self.head["W1"].shape[0] if "W1" in self.head else None

    def transform(self, features: np.ndarray) -> np.ndarray:
        if self.frozen_projection is None:
            return features
        return features @ self.frozen_projection.T

    def forward(self, features: np.ndarray) -> tuple[np.ndarray, dict[str, np.ndarray]]:
        """Logits for a (n, f) feature batch plus cached activations."""
        return _forward(self.head, self.transform(features))


def init_model(
    schema: LabelSchema,
    feature_dim: int,
    config: TrainConfig,
    hidden_dim: int | None = None,
    projection_dim: int | None = None,
) -> ClassifierModel:
    """Seeded model with uniform [-1/sqrt(f), 1/sqrt(f)] head initialization."""
    if feature_dim < 1:
        raise ValueError("feature_dim must be >= 1")
    rng = np.random.default_rng(config.seed)
    projection = None
    inner_dim = feature_dim
    if projection_dim is not None:
        if projection_dim < 1:
            raise ValueError("projection_dim must be >= 1")
        projection = rng.standard_normal((projection_dim, feature_dim)) / np.sqrt(
            feature_dim
        )
        inner_dim = projection_dim
    bound = 1.0 / np.sqrt(inner_dim)
    head: dict[str, np.ndarray] = {}
    if hidden_dim is not None:
        if hidden_dim < 1:
            raise ValueError("hidden_dim must be >= 1")
        head["W1"] = rng.uniform(-bound, bound, size=(hidden_dim, inner_dim))
        head["b1"] = np.zeros(hidden_dim)
        hb = 1.0 / np.sqrt(hidden_dim)
        head["W2"] = rng.uniform(-hb, hb, size=(schema.m, hidden_dim))
    else:
        head["W2"] = rng.uniform(-bound, bound, size=(schema.m, inner_dim))
    head["b2"] = np.zeros(schema.m)
    return ClassifierModel(
        schema=schema, feature_dim=feature_dim, frozen_projection=projection, head=head
    )


def _forward(
    head: dict[str, np.ndarray], h: np.ndarray
) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    cache = {"h": h}
    if "W1" in head:
        a = np.tanh(h @ head["W1"].T + head["b1"])
        cache["a"] = a
        logits = a @ head["W2"].T + head["b2"]
    else:
        logits = h @ head["W2"].T + head["b2"]
    return logits, cache


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def sigmoid_ce_loss(logits: np.ndarray, targets: np.ndarray) -> float:
    """Sigmoid cross-entropy: mean over the batch, sum over labels; >= 0."""
    logits = np.asarray(logits, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if logits.size == 0:
        raise ValueError("empty batch")
    if logits.shape != targets.shape:
        raise ValueError("logits/targets shape mismatch")
    probs = np.clip(_sigmoid(logits), _CLAMP, 1.0 - _CLAMP)
    per_sample = -(targets * np.log(probs) + (1.0 - targets) * np.log(1.0 - probs))
    return float(per_sample.sum(axis=1).mean())


def combos_to_array(combos: list[LabelCombination]) -> np.ndarray:
    return np.array([c.bits for c in combos], dtype=np.float64)


def _loss_and_grads(
    head: dict[str, np.ndarray], h: np.ndarray, targets: np.ndarray
) -> tuple[float, dict[str, np.ndarray]]:
    logits, cache = _forward(head, h)
    loss = sigmoid_ce_loss(logits, targets)
    n = h.shape[0]
    g = (_sigmoid(logits) - targets) / n  # d(loss)/d(logits)
    grads: dict[str, np.ndarray] = {}
    if "W1" in head:
        a = cache["a"]
        grads["W2"] = g.T @ a
        grads["b2"] = g.sum(axis=0)
        da = (g @ head["W2"]) * (1.0 - a * a)
        grads["W1"] = da.T @ cache["h"]
        grads["b1"] = da.sum(axis=0)
    else:
        grads["W2"] = g.T @ cache["h"]
        grads["b2"] = g.sum(axis=0)
    return loss, grads


def train(
    model: ClassifierModel,
    labeled: list[tuple[Sample, LabelCombination]],
    config: TrainConfig,
) -> ClassifierModel:
    """Mini-batch SGD with momentum over seeded shuffled epochs."""
    if not labeled:
        raise ValueError("labeled set is empty")
    feats = model.transform(np.stack([s.features for s, _ in labeled]))
    targets = combos_to_array([c for _, c in labeled])
    rng = np.random.default_rng(config.seed)
    head = {name: arr.copy() for name, arr in model.head.items()}
    velocity = {name: np.zeros_like(arr) for name, arr in head.items()}
    n = feats.shape[0]
    for _ in range(config.epochs):
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            loss, grads = _loss_and_grads(head, feats[idx], targets[idx])
            if not np.isfinite(loss):
                raise FloatingPointError(
                    "non-finite training loss; lower the learning rate"
                )
            for name in head:
                g = grads[name]
                if config.weight_decay > 0.0 and name.startswith("W"):
                    g = g + config.weight_decay * head[name]
                velocity[name] = config.momentum * velocity[name] + g
                head[name] = head[name] - config.learning_rate * velocity[name]
    return replace(model, head=head)


def fine_tune(
    model: ClassifierModel,
    batch: list[tuple[Sample, LabelCombination]],
    config: TrainConfig,
) -> ClassifierModel:
    """Head-only update; the frozen stage is carried over byte-identically."""
    updated = train(model, batch, config)
    if model.frozen_projection is not None:
        assert updated.frozen_projection.tobytes() == model.frozen_projection.tobytes()
    return updated


def predict_proba(
    model: ClassifierModel, samples: list[Sample], iteration: int = 0
) -> StateMatrix:
    """Per-label sigmoid probabilities for each sample, order-aligned."""
    for s in samples:
        if s.features.shape[0] != model.feature_dim:
            raise ValueError(f"sample {s.id!r} feature dim mismatch")
    if not samples:
        return StateMatrix(ids=(), probs=np.zeros((0, model.schema.m)), iteration=iteration)
    feats = np.stack([s.features for s in samples])
    logits, _ = model.forward(feats)
    return StateMatrix(
        ids=tuple(s.id for s in samples), probs=_sigmoid(logits), iteration=iteration
    )


def grad_check(
    model: ClassifierModel,
    batch: list[tuple[Sample, LabelCombination]],
    step: float = 1e-5,
) -> float:
    """Max relative error of analytic head gradients vs central finite differences."""
    if not batch:
        raise ValueError("empty batch")
    feats = model.transform(np.stack([s.features for s, _ in batch]))
    targets = combos_to_array([c for _, c in batch])
    head = {name: arr.copy() for name, arr in model.head.items()}
    _, grads = _loss_and_grads(head, feats, targets)
    worst = 0.0
    for name, arr in head.items():
        flat = arr.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + step
            up = sigmoid_ce_loss(_forward(head, feats)[0], targets)
            flat[i] = orig - step
            down = sigmoid_ce_loss(_forward(head, feats)[0], targets)
            flat[i] = orig
            numeric = (up - down) / (2.0 * step)
            analytic = grads[name].reshape(-1)[i]
            scale = max(abs(analytic), abs(numeric))
            err = abs(analytic - numeric)
            if scale > 1e-8:
                err /= scale
            worst = max(worst, err)
    return worst


def save_checkpoint(model: ClassifierModel, path: str) -> None:
    """Versioned npz checkpoint; round-trips bit-exactly."""
    meta = {
        "version": 1,
        "labels": list(model.schema.labels),
        "exclusive_index": model.schema.exclusive_index,
        "feature_dim": model.feature_dim,
        "head_names": sorted(model.head),
        "has_projection": model.frozen_projection is not None,
    }
    arrays = {f"head_{name}": arr for name, arr in model.head.items()}
    if model.frozen_projection is not None:
        arrays["projection"] = model.frozen_projection
    np.savez(path, meta=np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8), **arrays)


def load_checkpoint(path: str) -> ClassifierModel:
    with np.load(path) as data:
        meta = json.loads(bytes(data["meta"]).decode())
        if meta.get("version") != 1:
            raise ValueError("unsupported checkpoint version")
        schema = LabelSchema(
            labels=tuple(meta["labels"]), exclusive_index=meta["exclusive_index"]
        )
        head = {name: data[f"head_{name}"] for name in meta["head_names"]}
        projection = data["projection"] if meta["has_projection"] else None
        return ClassifierModel(
            schema=schema,
            feature_dim=meta["feature_dim"],
            frozen_projection=projection,
            head=head,
        )
