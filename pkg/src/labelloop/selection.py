"""Informative-sample selection: margin, least-confidence, entropy, random."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .core import LabelSchema, ProbabilityVector, StateMatrix


class StrategyKind(str, Enum):
    MLM = "mlm"
    LC = "lc"
    MLE = "mle"
    RANDOM = "random"


@dataclass(frozen=True)
class SelectionStrategy:
    kind: StrategyKind = StrategyKind.MLM
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ActionBatch:
    """Selected sample ids with aligned informativeness scores."""

    ids: tuple[str, ...]
    scores: tuple[float, ...]
    iteration: int = 0

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(self.ids))
        object.__setattr__(self, "scores", tuple(float(s) for s in self.scores))
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("selected ids must be distinct")
        if len(self.ids) != len(self.scores):
            raise ValueError("ids and scores must align")


def score_mlm(p: ProbabilityVector | np.ndarray, schema: LabelSchema) -> float:
    """Margin between the healthy-label probability and the largest other label.

    Small margin means the model cannot separate healthy from diseased, so the
    sample is informative. Always in [0, 1].
    """
    arr = p.p if isinstance(p, ProbabilityVector) else np.asarray(p, dtype=np.float64)
    ex = schema.exclusive_index
    others = np.delete(arr, ex)
    return float(abs(arr[ex] - others.max()))


def score_lc(p: ProbabilityVector | np.ndarray) -> float:
    """Per-sample confidence: the largest per-label probability."""
    arr = p.p if isinstance(p, ProbabilityVector) else np.asarray(p, dtype=np.float64)
    return float(arr.max())


def _xlogx(v: np.ndarray) -> np.ndarray:
    # 0 * log 0 := 0
    out = np.zeros_like(v)
    nz = v > 0.0
    out[nz] = v[nz] * np.log(v[nz])
    return out


def score_mle(p: ProbabilityVector | np.ndarray) -> float:
    """Negative binary entropy summed over labels (natural log); always <= 0.

    Smaller values mean higher entropy, i.e. richer information.
    """
    arr = p.p if isinstance(p, ProbabilityVector) else np.asarray(p, dtype=np.float64)
    return float(np.sum(_xlogx(arr) + _xlogx(1.0 - arr)))


def score_state(state: StateMatrix, strategy: SelectionStrategy, schema: LabelSchema,
                seed: int = 0) -> np.ndarray:
    """Informativeness score for every pool row under the given strategy.

    For the random strategy the "score" is a seeded uniform draw per sample,
    so selection reduces to the same smallest-k rule as the other strategies.
    """
    kind = strategy.kind
    if kind == StrategyKind.RANDOM:
        rng = np.random.default_rng(seed)
        return rng.random(len(state))
    if kind == StrategyKind.MLM:
        return np.array([score_mlm(state.probs[i], schema) for i in range(len(state))])
    if kind == StrategyKind.LC:
        return np.array([score_lc(state.probs[i]) for i in range(len(state))])
    if kind == StrategyKind.MLE:
        return np.array([score_mle(state.probs[i]) for i in range(len(state))])
    raise ValueError(f"unknown strategy kind {kind!r}")


def select(
    state: StateMatrix,
    strategy: SelectionStrategy,
    k: int,
    schema: LabelSchema,
    seed: int = 0,
) -> ActionBatch:
    """Pick the k most informative pool samples (smallest score, id tie-break)."""
    if k <= 0:
        raise ValueError("k must be >= 1")
    if len(state) == 0:
        raise ValueError("state matrix is empty")
    scores = score_state(state, strategy, schema, seed=seed)
    order = sorted(range(len(state)), key=lambda i: (scores[i], state.ids[i]))
    chosen = order[: min(k, len(state))]
    return ActionBatch(
        ids=tuple(state.ids[i] for i in chosen),
        scores=tuple(float(scores[i]) for i in chosen),
        iteration=state.iteration,
    )
