"""Core domain types: label schema, combinations, samples, pool bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class LabelSchema:
    """Ordered label vocabulary with one mutually-exclusive "healthy" label."""

    labels: tuple[str, ...]
    exclusive_index: int = 0

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) < 2:
            raise ValueError("schema needs at least 2 labels")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("label names must be unique")
        if any(not name for name in self.labels):
            raise ValueError("label names must be non-empty")
        if not 0 <= self.exclusive_index < len(self.labels):
            raise ValueError("exclusive_index out of range")

    @property
    def m(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class LabelCombination:
    """Joint per-label decision as a bit vector, e.g. (0, 1, 0, 1) <-> "0101"."""

    bits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("bits must be 0 or 1")

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return encode_combination(self)


def encode_combination(combo: LabelCombination) -> str:
    """Bit vector to its string form, e.g. (0,1,0,1) -> "0101"."""
    return "".join("1" if b else "0" for b in combo.bits)


def decode_combination(s: str, schema: LabelSchema) -> LabelCombination:
    """Inverse of encode_combination; validates length and characters."""
    if len(s) != schema.m:
        raise ValueError(f"combination {s!r} has length {len(s)}, expected {schema.m}")
    if any(c not in "01" for c in s):
        raise ValueError(f"combination {s!r} contains characters outside '0'/'1'")
    return LabelCombination(tuple(int(c) for c in s))


@dataclass(frozen=True)
class Sample:
    """One pool element: id, fixed-dimension feature vector, optional ground truth."""

    id: str
    features: np.ndarray
    truth: LabelCombination | None = None

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=np.float64)
        if feats.ndim != 1:
            raise ValueError("features must be a 1-D vector")
        feats.setflags(write=False)
        object.__setattr__(self, "features", feats)


@dataclass
class Dataset:
    """Samples with a shared schema and feature dimension; ids unique."""

    schema: LabelSchema
    feature_dim: int
    samples: list[Sample] = field(default_factory=list)

    def __post_init__(self):
        seen: set[str] = set()
        for s in self.samples:
            if s.id in seen:
                raise ValueError(f"duplicate sample id {s.id!r}")
            seen.add(s.id)
            if s.features.shape[0] != self.feature_dim:
                raise ValueError(
                    f"sample {s.id!r} has feature dim {s.features.shape[0]}, "
                    f"expected {self.feature_dim}"
                )
            if s.truth is not None and len(s.truth) != self.schema.m:
                raise ValueError(f"sample {s.id!r} truth length mismatch")
        self._by_id = {s.id: s for s in self.samples}

    def __len__(self) -> int:
        return len(self.samples)

    def __getitem__(self, sample_id: str) -> Sample:
        return self._by_id[sample_id]

    def ids(self) -> list[str]:
        return [s.id for s in self.samples]

    def subset(self, ids) -> list[Sample]:
        return [self._by_id[i] for i in ids]


@dataclass(frozen=True)
class ProbabilityVector:
    """Per-label independent probabilities; entries in [0,1], need not sum to 1."""

    p: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.p, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("probability vector must be 1-D")
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise ValueError("probabilities must lie in [0, 1]")
        arr.setflags(write=False)
        object.__setattr__(self, "p", arr)

    def __len__(self) -> int:
        return len(self.p)


@dataclass(frozen=True)
class StateMatrix:
    """Per-label prediction probabilities for every pool sample at iteration t."""

    ids: tuple[str, ...]
    probs: np.ndarray  # shape (pool size, m)
    iteration: int = 0

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(self.ids))
        arr = np.asarray(self.probs, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != len(self.ids):
            raise ValueError("probability matrix rows must align with ids")
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise ValueError("probabilities must lie in [0, 1]")
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    def row(self, i: int) -> ProbabilityVector:
        return ProbabilityVector(self.probs[i])

    def __len__(self) -> int:
        return len(self.ids)


@dataclass(frozen=True)
class PoolPartition:
    """Disjoint candidate / labeled / test split; labeled ids carry combinations."""

    candidate: frozenset[str]
    labeled: dict[str, LabelCombination]
    test: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "candidate", frozenset(self.candidate))
        object.__setattr__(self, "test", frozenset(self.test))
        labeled_ids = set(self.labeled)
        if (
            self.candidate & labeled_ids
            or self.candidate & self.test
            or labeled_ids & self.test
        ):
            raise ValueError("candidate/labeled/test sets must be pairwise disjoint")


def commit_annotations(
    part: PoolPartition, annotated: list[tuple[str, LabelCombination]]
) -> PoolPartition:
    """Move annotated ids from the candidate pool into the labeled set."""
    batch_ids = [sid for sid, _ in annotated]
    if len(set(batch_ids)) != len(batch_ids):
        raise ValueError("duplicate id in annotation batch")
    missing = [sid for sid in batch_ids if sid not in part.candidate]
    if missing:
        raise ValueError(f"ids not in candidate pool: {missing}")
    labeled = dict(part.labeled)
    labeled.update({sid: combo for sid, combo in annotated})
    return PoolPartition(
        candidate=part.candidate - set(batch_ids),
        labeled=labeled,
        test=part.test,
    )
