"""Annotation queue and simulated oracle for the human-machine review step."""

from __future__ import annotations

import threading
from dataclasses import dataclass, replace

import numpy as np

from .core import LabelCombination, ProbabilityVector


@dataclass(frozen=True)
class AnnotationTask:
    """One sample awaiting review, defaulted to its pseudo-label combination."""

    sample_id: str
    proposed: LabelCombination
    prob: ProbabilityVector
    iteration: int
    status: str = "pending"  # pending | confirmed | corrected


@dataclass(frozen=True)
class AnnotationResult:
    sample_id: str
    final: LabelCombination
    changed: bool
    source: str  # simulated | human


def oracle_confirm(task: AnnotationTask, truth: LabelCombination) -> AnnotationResult:
    """Simulated annotator: always answers with ground truth."""
    if truth is None:
        raise ValueError(f"no ground truth for sample {task.sample_id!r}")
    return AnnotationResult(
        sample_id=task.sample_id,
        final=truth,
        changed=truth != task.proposed,
        source="simulated",
    )


class AnnotationQueue:
    """FIFO of pending tasks with serialized mutation and finalized results."""

    def __init__(self):
        self._lock = threading.Lock()
        self._pending: dict[str, AnnotationTask] = {}
        self._finalized: dict[str, AnnotationResult] = {}

    def enqueue(self, tasks: list[AnnotationTask]) -> None:
        with self._lock:
            for task in tasks:
                if task.sample_id in self._pending:
                    raise ValueError(f"task {task.sample_id!r} already pending")
            for task in tasks:
                self._pending[task.sample_id] = task

    def next_pending(self) -> AnnotationTask | None:
        with self._lock:
            for task in self._pending.values():
                return task
            return None

    def get(self, sample_id: str) -> AnnotationTask | None:
        with self._lock:
            return self._pending.get(sample_id)

    def submit(
        self, sample_id: str, final: LabelCombination, source: str = "human"
    ) -> AnnotationResult:
        with self._lock:
            if sample_id in self._finalized:
                raise KeyError(f"task {sample_id!r} already finalized")
            task = self._pending.get(sample_id)
            if task is None:
                raise KeyError(f"no pending task {sample_id!r}")
            if len(final) != len(task.proposed):
                raise ValueError("combination length mismatch")
            changed = final != task.proposed
            result = AnnotationResult(
                sample_id=sample_id, final=final, changed=changed, source=source
            )
            status = "corrected" if changed else "confirmed"
            del self._pending[sample_id]
            self._finalized[sample_id] = result
            self._last_status = status
            return result

    @property
    def pending_count(self) -> int:
        with self._lock:
            return len(self._pending)

    @property
    def finalized_count(self) -> int:
        with self._lock:
            return len(self._finalized)

    def is_empty(self) -> bool:
        return self.pending_count == 0

    def results(self) -> list[AnnotationResult]:
        with self._lock:
            return list(self._finalized.values())

    def drain_results(self) -> list[AnnotationResult]:
        """Return all finalized results and reset for the next iteration."""
        with self._lock:
            out = list(self._finalized.values())
            self._finalized.clear()
            return out


class SimulatedOracle:
    """Answers every pending task from ground truth, with optional bit noise."""

    def __init__(self, noise_rate: float = 0.0, seed: int = 0):
        if not 0.0 <= noise_rate <= 1.0:
            raise ValueError("noise_rate must lie in [0, 1]")
        self.noise_rate = noise_rate
        self._rng = np.random.default_rng(seed)

    def answer(self, task: AnnotationTask, truth: LabelCombination) -> LabelCombination:
        result = oracle_confirm(task, truth)
        final = result.final
        if self.noise_rate > 0.0:
            bits = [
                1 - b if self._rng.random() < self.noise_rate else b
                for b in final.bits
            ]
            final = LabelCombination(tuple(bits))
        return final

    def annotate_all(
        self, queue: AnnotationQueue, truth_lookup
    ) -> list[AnnotationResult]:
        results = []
        while (task := queue.next_pending()) is not None:
            final = self.answer(task, truth_lookup(task.sample_id))
            results.append(queue.submit(task.sample_id, final, source="simulated"))
        return results
