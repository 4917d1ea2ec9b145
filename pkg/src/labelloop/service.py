"""HTTP annotation service: exposes the review queue, labels, and progress.

The active-learning loop advances only when the annotation queue has been
drained; queue mutations are serialized behind a session lock while reads
stay concurrent.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .core import Dataset, LabelCombination, PoolPartition
from .driver import ALConfig, ALState, finalize_iteration, new_state, prepare_iteration


class AnnotationIn(BaseModel):
    sample_id: str
    final: str  # combination string, e.g. "0101"


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


class AnnotationSession:
    """One human-in-the-loop run: loop state plus serialized queue access."""

    def __init__(self, config: ALConfig, dataset: Dataset, partition: PoolPartition):
        self._lock = threading.Lock()
        self.dataset = dataset
        self.state: ALState = new_state(config, dataset, partition)
        self.completed = False
        self._confirmed = 0
        self._corrected = 0
        prepare_iteration(self.state)

    # -- queue ---------------------------------------------------------

    def next_task(self) -> dict | None:
        task = self.state.queue.next_pending()
        if task is None:
            return None
        return {
            "sample_id": task.sample_id,
            "iteration": task.iteration,
            "proposed": str(task.proposed),
            "probabilities": [float(v) for v in task.prob.p],
            "labels": list(self.dataset.schema.labels),
            "examples": {
                name: f"/api/labels#{name}" for name in self.dataset.schema.labels
            },
        }

    def submit(self, sample_id: str, final: str) -> dict:
        schema = self.dataset.schema
        if len(final) != schema.m or any(c not in "01" for c in final):
            raise ValueError(
                f"combination {final!r} must be {schema.m} characters of 0/1"
            )
        combo = LabelCombination(tuple(int(c) for c in final))
        with self._lock:
            result = self.state.queue.submit(sample_id, combo, source="human")
            if result.changed:
                self._corrected += 1
            else:
                self._confirmed += 1
        return {
            "sample_id": result.sample_id,
            "final": str(result.final),
            "changed": result.changed,
            "pending": self.state.queue.pending_count,
        }

    def is_finalized(self, sample_id: str) -> bool:
        return any(r.sample_id == sample_id for r in self.state.queue.results())

    # -- loop ----------------------------------------------------------

    def advance(self) -> dict:
        with self._lock:
            if not self.state.queue.is_empty():
                raise RuntimeError("annotation queue not drained")
            if self.completed:
                raise RuntimeError("run already completed")
            results = self.state.queue.results()
            report = finalize_iteration(self.state, results)
            done = (
                self.state.iteration >= self.state.config.max_iterations
                or not self.state.partition.candidate
            )
            if done:
                self.completed = True
            else:
                prepare_iteration(self.state)
            return {"iteration": report.iteration, "completed": self.completed,
                    "report": report.to_dict()}

    # -- read views ----------------------------------------------------

    def labels_view(self) -> dict:
        schema = self.dataset.schema
        examples: dict[str, list[dict]] = {name: [] for name in schema.labels}
        for s in self.dataset.samples:  # fixed order: first few of each label
            if s.truth is None:
                continue
            for j, name in enumerate(schema.labels):
                if s.truth.bits[j] == 1 and len(examples[name]) < 3:
                    examples[name].append(
                        {"sample_id": s.id, "combination": str(s.truth)}
                    )
        return {
            "labels": list(schema.labels),
            "exclusive_index": schema.exclusive_index,
            "examples": examples,
        }

    def progress_view(self) -> dict:
        latest = self.state.reports[-1].to_dict() if self.state.reports else None
        return {
            "iteration": self.state.iteration,
            "max_iterations": self.state.config.max_iterations,
            "completed": self.completed,
            "labeled_fraction": self.state.labeled_fraction(),
            "labeled_count": len(self.state.partition.labeled),
            "pending": self.state.queue.pending_count,
            "finalized": self.state.queue.finalized_count,
            "confirmed_total": self._confirmed,
            "corrected_total": self._corrected,
            "latest": latest,
            "series": [r.to_dict() for r in self.state.reports],
        }


def create_app(session: AnnotationSession) -> FastAPI:
    app = FastAPI(title="labelloop annotation service")

    @app.get("/api/queue/next")
    def queue_next():
        task = session.next_task()
        if task is None:
            return Response(status_code=204)
        return task

    @app.post("/api/annotations")
    def post_annotation(body: AnnotationIn):
        try:
            return session.submit(body.sample_id, body.final)
        except ValueError as exc:
            return _error(422, "malformed_combination", str(exc))
        except KeyError as exc:
            if session.is_finalized(body.sample_id):
                return _error(409, "already_finalized", str(exc.args[0]))
            return _error(404, "unknown_id", str(exc.args[0]))

    @app.get("/api/labels")
    def get_labels():
        return session.labels_view()

    @app.get("/api/progress")
    def get_progress():
        return session.progress_view()

    @app.post("/api/iteration/advance")
    def advance():
        try:
            return session.advance()
        except RuntimeError as exc:
            code = (
                "queue_not_drained"
                if "not drained" in str(exc)
                else "run_completed"
            )
            return _error(409, code, str(exc))

    return app
