"""HTTP annotation service endpoints and their error codes."""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from labelloop import (
    ALConfig,
    Dataset,
    LabelCombination,
    LabelSchema,
    PoolPartition,
    Sample,
)
from labelloop.service import AnnotationSession, create_app

SCHEMA = LabelSchema(labels=("h", "a", "b"), exclusive_index=0)


def make_session(k_max=5, max_iterations=2):
    rng = np.random.default_rng(0)
    centers = {"100": np.array([3.0, 0.0, 0.0]), "010": np.array([0.0, 3.0, 0.0])}
    combos = list(centers)
    samples = []
    for i in range(40):
        c = combos[i % 2]
        samples.append(
            Sample(
                id=f"s{i:03d}",
                features=centers[c] + 0.3 * rng.standard_normal(3),
                truth=LabelCombination(tuple(int(b) for b in c)),
            )
        )
    ds = Dataset(schema=SCHEMA, feature_dim=3, samples=samples)
    ids = ds.ids()
    part = PoolPartition(
        candidate=frozenset(ids[:30]), labeled={}, test=frozenset(ids[30:])
    )
    cfg = ALConfig(k_max=k_max, max_iterations=max_iterations,
                   learning_rate=0.05, seed=0)
    return AnnotationSession(cfg, ds, part)


@pytest.fixture
def client():
    return TestClient(create_app(make_session()))


def drain(client):
    """Confirm every pending proposal; return the submitted sample ids."""
    submitted = []
    while True:
        r = client.get("/api/queue/next")
        if r.status_code == 204:
            return submitted
        task = r.json()
        resp = client.post(
            "/api/annotations",
            json={"sample_id": task["sample_id"], "final": task["proposed"]},
        )
        assert resp.status_code == 200
        submitted.append(task["sample_id"])


class TestQueueEndpoints:
    def test_next_task_shape(self, client):
        task = client.get("/api/queue/next").json()
        assert set(task) >= {
            "sample_id", "iteration", "proposed", "probabilities", "labels",
        }
        assert len(task["probabilities"]) == 3
        assert task["iteration"] == 1

    def test_confirm_reduces_pending(self, client):
        task = client.get("/api/queue/next").json()
        resp = client.post(
            "/api/annotations",
            json={"sample_id": task["sample_id"], "final": task["proposed"]},
        ).json()
        assert resp["changed"] is False
        assert resp["pending"] == 4

    def test_correction_flagged(self, client):
        task = client.get("/api/queue/next").json()
        flipped = "".join("1" if c == "0" else "0" for c in task["proposed"])
        resp = client.post(
            "/api/annotations",
            json={"sample_id": task["sample_id"], "final": flipped},
        ).json()
        assert resp["changed"] is True

    def test_malformed_combination_422(self, client):
        task = client.get("/api/queue/next").json()
        resp = client.post(
            "/api/annotations", json={"sample_id": task["sample_id"], "final": "01x"}
        )
        assert resp.status_code == 422
        assert resp.json()["code"] == "malformed_combination"

    def test_unknown_id_404(self, client):
        resp = client.post(
            "/api/annotations", json={"sample_id": "nope", "final": "100"}
        )
        assert resp.status_code == 404
        assert resp.json()["code"] == "unknown_id"

    def test_double_submit_409(self, client):
        task = client.get("/api/queue/next").json()
        body = {"sample_id": task["sample_id"], "final": task["proposed"]}
        assert client.post("/api/annotations", json=body).status_code == 200
        resp = client.post("/api/annotations", json=body)
        assert resp.status_code == 409
        assert resp.json()["code"] == "already_finalized"


class TestLoopEndpoints:
    def test_advance_guard(self, client):
        resp = client.post("/api/iteration/advance")
        assert resp.status_code == 409
        assert resp.json()["code"] == "queue_not_drained"

    def test_full_iteration_cycle(self, client):
        submitted = drain(client)
        assert len(submitted) == 5
        resp = client.post("/api/iteration/advance")
        assert resp.status_code == 200
        body = resp.json()
        assert body["iteration"] == 1 and body["completed"] is False
        progress = client.get("/api/progress").json()
        assert progress["iteration"] == 1
        assert progress["labeled_count"] == 5
        assert progress["pending"] == 5  # next batch already queued

    def test_run_completes_and_locks(self, client):
        for _ in range(2):
            drain(client)
            assert client.post("/api/iteration/advance").status_code == 200
        progress = client.get("/api/progress").json()
        assert progress["completed"] is True
        assert client.get("/api/queue/next").status_code == 204
        resp = client.post("/api/iteration/advance")
        assert resp.status_code == 409
        assert resp.json()["code"] == "run_completed"

    def test_confirmed_corrected_tallies(self, client):
        task = client.get("/api/queue/next").json()
        flipped = "".join("1" if c == "0" else "0" for c in task["proposed"])
        client.post(
            "/api/annotations", json={"sample_id": task["sample_id"], "final": flipped}
        )
        drain(client)
        progress = client.get("/api/progress").json()
        assert progress["corrected_total"] == 1
        assert progress["confirmed_total"] == 4


class TestReadViews:
    def test_labels_view(self, client):
        body = client.get("/api/labels").json()
        assert body["labels"] == ["h", "a", "b"]
        assert body["exclusive_index"] == 0
        assert len(body["examples"]["h"]) == 3

    def test_progress_before_first_iteration(self, client):
        body = client.get("/api/progress").json()
        assert body["iteration"] == 0
        assert body["latest"] is None
        assert body["series"] == []
        assert body["labeled_fraction"] == 0.0
